#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ignn/graph.hpp"
#include "ignn/matrix.hpp"

namespace ignn {

// Seeded generator with explicit bounded draws, so the same seed yields the
// same stream regardless of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform in [0, 1).
    double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform_real() < p; }

private:
    std::mt19937_64 engine_;
};

struct SbmConfig {
    std::size_t nodes = 0;
    std::size_t blocks = 1;
    double intra_degree = 0.0;     // expected within-block degree per node
    double inter_degree = 0.0;     // expected cross-block degree per node
    std::size_t migrants_per_step = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CommunityLabels {
    std::vector<std::uint32_t> block;
};

struct SbmGraph {
    Graph graph;
    CommunityLabels labels;
    Rng rng; // stream continues into subsequent migration steps
};

// Block-partitioned random graph. Nodes split into near-equal blocks (the
// remainder joins the last block); each node draws partners so the expected
// within/cross-block degrees land near the configured targets.
SbmGraph sbm_init(const SbmConfig& cfg);

// Moves migrants_per_step random nodes to a new block each: all of the
// migrant's current edges into its old block are deleted and fresh edges
// into the new block are drawn. Mutates g and labels to the post-step shape
// and returns the event list, valid for sequential replay elsewhere.
std::vector<GraphEvent> sbm_migrate(Graph& g, CommunityLabels& labels, const SbmConfig& cfg,
                                    Rng& rng);

// n x d matrix with roughly `density` of entries set, uniform in [0,1).
Matrix sparse_random_signal(std::size_t n, std::size_t d, double density, Rng& rng);

}  // namespace ignn
