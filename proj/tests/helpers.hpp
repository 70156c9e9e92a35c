#pragma once

#include <cmath>
#include <vector>

#include "ignn/graph.hpp"
#include "ignn/instant_update.hpp"
#include "ignn/matrix.hpp"
#include "ignn/oracle.hpp"
#include "ignn/propagation.hpp"
#include "ignn/synth.hpp"

namespace testutil {

inline ignn::Graph make_er_graph(std::size_t n, double p, ignn::Rng& rng) {
    ignn::Graph g(n);
    for (ignn::NodeId u = 0; u < n; ++u)
        for (ignn::NodeId v = u + 1; v < n; ++v)
            if (rng.bernoulli(p))
                g.insert_edge(u, v);
    return g;
}

inline ignn::Matrix random_signal(std::size_t n, std::size_t d, ignn::Rng& rng) {
    ignn::Matrix m(n, d);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = 2.0 * rng.uniform_real() - 1.0;
    return m;
}

// Random event that is valid on the current graph: flips a random non-loop
// pair between present and absent.
inline ignn::GraphEvent random_event(const ignn::Graph& g, ignn::Rng& rng) {
    for (;;) {
        auto u = static_cast<ignn::NodeId>(rng.uniform_index(g.node_count()));
        auto v = static_cast<ignn::NodeId>(rng.uniform_index(g.node_count()));
        if (u == v) continue;
        return {g.has_edge(u, v) ? ignn::EventKind::DeleteEdge : ignn::EventKind::InsertEdge, u,
                v};
    }
}

// Max over nodes of |estimate - exact| - eps*d^(1-beta) for every column;
// <= slack means the degree-scaled error budget holds.
inline double worst_bound_violation(const ignn::Graph& g, const ignn::PropagationConfig& cfg,
                                    const ignn::PropagationState& state) {
    ignn::DenseSolver solver(g, cfg);
    double worst = -1e300;
    for (std::size_t col = 0; col < state.dims(); ++col) {
        auto report = ignn::check_error_bound(g, cfg, state, col, solver);
        worst = std::max(worst, report.max_violation);
    }
    return worst;
}

inline double worst_invariant_defect(const ignn::Graph& g, const ignn::PropagationConfig& cfg,
                                     const ignn::PropagationState& state) {
    double worst = 0.0;
    for (std::size_t col = 0; col < state.dims(); ++col)
        worst = std::max(worst, ignn::check_invariant(g, cfg, state, col));
    return worst;
}

inline double signal_peak(const ignn::PropagationState& state) {
    double peak = 0.0;
    for (std::size_t i = 0; i < state.signal.size(); ++i)
        peak = std::max(peak, std::fabs(state.signal.data()[i]));
    return peak;
}

}  // namespace testutil
