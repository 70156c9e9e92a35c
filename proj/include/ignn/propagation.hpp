#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "ignn/graph.hpp"
#include "ignn/matrix.hpp"

namespace ignn {

struct PropagationConfig {
    double alpha = 0.2;    // teleport probability, in (0,1)
    double beta = 0.5;     // degree-normalization convexity, in [0,1]
    double epsilon = 1e-7; // per-node residual tolerance, > 0

    void validate() const {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw std::invalid_argument("alpha must lie in (0,1)");
        if (!(beta >= 0.0) || !(beta <= 1.0))
            throw std::invalid_argument("beta must lie in [0,1]");
        if (!(epsilon > 0.0))
            throw std::invalid_argument("epsilon must be positive");
    }
};

// d^beta and d^(1-beta) with the three everyday exponents short-circuited,
// so the common configurations avoid pow in the push loop.
struct DegreeScale {
    double beta;

    double pow_beta(std::size_t d) const {
        if (beta == 0.0) return 1.0;
        if (beta == 1.0) return static_cast<double>(d);
        if (beta == 0.5) return std::sqrt(static_cast<double>(d));
        return std::pow(static_cast<double>(d), beta);
    }

    double pow_one_minus_beta(std::size_t d) const {
        if (beta == 0.0) return static_cast<double>(d);
        if (beta == 1.0) return 1.0;
        if (beta == 0.5) return std::sqrt(static_cast<double>(d));
        return std::pow(static_cast<double>(d), 1.0 - beta);
    }
};

// A node is pushable while |r(s)| exceeds this.
inline double residual_threshold(const PropagationConfig& cfg, std::size_t degree) {
    return cfg.epsilon * DegreeScale{cfg.beta}.pow_one_minus_beta(degree);
}

struct PushStats {
    std::uint64_t pushes = 0;          // node pops that moved mass
    std::uint64_t touched_entries = 0; // residual writes performed
    double wall_seconds = 0.0;

    PushStats& operator+=(const PushStats& o) {
        pushes += o.pushes;
        touched_entries += o.touched_entries;
        wall_seconds += o.wall_seconds;
        return *this;
    }
};

// Estimate/residual pair for one signal matrix. Shapes stay locked together:
// all three are node_count x dims.
struct PropagationState {
    Matrix estimate;
    Matrix residual;
    Matrix signal;
    bool poisoned = false;

    std::size_t dims() const { return signal.cols(); }
    std::size_t node_count() const { return signal.rows(); }
};

// Fresh state for a signal: estimate 0, residual = signal.
PropagationState new_state(const Graph& g, Matrix signal);

// Runs the push loop on columns [col_begin, col_end) until every node is
// under its residual threshold. Returns the work done.
PushStats basic_propagate(const Graph& g, const PropagationConfig& cfg, PropagationState& state,
                          std::size_t col_begin, std::size_t col_end);

// All columns, split across `threads` workers (columns never interact).
PushStats basic_propagate(const Graph& g, const PropagationConfig& cfg, PropagationState& state,
                          unsigned threads = 1);

inline const Matrix& embedding(const PropagationState& state) { return state.estimate; }

}  // namespace ignn
