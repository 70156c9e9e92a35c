#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ignn/graph.hpp"
#include "ignn/propagation.hpp"

namespace ignn {

// Reference solutions are dense; past this size the cost and memory are no
// longer desk-scale and callers get a hard refusal instead of a stall.
inline constexpr std::size_t kOracleMaxNodes = 5000;

struct OracleInfeasible : std::runtime_error {
    explicit OracleInfeasible(const std::string& what) : std::runtime_error(what) {}
};

// y = P x against the current graph, where P(s,t) = 1/(d(s)^beta d(t)^(1-beta))
// for t adjacent to s (self-loop included). Sparse, no dense P is formed.
std::vector<double> apply_propagation_matrix(const Graph& g, double beta,
                                             std::span<const double> x);

// LU factorization of (I - (1-alpha)P) with partial pivoting, reusable
// across right-hand sides when verifying several signal columns.
class DenseSolver {
public:
    DenseSolver(const Graph& g, const PropagationConfig& cfg);

    // Solves (I - (1-alpha)P) pi = alpha * x.
    std::vector<double> solve(std::span<const double> x) const;

private:
    std::size_t n_;
    std::vector<double> lu_;
    std::vector<std::size_t> pivot_;
};

// Converged propagation vector via the direct dense solve.
std::vector<double> exact_propagate(const Graph& g, const PropagationConfig& cfg,
                                    std::span<const double> x);

// Same quantity through the geometric series sum_l alpha(1-alpha)^l P^l x,
// truncated once the remaining geometric mass drops below tail_bound.
// Deliberately a separate route from the solver so the two can referee
// each other in tests.
std::vector<double> exact_propagate_series(const Graph& g, const PropagationConfig& cfg,
                                           std::span<const double> x, double tail_bound = 1e-14);

// Classic personalized pagerank from source s (beta = 0, unit impulse).
std::vector<double> exact_ppr(const Graph& g, double alpha, NodeId s);

struct BoundReport {
    double max_violation = 0.0; // max over nodes of |estimate - exact| - eps*d^(1-beta)
    NodeId worst_node = 0;
};

// Compares one state column against the dense solution. Violation <= 0
// everywhere means every node honors its degree-scaled error budget.
BoundReport check_error_bound(const Graph& g, const PropagationConfig& cfg,
                              const PropagationState& state, std::size_t column);

// Same check against a prebuilt factorization, for callers walking many
// columns of one graph.
BoundReport check_error_bound(const Graph& g, const PropagationConfig& cfg,
                              const PropagationState& state, std::size_t column,
                              const DenseSolver& solver);

// Max-norm defect of the balance identity
//   estimate + alpha*residual - alpha*signal - (1-alpha) P estimate
// for one column. Zero (to rounding) whenever the engine is correct.
double check_invariant(const Graph& g, const PropagationConfig& cfg,
                       const PropagationState& state, std::size_t column);

}  // namespace ignn
