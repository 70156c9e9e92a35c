#include "ignn/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ignn {

std::vector<double> apply_propagation_matrix(const Graph& g, double beta,
                                             std::span<const double> x) {
    std::size_t n = g.node_count();
    if (x.size() != n)
        throw std::invalid_argument("apply_propagation_matrix: vector length mismatch");
    DegreeScale scale{beta};
    std::vector<double> sender(n);
    for (NodeId t = 0; t < n; ++t)
        sender[t] = x[t] / scale.pow_one_minus_beta(g.degree(t));
    std::vector<double> y(n, 0.0);
    for (NodeId s = 0; s < n; ++s) {
        double acc = 0.0;
        for (NodeId t : g.neighbors(s))
            acc += sender[t];
        y[s] = acc / scale.pow_beta(g.degree(s));
    }
    return y;
}

DenseSolver::DenseSolver(const Graph& g, const PropagationConfig& cfg) : n_(g.node_count()) {
    cfg.validate();
    if (n_ > kOracleMaxNodes)
        throw OracleInfeasible("dense solve refused for n=" + std::to_string(n_) + " (limit " +
                               std::to_string(kOracleMaxNodes) + ")");

    DegreeScale scale{cfg.beta};
    lu_.assign(n_ * n_, 0.0);
    for (NodeId s = 0; s < n_; ++s) {
        double recv = scale.pow_beta(g.degree(s));
        for (NodeId t : g.neighbors(s))
            lu_[s * n_ + t] =
                -(1.0 - cfg.alpha) / (recv * scale.pow_one_minus_beta(g.degree(t)));
        lu_[s * n_ + s] += 1.0;
    }

    // In-place LU with partial pivoting.
    pivot_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t best = k;
        double best_abs = std::fabs(lu_[k * n_ + k]);
        for (std::size_t i = k + 1; i < n_; ++i) {
            double a = std::fabs(lu_[i * n_ + k]);
            if (a > best_abs) {
                best = i;
                best_abs = a;
            }
        }
        if (best_abs == 0.0)
            throw std::runtime_error("dense solve: singular system");
        pivot_[k] = best;
        if (best != k)
            for (std::size_t j = 0; j < n_; ++j)
                std::swap(lu_[k * n_ + j], lu_[best * n_ + j]);
        double inv = 1.0 / lu_[k * n_ + k];
        for (std::size_t i = k + 1; i < n_; ++i) {
            double m = lu_[i * n_ + k] * inv;
            lu_[i * n_ + k] = m;
            if (m == 0.0) continue;
            for (std::size_t j = k + 1; j < n_; ++j)
                lu_[i * n_ + j] -= m * lu_[k * n_ + j];
        }
    }
}

std::vector<double> DenseSolver::solve(std::span<const double> x) const {
    if (x.size() != n_)
        throw std::invalid_argument("dense solve: vector length mismatch");
    std::vector<double> b(x.begin(), x.end());
    for (std::size_t k = 0; k < n_; ++k) {
        if (pivot_[k] != k)
            std::swap(b[k], b[pivot_[k]]);
        for (std::size_t i = k + 1; i < n_; ++i)
            b[i] -= lu_[i * n_ + k] * b[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
        for (std::size_t j = k + 1; j < n_; ++j)
            b[k] -= lu_[k * n_ + j] * b[j];
        b[k] /= lu_[k * n_ + k];
    }
    return b;
}

std::vector<double> exact_propagate(const Graph& g, const PropagationConfig& cfg,
                                    std::span<const double> x) {
    DenseSolver solver(g, cfg);
    std::vector<double> rhs(x.begin(), x.end());
    for (double& v : rhs) v *= cfg.alpha;
    return solver.solve(rhs);
}

std::vector<double> exact_propagate_series(const Graph& g, const PropagationConfig& cfg,
                                           std::span<const double> x, double tail_bound) {
    cfg.validate();
    if (x.size() != g.node_count())
        throw std::invalid_argument("exact_propagate_series: vector length mismatch");
    std::vector<double> term(x.begin(), x.end());
    std::vector<double> acc(g.node_count(), 0.0);
    double weight = cfg.alpha;   // alpha (1-alpha)^l
    double remaining = 1.0;      // (1-alpha)^l, the geometric mass still unsummed
    while (remaining > tail_bound) {
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += weight * term[i];
        term = apply_propagation_matrix(g, cfg.beta, term);
        weight *= 1.0 - cfg.alpha;
        remaining *= 1.0 - cfg.alpha;
    }
    return acc;
}

std::vector<double> exact_ppr(const Graph& g, double alpha, NodeId s) {
    if (s >= g.node_count())
        throw std::invalid_argument("exact_ppr: source out of range");
    PropagationConfig cfg{alpha, 0.0, 1e-9};
    std::vector<double> x(g.node_count(), 0.0);
    x[s] = 1.0;
    return exact_propagate(g, cfg, x);
}

BoundReport check_error_bound(const Graph& g, const PropagationConfig& cfg,
                              const PropagationState& state, std::size_t column) {
    DenseSolver solver(g, cfg);
    return check_error_bound(g, cfg, state, column, solver);
}

BoundReport check_error_bound(const Graph& g, const PropagationConfig& cfg,
                              const PropagationState& state, std::size_t column,
                              const DenseSolver& solver) {
    if (column >= state.dims())
        throw std::invalid_argument("check_error_bound: column out of range");
    std::size_t n = g.node_count();
    std::size_t dims = state.dims();
    std::vector<double> x(n);
    for (NodeId s = 0; s < n; ++s)
        x[s] = cfg.alpha * state.signal(s, column);
    std::vector<double> exact = solver.solve(x);

    DegreeScale scale{cfg.beta};
    BoundReport report;
    bool first = true;
    for (NodeId s = 0; s < n; ++s) {
        double budget = cfg.epsilon * scale.pow_one_minus_beta(g.degree(s));
        double violation = std::fabs(state.estimate.data()[s * dims + column] - exact[s]) - budget;
        if (!std::isfinite(violation))
            violation = std::numeric_limits<double>::infinity();
        if (first || violation > report.max_violation) {
            report.max_violation = violation;
            report.worst_node = s;
            first = false;
        }
    }
    return report;
}

double check_invariant(const Graph& g, const PropagationConfig& cfg,
                       const PropagationState& state, std::size_t column) {
    if (column >= state.dims())
        throw std::invalid_argument("check_invariant: column out of range");
    std::size_t n = g.node_count();
    std::size_t dims = state.dims();
    std::vector<double> est(n);
    for (NodeId s = 0; s < n; ++s)
        est[s] = state.estimate.data()[s * dims + column];
    std::vector<double> propagated = apply_propagation_matrix(g, cfg.beta, est);

    double worst = 0.0;
    for (NodeId s = 0; s < n; ++s) {
        double defect = est[s] + cfg.alpha * state.residual(s, column) -
                        cfg.alpha * state.signal(s, column) -
                        (1.0 - cfg.alpha) * propagated[s];
        if (!std::isfinite(defect))
            return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::fabs(defect));
    }
    return worst;
}

}  // namespace ignn
