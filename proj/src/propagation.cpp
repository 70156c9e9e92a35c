#include "ignn/propagation.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

namespace ignn {

PropagationState new_state(const Graph& g, Matrix signal) {
    if (signal.rows() != g.node_count())
        throw std::invalid_argument("new_state: signal row count must equal node count");
    PropagationState state;
    state.estimate = Matrix(signal.rows(), signal.cols(), 0.0);
    state.residual = signal;
    state.signal = std::move(signal);
    return state;
}

namespace {

// Per-node powers and thresholds for the current degree sequence. Computed
// once per call and shared read-only across column workers.
struct PushTables {
    std::vector<double> pow_beta;
    std::vector<double> threshold;

    PushTables(const Graph& g, const PropagationConfig& cfg) {
        DegreeScale scale{cfg.beta};
        std::size_t n = g.node_count();
        pow_beta.resize(n);
        threshold.resize(n);
        for (NodeId s = 0; s < n; ++s) {
            std::size_t d = g.degree(s);
            pow_beta[s] = scale.pow_beta(d);
            threshold[s] = cfg.epsilon * scale.pow_one_minus_beta(d);
        }
    }
};

// FIFO over node ids with at most one occupancy per node, so a ring of
// capacity n+1 never overflows.
class NodeQueue {
public:
    explicit NodeQueue(std::size_t n) : ring_(n + 1) {}

    bool empty() const { return head_ == tail_; }

    void push(NodeId s) {
        ring_[tail_] = s;
        tail_ = (tail_ + 1) % ring_.size();
    }

    NodeId pop() {
        NodeId s = ring_[head_];
        head_ = (head_ + 1) % ring_.size();
        return s;
    }

private:
    std::vector<NodeId> ring_;
    std::size_t head_ = 0;
    std::size_t tail_ = 0;
};

PushStats propagate_column(const Graph& g, const PropagationConfig& cfg, const PushTables& tables,
                           const DegreeScale& scale, PropagationState& state, std::size_t col) {
    PushStats stats;
    std::size_t n = g.node_count();
    std::size_t dims = state.dims();
    double* est = state.estimate.data();
    double* res = state.residual.data();

    NodeQueue queue(n);
    std::vector<std::uint8_t> queued(n, 0);
    for (NodeId s = 0; s < n; ++s) {
        double rs = res[s * dims + col];
        if (!std::isfinite(rs)) {
            state.poisoned = true;
            throw std::runtime_error("basic_propagate: non-finite residual at node " +
                                     std::to_string(s));
        }
        if (std::fabs(rs) > tables.threshold[s]) {
            queue.push(s);
            queued[s] = 1;
        }
    }

    while (!queue.empty()) {
        NodeId s = queue.pop();
        queued[s] = 0;
        double rs = res[s * dims + col];
        if (std::fabs(rs) <= tables.threshold[s])
            continue;
        if (!std::isfinite(rs)) {
            state.poisoned = true;
            throw std::runtime_error("basic_propagate: non-finite residual at node " +
                                     std::to_string(s));
        }
        ++stats.pushes;
        est[s * dims + col] += cfg.alpha * rs;
        res[s * dims + col] = 0.0;
        double mass = (1.0 - cfg.alpha) * rs / scale.pow_one_minus_beta(g.degree(s));
        for (NodeId t : g.neighbors(s)) {
            double& rt = res[t * dims + col];
            rt += mass / tables.pow_beta[t];
            ++stats.touched_entries;
            if (!queued[t] && std::fabs(rt) > tables.threshold[t]) {
                queue.push(t);
                queued[t] = 1;
            }
        }
    }
    return stats;
}

}  // namespace

PushStats basic_propagate(const Graph& g, const PropagationConfig& cfg, PropagationState& state,
                          std::size_t col_begin, std::size_t col_end) {
    cfg.validate();
    if (state.node_count() != g.node_count())
        throw std::invalid_argument("basic_propagate: state and graph disagree on node count");
    if (col_end > state.dims() || col_begin > col_end)
        throw std::invalid_argument("basic_propagate: bad column range");
    if (state.poisoned)
        throw std::runtime_error("basic_propagate: state is poisoned");

    auto start = std::chrono::steady_clock::now();
    PushTables tables(g, cfg);
    DegreeScale scale{cfg.beta};
    PushStats stats;
    for (std::size_t col = col_begin; col < col_end; ++col)
        stats += propagate_column(g, cfg, tables, scale, state, col);
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
}

PushStats basic_propagate(const Graph& g, const PropagationConfig& cfg, PropagationState& state,
                          unsigned threads) {
    std::size_t dims = state.dims();
    if (threads <= 1 || dims <= 1)
        return basic_propagate(g, cfg, state, 0, dims);

    cfg.validate();
    if (state.node_count() != g.node_count())
        throw std::invalid_argument("basic_propagate: state and graph disagree on node count");
    if (state.poisoned)
        throw std::runtime_error("basic_propagate: state is poisoned");

    auto start = std::chrono::steady_clock::now();
    PushTables tables(g, cfg);
    DegreeScale scale{cfg.beta};
    unsigned workers = std::min<std::size_t>(threads, dims);
    std::vector<PushStats> partial(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                std::size_t lo = dims * w / workers;
                std::size_t hi = dims * (w + 1) / workers;
                for (std::size_t col = lo; col < hi; ++col)
                    partial[w] += propagate_column(g, cfg, tables, scale, state, col);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);

    PushStats stats;
    for (const auto& p : partial) stats += p;
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
}

}  // namespace ignn
