#include "ignn/instant_update.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace ignn {

namespace {

void check_ready(const Graph& g, const PropagationState& state, const PropagationConfig& cfg) {
    cfg.validate();
    if (state.node_count() != g.node_count())
        throw std::invalid_argument("update: state and graph disagree on node count");
    if (state.poisoned)
        throw std::runtime_error("update: state is poisoned");
}

// Residual repair for one endpoint of one event, one column. `a` is the
// endpoint being fixed, `b` its partner, degrees are post-mutation except
// old_da/old_db. e_a is a's identity surplus captured before any writes of
// this event landed. Returns the count of nonzero adjustments.
std::uint64_t repair_endpoint(const Graph& g, PropagationState& state,
                              const PropagationConfig& cfg, const DegreeScale& scale,
                              NodeId a, NodeId b, std::size_t old_da, double e_a,
                              bool inserted, std::size_t col) {
    std::size_t dims = state.dims();
    double* res = state.residual.data();
    const double* est = state.estimate.data();
    std::uint64_t count = 0;

    auto bump = [&](NodeId w, double delta) {
        if (delta == 0.0) return;
        res[w * dims + col] += delta;
        ++count;
    };

    std::size_t da_new = g.degree(a);
    std::size_t db_new = g.degree(b);

    // Degree rescale of a's whole incoming sum, plus the coupling term for
    // the partner edge itself (gained on insert, lost on delete).
    double delta = e_a * (scale.pow_beta(old_da) - scale.pow_beta(da_new)) / scale.pow_beta(da_new);
    double coupling = (1.0 - cfg.alpha) * est[b * dims + col] /
                      (scale.pow_beta(da_new) * scale.pow_one_minus_beta(db_new));
    delta += inserted ? coupling : -coupling;
    bump(a, delta / cfg.alpha);

    // Every node that was coupled to `a` before the event sees a's sender
    // factor change; hand each its share. On insert the current list minus b
    // is exactly the old neighborhood, on delete it is the current list plus b.
    double shift = (1.0 - cfg.alpha) * est[a * dims + col] / cfg.alpha *
                   (1.0 / scale.pow_one_minus_beta(da_new) -
                    1.0 / scale.pow_one_minus_beta(old_da));
    if (shift != 0.0) {
        for (NodeId w : g.neighbors(a)) {
            if (inserted && w == b) continue;
            bump(w, shift / scale.pow_beta(g.degree(w)));
        }
        if (!inserted)
            bump(b, shift / scale.pow_beta(db_new));
    }
    return count;
}

}  // namespace

UpdateReport apply_event(Graph& g, PropagationState& state, const PropagationConfig& cfg,
                         const GraphEvent& event, unsigned threads) {
    check_ready(g, state, cfg);

    bool inserted = event.kind == EventKind::InsertEdge;
    if (event.u >= g.node_count() || event.v >= g.node_count())
        throw GraphError("event endpoint out of range");
    if (event.u == event.v)
        throw GraphError("self-loop events are not allowed");
    if (inserted && g.has_edge(event.u, event.v))
        throw GraphError("insert of existing edge (" + std::to_string(event.u) + "," +
                         std::to_string(event.v) + ")");
    if (!inserted && !g.has_edge(event.u, event.v))
        throw GraphError("delete of missing edge (" + std::to_string(event.u) + "," +
                         std::to_string(event.v) + ")");

    std::size_t old_du = g.degree(event.u);
    std::size_t old_dv = g.degree(event.v);
    g.apply(event);

    UpdateReport report;
    report.events_applied = 1;
    DegreeScale scale{cfg.beta};
    std::size_t dims = state.dims();
    const double* est = state.estimate.data();
    const double* res = state.residual.data();
    const double* sig = state.signal.data();
    for (std::size_t col = 0; col < dims; ++col) {
        // Both surpluses come from the pre-event state: on delete, repairing
        // u also nudges r(v), which must not leak into v's own repair.
        double e_u = est[event.u * dims + col] + cfg.alpha * res[event.u * dims + col] -
                     cfg.alpha * sig[event.u * dims + col];
        double e_v = est[event.v * dims + col] + cfg.alpha * res[event.v * dims + col] -
                     cfg.alpha * sig[event.v * dims + col];
        report.residual_increments +=
            repair_endpoint(g, state, cfg, scale, event.u, event.v, old_du, e_u, inserted, col);
        report.residual_increments +=
            repair_endpoint(g, state, cfg, scale, event.v, event.u, old_dv, e_v, inserted, col);
    }

    report.push_stats = basic_propagate(g, cfg, state, threads);
    return report;
}

UpdateReport apply_events(Graph& g, PropagationState& state, const PropagationConfig& cfg,
                          std::span<const GraphEvent> events, unsigned threads) {
    UpdateReport total;
    for (std::size_t i = 0; i < events.size(); ++i) {
        try {
            UpdateReport r = apply_event(g, state, cfg, events[i], threads);
            total.events_applied += r.events_applied;
            total.residual_increments += r.residual_increments;
            total.push_stats += r.push_stats;
        } catch (const GraphError& err) {
            throw EventReplayError(i, "event " + std::to_string(i) + ": " + err.what() + " (" +
                                          std::to_string(total.events_applied) +
                                          " events applied)");
        }
    }
    return total;
}

namespace {

struct NetEffect {
    // Per affected node: neighbors gained and lost, old degree.
    struct Delta {
        std::vector<NodeId> added;
        std::vector<NodeId> removed;
        std::size_t old_degree = 0;
    };
    std::map<NodeId, Delta> nodes;
    std::vector<std::pair<NodeId, NodeId>> add_edges;
    std::vector<std::pair<NodeId, NodeId>> remove_edges;
};

// Replays the batch against an edge-set shadow to reject invalid sequences
// before any mutation, then reduces it to its net effect.
NetEffect plan_batch(const Graph& g, std::span<const GraphEvent> events) {
    std::set<std::pair<NodeId, NodeId>> present;
    for (auto [u, v] : g.edges())
        present.insert({u, v});
    const std::set<std::pair<NodeId, NodeId>> initial = present;

    for (std::size_t i = 0; i < events.size(); ++i) {
        const GraphEvent& ev = events[i];
        if (ev.u >= g.node_count() || ev.v >= g.node_count())
            throw EventReplayError(i, "batch event " + std::to_string(i) +
                                          ": endpoint out of range");
        if (ev.u == ev.v)
            throw EventReplayError(i, "batch event " + std::to_string(i) +
                                          ": self-loop events are not allowed");
        std::pair<NodeId, NodeId> key{std::min(ev.u, ev.v), std::max(ev.u, ev.v)};
        if (ev.kind == EventKind::InsertEdge) {
            if (!present.insert(key).second)
                throw EventReplayError(i, "batch event " + std::to_string(i) +
                                              ": insert of existing edge");
        } else {
            if (present.erase(key) == 0)
                throw EventReplayError(i, "batch event " + std::to_string(i) +
                                              ": delete of missing edge");
        }
    }

    NetEffect net;
    auto touch = [&](NodeId u, NodeId v, bool added) {
        auto& d = net.nodes[u];
        (added ? d.added : d.removed).push_back(v);
    };
    for (const auto& e : present) {
        if (initial.count(e)) continue;
        net.add_edges.push_back(e);
        touch(e.first, e.second, true);
        touch(e.second, e.first, true);
    }
    for (const auto& e : initial) {
        if (present.count(e)) continue;
        net.remove_edges.push_back(e);
        touch(e.first, e.second, false);
        touch(e.second, e.first, false);
    }
    for (auto& [node, delta] : net.nodes)
        delta.old_degree = g.degree(node);
    return net;
}

}  // namespace

std::uint64_t apply_batch_increments(Graph& g, PropagationState& state,
                                     const PropagationConfig& cfg,
                                     std::span<const GraphEvent> events) {
    check_ready(g, state, cfg);
    NetEffect net = plan_batch(g, events);

    for (auto [u, v] : net.remove_edges)
        g.delete_edge(u, v);
    for (auto [u, v] : net.add_edges)
        g.insert_edge(u, v);

    DegreeScale scale{cfg.beta};
    std::size_t dims = state.dims();
    double* est = state.estimate.data();
    double* res = state.residual.data();
    const double* sig = state.signal.data();
    std::uint64_t count = 0;

    // Phase 1: rescale each affected estimate so every coupling that reads it
    // stays valid under the new degree, compensating the node's own residual.
    // Must complete for all nodes before phase 2 reads any estimate.
    for (auto& [u, delta] : net.nodes) {
        double old_s = scale.pow_one_minus_beta(delta.old_degree);
        double new_s = scale.pow_one_minus_beta(g.degree(u));
        if (old_s == new_s) continue;
        for (std::size_t col = 0; col < dims; ++col) {
            double& e = est[u * dims + col];
            e *= new_s / old_s;
            double adjust = e * (old_s - new_s) / (cfg.alpha * new_s);
            if (adjust != 0.0) {
                res[u * dims + col] += adjust;
                ++count;
            }
        }
    }

    // Phase 2: per-node identity repair against the final graph.
    for (auto& [u, delta] : net.nodes) {
        std::size_t du_new = g.degree(u);
        double old_b = scale.pow_beta(delta.old_degree);
        double new_b = scale.pow_beta(du_new);
        for (std::size_t col = 0; col < dims; ++col) {
            double e_u = est[u * dims + col] + cfg.alpha * res[u * dims + col] -
                         cfg.alpha * sig[u * dims + col];
            double adjust = e_u * (old_b - new_b) / new_b;
            for (NodeId v : delta.added)
                adjust += (1.0 - cfg.alpha) * est[v * dims + col] /
                          (new_b * scale.pow_one_minus_beta(g.degree(v)));
            for (NodeId v : delta.removed)
                adjust -= (1.0 - cfg.alpha) * est[v * dims + col] /
                          (new_b * scale.pow_one_minus_beta(g.degree(v)));
            adjust /= cfg.alpha;
            if (adjust != 0.0) {
                res[u * dims + col] += adjust;
                ++count;
            }
        }
    }
    return count;
}

UpdateReport batch_update(Graph& g, PropagationState& state, const PropagationConfig& cfg,
                          std::span<const GraphEvent> events, unsigned threads) {
    UpdateReport report;
    report.events_applied = events.size();
    report.residual_increments = apply_batch_increments(g, state, cfg, events);
    if (!events.empty())
        report.push_stats = basic_propagate(g, cfg, state, threads);
    return report;
}

UpdateReport update_attributes(const Graph& g, PropagationState& state,
                               const PropagationConfig& cfg, const Matrix& new_signal,
                               unsigned threads) {
    check_ready(g, state, cfg);
    if (!new_signal.same_shape(state.signal))
        throw std::invalid_argument("update_attributes: new signal shape mismatch");

    UpdateReport report;
    for (std::size_t i = 0; i < new_signal.size(); ++i) {
        double d = new_signal.data()[i] - state.signal.data()[i];
        if (d != 0.0) {
            state.residual.data()[i] += d;
            ++report.residual_increments;
        }
    }
    state.signal = new_signal;
    if (report.residual_increments > 0)
        report.push_stats = basic_propagate(g, cfg, state, threads);
    return report;
}

}  // namespace ignn
