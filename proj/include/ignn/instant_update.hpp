#pragma once

#include <cstdint>
#include <span>

#include "ignn/graph.hpp"
#include "ignn/propagation.hpp"

namespace ignn {

struct UpdateReport {
    std::size_t events_applied = 0;
    std::uint64_t residual_increments = 0; // nonzero residual adjustments written
    PushStats push_stats;
};

struct EventReplayError : GraphError {
    EventReplayError(std::size_t index, const std::string& what)
        : GraphError(what), index(index) {}
    std::size_t index; // offending event; events before it remain applied
};

// Applies one edge event: mutates the graph, repairs the balance identity
// with residual adjustments at the endpoints and their old neighbors, then
// pushes back under tolerance. Invalid events leave graph and state untouched.
UpdateReport apply_event(Graph& g, PropagationState& state, const PropagationConfig& cfg,
                         const GraphEvent& event, unsigned threads = 1);

// Folds apply_event over a sequence. The first invalid event aborts with
// EventReplayError; everything before it stays applied.
UpdateReport apply_events(Graph& g, PropagationState& state, const PropagationConfig& cfg,
                          std::span<const GraphEvent> events, unsigned threads = 1);

// Net-effect residual adjustments for a whole batch, without the push-back.
// The batch is validated as a sequential replay before anything mutates;
// the graph then jumps straight to the final shape. Phase 1 rescales the
// estimates of every degree-changed node, phase 2 repairs the identity,
// and callers (or batch_update) finish with basic_propagate.
std::uint64_t apply_batch_increments(Graph& g, PropagationState& state,
                                     const PropagationConfig& cfg,
                                     std::span<const GraphEvent> events);

// apply_batch_increments + push-back. One amortized pass for many events.
UpdateReport batch_update(Graph& g, PropagationState& state, const PropagationConfig& cfg,
                          std::span<const GraphEvent> events, unsigned threads = 1);

// Replaces the signal matrix in place: residuals absorb the difference,
// the graph is untouched, then pushes back under tolerance.
UpdateReport update_attributes(const Graph& g, PropagationState& state,
                               const PropagationConfig& cfg, const Matrix& new_signal,
                               unsigned threads = 1);

}  // namespace ignn
