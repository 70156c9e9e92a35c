#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ignn {

using NodeId = std::uint32_t;

struct GraphError : std::runtime_error {
    explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

enum class EventKind { InsertEdge, DeleteEdge };

struct GraphEvent {
    EventKind kind;
    NodeId u;
    NodeId v;
};

// Undirected graph over a fixed node set 0..n-1. Every node permanently
// carries a self-loop; it counts once in the node's degree and is listed
// once in its adjacency. Mutations touch only non-loop edges.
class Graph {
public:
    explicit Graph(std::size_t node_count);

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    std::size_t degree(NodeId s) const { return degree_[s]; }

    std::span<const NodeId> neighbors(NodeId s) const {
        return {adjacency_[s].data(), adjacency_[s].size()};
    }

    bool has_edge(NodeId u, NodeId v) const;

    void insert_edge(NodeId u, NodeId v);
    void delete_edge(NodeId u, NodeId v);
    void apply(const GraphEvent& event);

    // Non-loop edges as (min,max) pairs, sorted. Used by writers and tests.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

private:
    void check_node(NodeId s) const;

    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<std::size_t> degree_;
    std::size_t edge_count_ = 0;
};

// Full-scan structural check: adjacency symmetry, exactly one self-loop per
// node, no duplicate entries, cached degrees consistent with list lengths,
// edge_count consistent with total list length. Throws GraphError.
void validate(const Graph& g);

struct EventLog {
    std::size_t node_count = 0;
    std::vector<GraphEvent> events;
};

}  // namespace ignn
