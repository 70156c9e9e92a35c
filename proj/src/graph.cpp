#include "ignn/graph.hpp"

#include <algorithm>

namespace ignn {

Graph::Graph(std::size_t node_count)
    : adjacency_(node_count), degree_(node_count, 1) {
    for (NodeId s = 0; s < node_count; ++s)
        adjacency_[s].push_back(s);
}

void Graph::check_node(NodeId s) const {
    if (s >= adjacency_.size())
        throw GraphError("node id " + std::to_string(s) + " out of range (n=" +
                         std::to_string(adjacency_.size()) + ")");
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    const auto& list = adjacency_[u];
    return std::find(list.begin(), list.end(), v) != list.end();
}

void Graph::insert_edge(NodeId u, NodeId v) {
    check_node(u);
    check_node(v);
    if (u == v)
        throw GraphError("self-loop edges are fixed and cannot be inserted");
    if (has_edge(u, v))
        throw GraphError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
    ++degree_[u];
    ++degree_[v];
    ++edge_count_;
}

void Graph::delete_edge(NodeId u, NodeId v) {
    check_node(u);
    check_node(v);
    if (u == v)
        throw GraphError("self-loop edges are fixed and cannot be deleted");
    auto remove_from = [](std::vector<NodeId>& list, NodeId x) {
        auto it = std::find(list.begin(), list.end(), x);
        if (it == list.end()) return false;
        *it = list.back();
        list.pop_back();
        return true;
    };
    if (!remove_from(adjacency_[u], v))
        throw GraphError("missing edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    remove_from(adjacency_[v], u);
    --degree_[u];
    --degree_[v];
    --edge_count_;
}

void Graph::apply(const GraphEvent& event) {
    if (event.kind == EventKind::InsertEdge)
        insert_edge(event.u, event.v);
    else
        delete_edge(event.u, event.v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId s = 0; s < adjacency_.size(); ++s)
        for (NodeId t : adjacency_[s])
            if (s < t)
                out.emplace_back(s, t);
    std::sort(out.begin(), out.end());
    return out;
}

void validate(const Graph& g) {
    std::size_t total_entries = 0;
    for (NodeId s = 0; s < g.node_count(); ++s) {
        auto list = g.neighbors(s);
        total_entries += list.size();
        if (g.degree(s) != list.size())
            throw GraphError("cached degree of node " + std::to_string(s) +
                             " disagrees with adjacency length");
        std::size_t loops = 0;
        std::vector<NodeId> sorted(list.begin(), list.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i > 0 && sorted[i] == sorted[i - 1])
                throw GraphError("duplicate adjacency entry at node " + std::to_string(s));
            if (sorted[i] >= g.node_count())
                throw GraphError("adjacency entry out of range at node " + std::to_string(s));
            if (sorted[i] == s) ++loops;
        }
        if (loops != 1)
            throw GraphError("node " + std::to_string(s) + " must carry exactly one self-loop");
        for (NodeId t : list)
            if (t != s && !g.has_edge(t, s))
                throw GraphError("asymmetric edge (" + std::to_string(s) + "," +
                                 std::to_string(t) + ")");
    }
    if (total_entries != g.node_count() + 2 * g.edge_count())
        throw GraphError("edge_count disagrees with adjacency totals");
}

}  // namespace ignn
