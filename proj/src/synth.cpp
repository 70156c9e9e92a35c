#include "ignn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ignn {

namespace {

std::size_t block_of(std::size_t node, std::size_t nodes, std::size_t blocks) {
    std::size_t base = nodes / blocks;
    return std::min(node / base, blocks - 1);
}

std::vector<std::vector<NodeId>> block_members(const CommunityLabels& labels,
                                               std::size_t blocks) {
    std::vector<std::vector<NodeId>> members(blocks);
    for (NodeId s = 0; s < labels.block.size(); ++s)
        members[labels.block[s]].push_back(s);
    return members;
}

// floor(target) draws plus one more with the fractional probability.
std::size_t draw_count(double target, Rng& rng) {
    double whole = std::floor(target);
    std::size_t count = static_cast<std::size_t>(whole);
    if (rng.bernoulli(target - whole)) ++count;
    return count;
}

}  // namespace

void SbmConfig::validate() const {
    if (nodes == 0)
        throw std::invalid_argument("sbm: need at least one node");
    if (blocks == 0 || blocks > nodes)
        throw std::invalid_argument("sbm: blocks must lie in [1, nodes]");
    if (intra_degree < 0.0 || inter_degree < 0.0)
        throw std::invalid_argument("sbm: expected degrees must be non-negative");
    if (inter_degree > 0.0 && blocks < 2)
        throw std::invalid_argument("sbm: cross-block edges need at least two blocks");
    std::size_t min_block = nodes / blocks; // remainder only ever grows the last block
    if (intra_degree >= static_cast<double>(min_block))
        throw std::invalid_argument("sbm: intra_degree " + std::to_string(intra_degree) +
                                    " infeasible for block size " + std::to_string(min_block));
    if (migrants_per_step > nodes)
        throw std::invalid_argument("sbm: migrants_per_step exceeds node count");
    if (migrants_per_step > 0 && blocks < 2)
        throw std::invalid_argument("sbm: migration needs at least two blocks");
}

SbmGraph sbm_init(const SbmConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    CommunityLabels labels;
    labels.block.resize(cfg.nodes);
    for (NodeId s = 0; s < cfg.nodes; ++s)
        labels.block[s] = static_cast<std::uint32_t>(block_of(s, cfg.nodes, cfg.blocks));
    auto members = block_members(labels, cfg.blocks);

    Graph g(cfg.nodes);
    // Each endpoint contributes half the expected degree; the other half
    // arrives through partners drawing it.
    for (NodeId s = 0; s < cfg.nodes; ++s) {
        const auto& own = members[labels.block[s]];
        std::size_t intra = draw_count(cfg.intra_degree / 2.0, rng);
        std::size_t attempts = 16 * intra + 32;
        while (intra > 0 && attempts-- > 0) {
            NodeId w = own[rng.uniform_index(own.size())];
            if (w == s || g.has_edge(s, w)) continue;
            g.insert_edge(s, w);
            --intra;
        }

        std::size_t inter = draw_count(cfg.inter_degree / 2.0, rng);
        attempts = 16 * inter + 32;
        while (inter > 0 && attempts-- > 0) {
            NodeId w = static_cast<NodeId>(rng.uniform_index(cfg.nodes));
            if (labels.block[w] == labels.block[s] || g.has_edge(s, w)) continue;
            g.insert_edge(s, w);
            --inter;
        }
    }
    return SbmGraph{std::move(g), std::move(labels), rng};
}

std::vector<GraphEvent> sbm_migrate(Graph& g, CommunityLabels& labels, const SbmConfig& cfg,
                                    Rng& rng) {
    cfg.validate();
    if (labels.block.size() != g.node_count())
        throw std::invalid_argument("sbm_migrate: labels and graph disagree on node count");

    auto members = block_members(labels, cfg.blocks);
    std::vector<GraphEvent> events;

    // Partial Fisher-Yates picks the migrants without replacement.
    std::vector<NodeId> order(g.node_count());
    for (NodeId s = 0; s < order.size(); ++s) order[s] = s;
    for (std::size_t i = 0; i < cfg.migrants_per_step; ++i) {
        std::size_t j = i + rng.uniform_index(order.size() - i);
        std::swap(order[i], order[j]);
    }

    for (std::size_t i = 0; i < cfg.migrants_per_step; ++i) {
        NodeId s = order[i];
        std::uint32_t old_block = labels.block[s];
        std::uint64_t pick = rng.uniform_index(cfg.blocks - 1);
        std::uint32_t new_block =
            static_cast<std::uint32_t>(pick >= old_block ? pick + 1 : pick);

        std::vector<NodeId> cut;
        for (NodeId w : g.neighbors(s))
            if (w != s && labels.block[w] == old_block)
                cut.push_back(w);
        for (NodeId w : cut) {
            g.delete_edge(s, w);
            events.push_back({EventKind::DeleteEdge, s, w});
        }

        labels.block[s] = new_block;
        auto& old_members = members[old_block];
        old_members.erase(std::find(old_members.begin(), old_members.end(), s));
        members[new_block].push_back(s);

        const auto& target = members[new_block];
        std::size_t wanted = draw_count(cfg.intra_degree, rng);
        std::size_t attempts = 16 * wanted + 32;
        while (wanted > 0 && attempts-- > 0) {
            NodeId w = target[rng.uniform_index(target.size())];
            if (w == s || g.has_edge(s, w)) continue;
            g.insert_edge(s, w);
            events.push_back({EventKind::InsertEdge, s, w});
            --wanted;
        }
    }
    return events;
}

Matrix sparse_random_signal(std::size_t n, std::size_t d, double density, Rng& rng) {
    if (density < 0.0 || density > 1.0)
        throw std::invalid_argument("sparse_random_signal: density must lie in [0,1]");
    Matrix m(n, d, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (rng.bernoulli(density))
            m.data()[i] = rng.uniform_real();
    return m;
}

}  // namespace ignn
