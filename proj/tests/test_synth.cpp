#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "ignn/graph.hpp"
#include "ignn/instant_update.hpp"
#include "ignn/oracle.hpp"
#include "ignn/propagation.hpp"
#include "ignn/synth.hpp"

using namespace ignn;

TEST_CASE("rng draws are deterministic and in range") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t idx = a.uniform_index(17);
        CHECK(idx == b.uniform_index(17));
        CHECK(idx < 17);
        double r = a.uniform_real();
        CHECK(r == b.uniform_real());
        CHECK(r >= 0.0);
        CHECK(r < 1.0);
    }
    Rng c(43);
    bool diverged = false;
    for (int i = 0; i < 10 && !diverged; ++i)
        diverged = a.next() != c.next();
    CHECK(diverged);
}

TEST_CASE("generator configuration is validated") {
    SbmConfig good{100, 4, 5.0, 1.0, 2, 1};
    CHECK_NOTHROW(good.validate());

    SbmConfig bad = good;
    bad.nodes = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.blocks = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.blocks = 101;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.intra_degree = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.intra_degree = 25.0; // block size is 25
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.blocks = 1;
    bad.inter_degree = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.migrants_per_step = 101;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = good;
    bad.blocks = 1;
    bad.inter_degree = 0.0;
    bad.migrants_per_step = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("same seed reproduces the graph, different seed does not") {
    SbmConfig cfg{200, 4, 6.0, 1.0, 0, 7};
    SbmGraph a = sbm_init(cfg);
    SbmGraph b = sbm_init(cfg);
    CHECK(a.graph.edges() == b.graph.edges());
    CHECK(a.labels.block == b.labels.block);

    cfg.seed = 8;
    SbmGraph c = sbm_init(cfg);
    CHECK(a.graph.edges() != c.graph.edges());
}

TEST_CASE("labels split nodes into near-equal blocks") {
    SbmConfig cfg{103, 4, 3.0, 0.5, 0, 1};
    SbmGraph sbm = sbm_init(cfg);
    REQUIRE(sbm.labels.block.size() == 103);
    std::vector<std::size_t> sizes(4, 0);
    for (NodeId s = 0; s < 103; ++s) {
        CHECK(sbm.labels.block[s] < 4);
        ++sizes[sbm.labels.block[s]];
    }
    // Base block size 25, remainder of 3 joins the last block.
    const std::vector<std::size_t> want{25, 25, 25, 28};
    CHECK(sizes == want);
    CHECK_NOTHROW(validate(sbm.graph));
}

TEST_CASE("zero cross-block rate yields pure blocks") {
    SbmConfig cfg{120, 3, 5.0, 0.0, 0, 11};
    SbmGraph sbm = sbm_init(cfg);
    for (auto [u, v] : sbm.graph.edges())
        CHECK(sbm.labels.block[u] == sbm.labels.block[v]);
}

TEST_CASE("expected degrees land near the configured targets") {
    SbmConfig cfg{1000, 5, 20.0, 1.0, 0, 3};
    SbmGraph sbm = sbm_init(cfg);
    double intra_total = 0.0;
    double inter_total = 0.0;
    for (auto [u, v] : sbm.graph.edges()) {
        if (sbm.labels.block[u] == sbm.labels.block[v])
            intra_total += 2.0;
        else
            inter_total += 2.0;
    }
    double mean_intra = intra_total / 1000.0;
    double mean_inter = inter_total / 1000.0;
    CHECK(mean_intra == doctest::Approx(20.0).epsilon(0.15));
    CHECK(mean_inter == doctest::Approx(1.0).epsilon(0.35));
}

TEST_CASE("migration rewires migrants into their new block") {
    SbmConfig cfg{150, 3, 6.0, 1.0, 10, 21};
    SbmGraph sbm = sbm_init(cfg);
    Graph g = sbm.graph;
    CommunityLabels labels = sbm.labels;
    CommunityLabels before = labels;
    Rng rng = sbm.rng;

    std::vector<GraphEvent> events = sbm_migrate(g, labels, cfg, rng);
    CHECK_NOTHROW(validate(g));
    CHECK_FALSE(events.empty());

    std::set<NodeId> migrants;
    for (NodeId s = 0; s < 150; ++s)
        if (labels.block[s] != before.block[s])
            migrants.insert(s);
    CHECK(migrants.size() == 10);

    for (NodeId s : migrants) {
        std::size_t into_new = 0;
        for (NodeId w : g.neighbors(s)) {
            if (w == s) continue;
            // No surviving stragglers in the block the migrant left, unless
            // that neighbor migrated along to the same place.
            if (before.block[s] == labels.block[w])
                CHECK(migrants.count(w) == 1);
            if (labels.block[w] == labels.block[s]) ++into_new;
        }
        CHECK(into_new >= 1);
    }
}

TEST_CASE("migration events replay cleanly on a copy of the graph") {
    SbmConfig cfg{80, 4, 4.0, 0.5, 6, 31};
    SbmGraph sbm = sbm_init(cfg);
    Graph replay = sbm.graph;
    Graph mutated = sbm.graph;
    CommunityLabels labels = sbm.labels;
    Rng rng = sbm.rng;

    std::vector<GraphEvent> events = sbm_migrate(mutated, labels, cfg, rng);
    for (const GraphEvent& e : events)
        CHECK_NOTHROW(replay.apply(e));
    CHECK(replay.edges() == mutated.edges());
}

TEST_CASE("migration stream keeps a propagation state inside its budgets") {
    SbmConfig cfg{60, 3, 4.0, 0.5, 4, 97};
    SbmGraph sbm = sbm_init(cfg);
    Graph g = sbm.graph;
    CommunityLabels labels = sbm.labels;
    Rng rng = sbm.rng;

    Matrix signal = sparse_random_signal(60, 2, 0.2, rng);
    PropagationConfig pcfg{0.2, 0.5, 1e-6};
    PropagationState state = new_state(g, signal);
    basic_propagate(g, pcfg, state);

    for (int step = 0; step < 3; ++step) {
        Graph stream_graph = g; // events replay onto the propagation copy
        std::vector<GraphEvent> events = sbm_migrate(stream_graph, labels, cfg, rng);
        apply_events(g, state, pcfg, events);
        CHECK(g.edges() == stream_graph.edges());
        double tau = 1e-9 * (1.0 + testutil::signal_peak(state));
        CHECK(testutil::worst_invariant_defect(g, pcfg, state) <= tau);
        CHECK(testutil::worst_bound_violation(g, pcfg, state) <= 1e-12);
    }
}

TEST_CASE("sparse signals respect shape, density, and range") {
    Rng rng(5);
    Matrix m = sparse_random_signal(400, 5, 0.1, rng);
    CHECK(m.rows() == 400);
    CHECK(m.cols() == 5);
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(m.data()[i] >= 0.0);
        CHECK(m.data()[i] < 1.0);
        if (m.data()[i] != 0.0) ++nonzero;
    }
    double rate = static_cast<double>(nonzero) / static_cast<double>(m.size());
    CHECK(rate > 0.05);
    CHECK(rate < 0.15);

    CHECK_THROWS_AS(sparse_random_signal(10, 2, 1.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(sparse_random_signal(10, 2, -0.1, rng), std::invalid_argument);
}
