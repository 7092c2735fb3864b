#include <cbnt/graph.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace cbnt;

namespace {

Smcg make(int n, std::vector<DirectedEdge> d, std::vector<std::pair<Vertex, Vertex>> b = {}) {
    return Smcg(n, Alphabet{2}, std::move(d), std::move(b));
}

ErrorCode code_of(const Smcg& g) {
    auto err = validate(g);
    return err ? err->code() : ErrorCode::ParseError;
}

} // namespace

TEST(Validate, EmptyGraphIsValid) { EXPECT_FALSE(validate(make(0, {}))); }

TEST(Validate, ReportsStructuralErrors) {
    EXPECT_EQ(code_of(make(2, {{0, 1}, {1, 0}})), ErrorCode::CycleDetected);
    EXPECT_EQ(code_of(make(2, {{1, 1}})), ErrorCode::SelfLoop);
    EXPECT_EQ(code_of(make(2, {{0, 1}, {0, 1}})), ErrorCode::DuplicateEdge);
    EXPECT_EQ(code_of(make(2, {}, {{1, 1}})), ErrorCode::SelfLoop);
    EXPECT_EQ(code_of(Smcg(1, Alphabet{1}, {}, {})), ErrorCode::InvalidAlphabet);
    EXPECT_FALSE(validate(make(3, {{0, 1}}, {{1, 2}})));
}

TEST(Validate, OutOfRangeVertexThrows) {
    try {
        make(2, {{0, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::VertexOutOfRange);
    }
}

TEST(Smcg, BidirectedPairsAreCollapsed) {
    const auto g = make(3, {}, {{2, 1}, {1, 2}, {0, 1}});
    ASSERT_EQ(g.bidirected().size(), 2u);
    EXPECT_EQ(g.bidirected()[0], (BidirectedEdge{0, 1}));
    EXPECT_EQ(g.bidirected()[1], (BidirectedEdge{1, 2}));
    EXPECT_TRUE(g.has_bidirected(2, 1));
    EXPECT_EQ(g.hidden_edges(1), (std::vector<int>{0, 1}));
}

TEST(TopologicalOrder, Examples) {
    EXPECT_EQ(topological_order(chain_graph(3, {2})), (std::vector<Vertex>{0, 1, 2}));
    EXPECT_EQ(topological_order(make(3, {})), (std::vector<Vertex>{0, 1, 2}));
    EXPECT_EQ(topological_order(make(3, {{0, 2}, {1, 2}})), (std::vector<Vertex>{0, 1, 2}));
    EXPECT_EQ(topological_order(make(3, {{2, 0}, {1, 0}})), (std::vector<Vertex>{1, 2, 0}));
}

TEST(CComponents, Examples) {
    const auto g = make(4, {}, {{1, 2}});
    EXPECT_EQ(c_components(g, all_vertices(4)), (std::vector<VertexSet>{{0}, {1, 2}, {3}}));
    EXPECT_EQ(c_components(chain_graph(3, {2})), (std::vector<VertexSet>{{0}, {1}, {2}}));
    const auto h = make(3, {}, {{0, 1}, {1, 2}});
    EXPECT_EQ(c_components(h, {0, 2}), (std::vector<VertexSet>{{0}, {2}}));
}

TEST(Relatives, ChainAndExclusion) {
    const auto g = chain_graph(3, {2});
    EXPECT_EQ(parents(g, {1}), VertexSet{0});
    EXPECT_EQ(ancestors(g, {1}), VertexSet{0});
    EXPECT_EQ(descendants(g, {1}), VertexSet{2});
    EXPECT_TRUE(parents(g, {0, 1}).empty());
    const auto e = make(3, {});
    EXPECT_TRUE(parents(e, {0}).empty());
    EXPECT_TRUE(ancestors(e, {0}).empty());
    EXPECT_TRUE(descendants(e, {0}).empty());
}

TEST(DSeparation, Examples) {
    EXPECT_TRUE(d_separated(chain_graph(3, {2}), {0}, {2}, {1}));
    const auto collider = make(3, {{0, 1}, {2, 1}});
    EXPECT_TRUE(d_separated(collider, {0}, {2}, {}));
    EXPECT_FALSE(d_separated(collider, {0}, {2}, {1}));
    EXPECT_FALSE(d_separated(make(3, {}, {{0, 2}}), {0}, {2}, {}));
    EXPECT_THROW(d_separated(collider, {0}, {0}, {}), Error);
}

TEST(DSeparation, MatchesPathEnumerationOracle) {
    auto eng = rng::engine(11);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng::uniform_below(eng, 5));
        const auto g = random_graph(n, 2, 3, {2}, eng);
        // Random disjoint X, Y, Z.
        std::vector<int> role(n);
        for (int& r : role) r = static_cast<int>(rng::uniform_below(eng, 4));
        VertexSet X, Y, Z;
        for (int v = 0; v < n; ++v) {
            if (role[v] == 0) X.push_back(v);
            if (role[v] == 1) Y.push_back(v);
            if (role[v] == 2) Z.push_back(v);
        }
        if (X.empty() || Y.empty()) continue;
        const bool fast = d_separated(g, X, Y, Z);
        ASSERT_EQ(fast, oracle::naive_d_separated(g, X, Y, Z)) << "trial " << trial;
        ASSERT_EQ(fast, d_separated(g, Y, X, Z));
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(Projection, HandBuiltCases) {
    // U -> A, U -> B
    GeneralCausalGraph fork{{0, 1}, {9}, {{9, 0}, {9, 1}}, {2}};
    auto g = project_to_smcg(fork);
    EXPECT_TRUE(g.directed().empty());
    ASSERT_EQ(g.bidirected().size(), 1u);
    EXPECT_TRUE(g.has_bidirected(0, 1));

    // A -> U -> B
    GeneralCausalGraph chain{{0, 1}, {5}, {{0, 5}, {5, 1}}, {2}};
    g = project_to_smcg(chain);
    EXPECT_TRUE(g.has_directed(0, 1));
    EXPECT_TRUE(g.bidirected().empty());

    GeneralCausalGraph plain{{0, 1, 2}, {}, {{0, 1}, {1, 2}}, {2}};
    EXPECT_EQ(project_to_smcg(plain), chain_graph(3, {2}));
}

TEST(Projection, RoundTripOnSemiMarkovianGraphs) {
    auto eng = rng::engine(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_graph(1 + static_cast<int>(rng::uniform_below(eng, 7)), 2, 3, {2}, eng);
        const auto h = expand_hidden_forks(g);
        const auto p = project_to_smcg(h);
        EXPECT_EQ(p.bidirected(), g.bidirected());
        for (int v = 0; v < g.n(); ++v) EXPECT_EQ(p.parents(v), g.parents(v));
        EXPECT_EQ(c_components(h), c_components(g));
    }
}

TEST(ClassParams, Examples) {
    EXPECT_EQ(class_params(make(5, {})), (GraphClassParams{0, 1}));
    EXPECT_EQ(class_params(make(3, {{0, 1}, {1, 2}}, {{1, 2}})), (GraphClassParams{1, 2}));
    EXPECT_EQ(class_params(star_graph(4, {2})), (GraphClassParams{3, 1}));
    EXPECT_EQ(max_total_degree(star_graph(4, {2})), 3);
}

TEST(RandomGraph, StaysInsideClassAndPartitions) {
    auto eng = rng::engine(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng::uniform_below(eng, 10));
        const int d = static_cast<int>(rng::uniform_below(eng, 4));
        const int l = 1 + static_cast<int>(rng::uniform_below(eng, 3));
        const auto g = random_graph(n, d, l, {3}, eng);
        ASSERT_FALSE(validate(g));
        const auto p = class_params(g);
        EXPECT_LE(p.d, d);
        EXPECT_LE(p.l, l);
        const auto order = topological_order(g);
        std::vector<int> pos(n);
        for (int k = 0; k < n; ++k) pos[order[k]] = k;
        for (const auto& e : g.directed()) EXPECT_LT(pos[e.from], pos[e.to]);

        const auto blocks = c_components(g);
        VertexSet all;
        for (const auto& b : blocks) {
            EXPECT_FALSE(b.empty());
            all.insert(all.end(), b.begin(), b.end());
        }
        std::sort(all.begin(), all.end());
        EXPECT_EQ(all, all_vertices(n));

        // Restriction refines the full partition.
        VertexSet sub;
        for (int v = 0; v < n; ++v)
            if (rng::uniform_below(eng, 2)) sub.push_back(v);
        for (const auto& b : c_components(g, sub)) {
            int owner = -1;
            for (std::size_t k = 0; k < blocks.size(); ++k)
                if (std::binary_search(blocks[k].begin(), blocks[k].end(), b[0])) owner = static_cast<int>(k);
            EXPECT_TRUE(is_subset(b, blocks[owner]));
        }
    }
}
