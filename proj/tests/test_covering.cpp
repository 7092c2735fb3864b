#include <cbnt/covering.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace cbnt;

namespace {

// Brute-force verifier: scans every requirement against every intervention.
bool naive_covering(const Smcg& g, const CoveringSet& cs) {
    for (const auto& comp : c_components(g)) {
        for (std::uint32_t mask = 1; mask < (1u << comp.size()); ++mask) {
            VertexSet S;
            for (std::size_t k = 0; k < comp.size(); ++k)
                if (mask >> k & 1) S.push_back(comp[k]);
            VertexSet pa;
            for (Vertex v : S)
                for (Vertex p : g.parents(v))
                    if (!std::binary_search(S.begin(), S.end(), p)) pa.push_back(p);
            pa = make_set(pa);
            std::uint64_t count = 1;
            for (std::size_t k = 0; k < pa.size(); ++k) count *= g.K();
            for (std::uint64_t idx = 0; idx < count; ++idx) {
                std::vector<int> values(pa.size());
                auto rest = idx;
                for (std::size_t k = pa.size(); k-- > 0;) {
                    values[k] = static_cast<int>(rest % g.K());
                    rest /= g.K();
                }
                bool hit = false;
                for (const auto& I : cs.interventions) {
                    bool ok = true;
                    for (Vertex v : S) ok = ok && !I.is_set(v);
                    for (std::size_t k = 0; k < pa.size(); ++k) ok = ok && I.value(pa[k]) == values[k];
                    if (ok) {
                        hit = true;
                        break;
                    }
                }
                if (!hit) return false;
            }
        }
    }
    return true;
}

} // namespace

TEST(Covering, RandomizedSizeFormula) {
    EXPECT_EQ(randomized_size(4, 2, 1, 1, 1.0 / 3), 24u);
    const double t = 16 * 36 * (std::log(6.0) + 8 * std::log(2.0) + std::log(100.0));
    EXPECT_EQ(randomized_size(6, 2, 2, 1, 0.01), static_cast<std::uint64_t>(std::ceil(2 * 2 * 6 * (std::log(6.0) + 4 * std::log(2.0) + std::log(100.0)))));
    EXPECT_EQ(randomized_size(6, 2, 2, 2, 0.01), static_cast<std::uint64_t>(std::ceil(t)));

    Smcg g(4, Alphabet{2}, {{0, 1}, {2, 3}}, {});
    const auto cs = build_randomized(g, 1.0 / 3, 5);
    EXPECT_EQ(cs.size(), 24u);
    for (const auto& I : cs.interventions) {
        EXPECT_EQ(I.n(), 4);
        for (int v = 0; v < 4; ++v) EXPECT_TRUE(!I.is_set(v) || (I.value(v) >= 0 && I.value(v) < 2));
    }
    EXPECT_EQ(cs.interventions, build_randomized(g, 1.0 / 3, 5).interventions);
    EXPECT_NE(cs.interventions, build_randomized(g, 1.0 / 3, 6).interventions);
}

TEST(Covering, DegenerateParams) {
    try {
        build_randomized(Smcg(0, Alphabet{2}, {}, {}), 0.1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateParams);
    }
    EXPECT_THROW(build_randomized(3, 2, 1, 1, 1.5, 1), Error);
}

TEST(Covering, VerifyExamples) {
    Smcg single(1, Alphabet{2}, {}, {});
    CoveringSet cs;
    cs.interventions = {Intervention(1)};
    EXPECT_FALSE(verify_covering(single, cs));

    Smcg chain(2, Alphabet{2}, {{0, 1}}, {});
    CoveringSet partial;
    Intervention do0(2);
    do0.set(0, 0);
    partial.interventions = {Intervention(2), do0};
    const auto missing = verify_covering(chain, partial);
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->S, VertexSet{1});
    EXPECT_EQ(missing->pa, std::vector<int>{1});

    Intervention do1 = do0;
    do1.set(0, 1);
    partial.interventions.push_back(do1);
    EXPECT_FALSE(verify_covering(chain, partial));
}

TEST(Covering, GuardAndMonotonicity) {
    auto eng = rng::engine(1);
    const auto g = random_graph(6, 2, 2, {2}, eng);
    auto cs = build_randomized(g, 0.05, 3);
    EXPECT_THROW(verify_covering(g, cs, {2}), Error);
    if (!verify_covering(g, cs)) {
        auto more = cs;
        more.interventions.push_back(Intervention(6));
        Intervention all(6);
        for (int v = 0; v < 6; ++v) all.set(v, 1);
        more.interventions.push_back(all);
        EXPECT_FALSE(verify_covering(g, more));
    }
}

TEST(Covering, VerifierMatchesBruteForce) {
    auto eng = rng::engine(2);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng::uniform_below(eng, 6));
        const auto g = random_graph(n, 2, 2, {2}, eng);
        // Deliberately small families so both outcomes occur.
        auto cs = build_randomized(g, 0.5, trial);
        cs.interventions.resize(std::min<std::size_t>(cs.size(), 1 + rng::uniform_below(eng, 40)));
        EXPECT_EQ(!verify_covering(g, cs), naive_covering(g, cs));
    }
}

TEST(Covering, RandomizedSucceedsAtDeltaOnePercent) {
    auto eng = rng::engine(100);
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng::uniform_below(eng, 8));
        const auto g = random_graph(n, 2, 2, {2}, eng);
        ok += !verify_covering(g, build_randomized(g, 0.01, rng::derive(9, trial)));
    }
    EXPECT_GE(ok, 99);
}

TEST(Covering, ResampledEdgelessAndSmallGraph) {
    Smcg edgeless(3, Alphabet{2}, {}, {});
    std::size_t rounds = 99;
    auto cs = build_resampled(edgeless, 1, {1'000'000, &rounds});
    EXPECT_EQ(cs.size(), resampled_size(2, 1, 1));
    EXPECT_FALSE(verify_covering(edgeless, cs));
    EXPECT_LT(rounds, 99u);

    Smcg small(4, Alphabet{2}, {{0, 1}, {1, 2}, {2, 3}}, {{1, 2}});
    cs = build_resampled(small, 7, {1'000'000, &rounds});
    EXPECT_FALSE(verify_covering(small, cs));
    EXPECT_TRUE(naive_covering(small, cs));
    EXPECT_EQ(cs.construction, Construction::Resampled);
}

TEST(Covering, ResampledAlwaysCoversRandomGraphs) {
    auto eng = rng::engine(55);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_graph(1 + static_cast<int>(rng::uniform_below(eng, 6)), 1, 2, {2}, eng);
        const auto cs = build_resampled(g, trial);
        EXPECT_FALSE(verify_covering(g, cs));
    }
}

TEST(Covering, ResamplingRepairsSmallFamilies) {
    Smcg chain(3, Alphabet{2}, {{0, 1}, {1, 2}}, {});
    // Five requirements need at least three interventions; one can never do.
    try {
        build_resampled(chain, 3, {1000, nullptr, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IterationBudgetExceeded);
    }
    std::size_t total_rounds = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::size_t rounds = 0;
        const auto cs = build_resampled(chain, seed, {1'000'000, &rounds, 6});
        EXPECT_EQ(cs.size(), 6u);
        EXPECT_FALSE(verify_covering(chain, cs));
        total_rounds += rounds;
    }
    EXPECT_GT(total_rounds, 0u);
}

TEST(Covering, RequirementCount) {
    Smcg chain(2, Alphabet{2}, {{0, 1}}, {});
    EXPECT_EQ(requirement_count(chain), 3u);
    Smcg pair(3, Alphabet{2}, {{0, 1}}, {{1, 2}});
    // {0}:1, {1}:2, {2}:1, {1,2}:2
    EXPECT_EQ(requirement_count(pair), 6u);
}
