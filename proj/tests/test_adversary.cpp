#include <cbnt/adversary.hpp>
#include <cbnt/algos.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace cbnt;

namespace {

Intervention with(int n, std::vector<std::pair<int, int>> assign) {
    Intervention I(n);
    for (auto [v, x] : assign) I.set(v, x);
    return I;
}

} // namespace

TEST(Adversary, StructureInvariants) {
    for (int ell = 1; ell <= 4; ++ell)
        for (int s = 1; s <= 4; ++s)
            for (std::optional<std::uint64_t> seed : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{7}}) {
                const auto ap = build_adversary_pair(ell, s, std::vector<int>(s, 1), seed);
                EXPECT_EQ(ap.graph.bidirected().size(), static_cast<std::size_t>(ell - 1));
                EXPECT_EQ(c_components(ap.graph, ap.C()).size(), 1u);
                for (Vertex w : ap.W()) EXPECT_EQ(ap.graph.children(w).size(), 1u);
                EXPECT_EQ(ap.graph.K(), 2);
            }
    EXPECT_THROW(build_adversary_pair(2, 2, {1}), Error);
    EXPECT_THROW(build_adversary_pair(0, 2, {1, 1}), Error);
    EXPECT_THROW(build_adversary_pair(2, 1, {2}), Error);
}

TEST(Adversary, SecretInterventionSeparates) {
    const auto ap = build_adversary_pair(2, 2, {1, 1});
    const auto I = with(4, {{0, 1}, {1, 1}});
    const auto p = exact_interventional(ap.model_m, I), q = exact_interventional(ap.model_n, I);
    EXPECT_EQ(p.probs, (std::vector<double>{0.5, 0.0, 0.0, 0.5}));
    EXPECT_EQ(q.probs, (std::vector<double>{0.0, 0.5, 0.5, 0.0}));
    EXPECT_DOUBLE_EQ(tv_distance(p, q), 1.0);
}

TEST(Adversary, NonSecretInterventionsAgree) {
    const auto ap = build_adversary_pair(2, 2, {1, 1});
    const auto I = with(4, {{0, 0}, {1, 0}});
    const auto p = exact_interventional(ap.model_m, I), q = exact_interventional(ap.model_n, I);
    EXPECT_EQ(p.probs, q.probs);
    for (double x : p.probs) EXPECT_DOUBLE_EQ(x, 0.25);

    const auto clamp = with(4, {{0, 1}, {1, 1}, {2, 0}});
    EXPECT_EQ(exact_interventional(ap.model_m, clamp).probs, exact_interventional(ap.model_n, clamp).probs);
}

TEST(Adversary, VerifyAllSmallPairs) {
    for (int ell = 1; ell <= 3; ++ell)
        for (int s = 1; s <= 3; ++s)
            for (std::uint32_t bits = 0; bits < (1u << s); ++bits) {
                std::vector<int> secret(s);
                for (int i = 0; i < s; ++i) secret[i] = bits >> i & 1;
                const auto r = verify_adversary_pair(build_adversary_pair(ell, s, secret));
                EXPECT_TRUE(r.ok) << "ell=" << ell << " s=" << s << " bits=" << bits;
                EXPECT_DOUBLE_EQ(r.secret_tv, 1.0);
                EXPECT_EQ(r.interventions, static_cast<std::size_t>(std::pow(3, ell + s)));
            }
    const auto tree = verify_adversary_pair(build_adversary_pair(4, 2, {1, 0}, 3));
    EXPECT_TRUE(tree.ok);
}

TEST(Adversary, TamperedCptIsCaught) {
    auto ap = build_adversary_pair(2, 2, {1, 1});
    Cpt c = ap.model_n.cpt(3);
    for (std::size_t r = 0; r < c.rows(2); ++r) std::swap(c.table[2 * r], c.table[2 * r + 1]);
    ap.model_n = ap.model_n.with_cpt(3, c);
    const auto r = verify_adversary_pair(ap);
    EXPECT_FALSE(r.ok);
}

TEST(Adversary, HiddenSecretNotDetectedWithoutItsWitness) {
    const auto ap = build_adversary_pair(2, 2, {1, 1});
    auto cs = build_randomized(ap.graph, 1.0 / 6, 4);
    ASSERT_FALSE(verify_covering(ap.graph, cs));
    const auto C = ap.C();
    std::erase_if(cs.interventions, [&](const Intervention& I) {
        return !I.is_set(C[0]) && !I.is_set(C[1]) && I.value(0) == 1 && I.value(1) == 1;
    });
    AlgoParams p;
    p.eps = 0.5;
    p.allow_partial_cover = true;
    int equal = 0;
    for (int seed = 0; seed < 20; ++seed)
        equal += c2st(SmbnSampler(ap.model_m), SmbnSampler(ap.model_n), ap.graph, p, seed, &cs).decision ==
                 Decision::Equal;
    EXPECT_GE(equal, 19);
}

TEST(HardGraph, Construction) {
    const auto g = build_hard_graph(6, 2, 2, 1);
    const int n = 6, f = 2, blocks = 3;
    EXPECT_EQ(g.n(), n + f + blocks * 2);
    const auto comps = c_components(g);
    for (int i = 0; i < blocks; ++i) {
        VertexSet B{n + f + 2 * i, n + f + 2 * i + 1};
        EXPECT_NE(std::find(comps.begin(), comps.end(), B), comps.end());
        const auto pa = parents(g, B);
        for (int a = n; a < n + f; ++a) EXPECT_TRUE(std::binary_search(pa.begin(), pa.end(), a));
    }
    EXPECT_THROW(build_hard_graph(4, 1, 1, 1), Error);
    EXPECT_NO_THROW(build_hard_graph(5, 1, 2, 1));
}

TEST(HardGraph, ExtraParentDensity) {
    double total = 0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto g = build_hard_graph(100, 2, 2, seed);
        const int first_block = 100 + 2;
        for (int i = 0; i < 50; ++i) {
            const auto pa = parents(g, {first_block + 2 * i, first_block + 2 * i + 1});
            total += std::count_if(pa.begin(), pa.end(), [](Vertex v) { return v < 100; });
            ++count;
        }
    }
    const double mean = total / count;
    EXPECT_GE(mean, 1.0);
    EXPECT_LE(mean, 3.0);
}
