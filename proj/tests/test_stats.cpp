#include <cbnt/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace cbnt;

namespace {

DiscreteDist bin(std::vector<double> p) {
    const int k = p.size() == 2 ? 1 : 2;
    std::vector<Vertex> support(k);
    for (int i = 0; i < k; ++i) support[i] = i;
    return DiscreteDist(support, 2, std::move(p));
}

std::vector<int> draw(rng::Engine& eng, const std::vector<double>& p, std::size_t m) {
    std::vector<int> out(m);
    for (auto& x : out) x = rng::categorical(eng, p);
    return out;
}

} // namespace

TEST(Distances, HandValues) {
    EXPECT_DOUBLE_EQ(tv_distance(bin({0.5, 0.5}), bin({0.5, 0.5})), 0.0);
    EXPECT_DOUBLE_EQ(tv_distance(bin({1, 0}), bin({0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(tv_distance(bin({0.5, 0.5}), bin({0.75, 0.25})), 0.25);
    EXPECT_DOUBLE_EQ(squared_hellinger(bin({0.3, 0.7}), bin({0.3, 0.7})), 0.0);
    EXPECT_DOUBLE_EQ(squared_hellinger(bin({1, 0}), bin({0, 1})), 1.0);
    EXPECT_NEAR(squared_hellinger(bin({0.5, 0.5}), bin({1, 0})), 1.0 - std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(squared_hellinger(bin({0.5, 0.5}), bin({1, 0})), 0.292893, 1e-6);
}

TEST(Distances, SupportMismatch) {
    try {
        tv_distance(bin({0.5, 0.5}), bin({0.25, 0.25, 0.25, 0.25}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SupportMismatch);
    }
    EXPECT_THROW(squared_hellinger(DiscreteDist({0}, 2, {1, 0}), DiscreteDist({1}, 2, {1, 0})), Error);
}

TEST(Distances, SandwichAndSymmetry) {
    auto eng = rng::engine(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const int K = 2 + static_cast<int>(rng::uniform_below(eng, 7));
        const auto p = dirichlet(eng, K, 0.5), q = dirichlet(eng, K, 0.5);
        const double tv = tv_distance(p, q), h2 = squared_hellinger(p, q);
        EXPECT_LE(h2, tv + 1e-12);
        EXPECT_LE(tv, std::sqrt(2 * h2) + 1e-12);
        EXPECT_DOUBLE_EQ(tv, tv_distance(q, p));
        EXPECT_NEAR(h2, squared_hellinger(q, p), 1e-15);
    }
}

TEST(CollisionStatistic, IdenticalMultisetsAreNonPositive) {
    const std::vector<int> s{0, 1, 1, 2, 3, 3, 3};
    TestParams tp;
    tp.sample_budget = s.size();
    const auto v = hellinger_two_sample_test(s, s, 4, tp, 1);
    EXPECT_LE(v.statistic, 0.0);
    EXPECT_EQ(v.decision, Decision::Equal);
}

TEST(HellingerTest, DisjointSupportsAreFar) {
    const std::vector<int> a(100, 0), b(100, 1);
    TestParams tp;
    tp.sample_budget = 100;
    const auto v = hellinger_two_sample_test(a, b, 2, tp, 1);
    EXPECT_DOUBLE_EQ(v.statistic, 2 * (100.0 * 100.0 - 100.0) / 100.0);
    EXPECT_EQ(v.decision, Decision::Far);
    EXPECT_GT(v.statistic, v.threshold);
}

TEST(HellingerTest, BudgetMismatch) {
    TestParams tp;
    tp.sample_budget = 3;
    const std::vector<int> a{0, 1, 0}, b{0, 1};
    try {
        hellinger_two_sample_test(a, b, 2, tp, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BudgetMismatch);
    }
}

TEST(HellingerTest, NullFalseFarRate) {
    const std::vector<double> uniform(4, 0.25);
    TestParams tp;
    tp.eps2_threshold = 0.25;
    tp.delta = 0.1;
    tp.sample_budget = sample_size_for_test(4, 0.25, 0.1);
    auto eng = rng::engine(17);
    int far = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const auto a = draw(eng, uniform, tp.sample_budget), b = draw(eng, uniform, tp.sample_budget);
        far += hellinger_two_sample_test(a, b, 4, tp, rng::derive(5, t)).decision == Decision::Far;
    }
    EXPECT_LE(far / double(trials), 0.1 + 3 * std::sqrt(0.1 / trials));
}

TEST(HellingerTest, PowerAtFullSeparation) {
    TestParams tp;
    tp.eps2_threshold = 1.0;
    tp.delta = 0.1;
    tp.sample_budget = sample_size_for_test(2, 1.0, 0.1);
    auto eng = rng::engine(4);
    int far = 0;
    for (int t = 0; t < 100; ++t) {
        const auto a = draw(eng, {1, 0}, tp.sample_budget), b = draw(eng, {0, 1}, tp.sample_budget);
        far += hellinger_two_sample_test(a, b, 2, tp, t).decision == Decision::Far;
    }
    EXPECT_GE(far, 99);
}

TEST(HellingerTest, CalibrationIsThreadIndependent) {
    auto eng = rng::engine(2);
    const auto a = draw(eng, {0.2, 0.3, 0.5}, 500), b = draw(eng, {0.25, 0.25, 0.5}, 500);
    TestParams tp;
    tp.sample_budget = 500;
    const auto one = hellinger_two_sample_test(a, b, 3, tp, 9, 1);
    const auto four = hellinger_two_sample_test(a, b, 3, tp, 9, 4);
    EXPECT_EQ(one.threshold, four.threshold);
    EXPECT_EQ(one.statistic, four.statistic);
}

TEST(SampleSize, FormulaAndMonotonicity) {
    // delta = 1 leaves only the leading term.
    const double D = 4, eps = 0.5;
    const double expect = std::ceil(5 * std::min(std::pow(D, 2.0 / 3) / std::pow(eps, 8.0 / 3), std::pow(D, 0.75) / (eps * eps)));
    EXPECT_EQ(sample_size_for_test(4, 0.25, 1.0, 5.0), static_cast<std::size_t>(expect));
    EXPECT_EQ(sample_size_for_test(4, 0.25, 1.0, 5.0), 57u);
    for (double d = 1; d < 1e5; d *= 2) EXPECT_LE(sample_size_for_test(d, 0.1, 0.1), sample_size_for_test(2 * d, 0.1, 0.1));
    const auto base = sample_size_for_test(4, 0.25, 1.0), half = sample_size_for_test(4, 0.25, 0.5);
    EXPECT_GE(half, base);
    EXPECT_LE(static_cast<double>(half), std::ceil(base * (1 + std::log(2.0))) + 1);
}

TEST(Learner, ExamplesAndErrors) {
    const std::vector<int> allsame(200, 1);
    auto d = learn_empirical(allsame, {0}, 2, 0.5, 0.5, 0.1);
    EXPECT_EQ(d.probs, (std::vector<double>{0.0, 1.0}));
    const std::vector<int> mix{0, 0, 1, 1};
    d = learn_empirical(mix, {0}, 2, 1.0, 0.9, 0.1);
    EXPECT_EQ(d.probs, (std::vector<double>{0.5, 0.5}));
    try {
        learn_empirical(mix, {0}, 2, 0.1, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
    }
}

TEST(Learner, ContractMonteCarlo) {
    const std::vector<double> p{0.7, 0.3};
    const auto m = learn_sample_size(2, 0.05, 0.1);
    auto eng = rng::engine(6);
    int good = 0;
    for (int t = 0; t < 200; ++t) {
        const auto d = learn_empirical(draw(eng, p, m), {0}, 2, 0.05, 0.1);
        EXPECT_NEAR(d.total(), 1.0, 1e-12);
        good += tv_distance(d.probs, p) <= 0.05;
    }
    EXPECT_GE(good / 200.0, 0.9 - 3 * std::sqrt(0.09 / 200));
}
