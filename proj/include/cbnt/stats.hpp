#pragma once

// Distances between discrete distributions, the collision-corrected
// two-sample closeness test and the empirical learner.

#include <cbnt/cbn.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbnt {

// Throw SupportMismatch unless p and q live on the same variables.
double tv_distance(const DiscreteDist& p, const DiscreteDist& q);
double bhattacharyya(const DiscreteDist& p, const DiscreteDist& q);
double squared_hellinger(const DiscreteDist& p, const DiscreteDist& q);

double tv_distance(std::span<const double> p, std::span<const double> q);
double bhattacharyya(std::span<const double> p, std::span<const double> q);
double squared_hellinger(std::span<const double> p, std::span<const double> q);

struct TestParams {
    double eps2_threshold = 0.25;
    double delta = 0.1;
    std::size_t sample_budget = 1;
    // 0 picks calibration_reps_for(delta).
    std::size_t calibration_reps = 0;
    double base_constant = 5.0;
};

enum class Decision { Equal, Far };

struct TestVerdict {
    Decision decision = Decision::Equal;
    double statistic = 0.0;
    double threshold = 0.0;
    std::size_t samples_used = 0;
};

// Enough replicates to resolve the (1 - delta/2)-quantile, within [2000, 20000].
std::size_t calibration_reps_for(double delta);

// Z = sum over occupied atoms of ((X-Y)^2 - X - Y) / (X + Y).
double collision_statistic(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y);

// Atoms are indices in [0, D). Far iff Z exceeds the (1 - delta/2)-quantile
// of Z under a parametric bootstrap from the pooled counts.
TestVerdict hellinger_two_sample_test(std::span<const int> sa, std::span<const int> sb, std::size_t D,
                                      const TestParams& params, std::uint64_t seed, int threads = 1);

// ceil(c * min(D^{2/3} / eps^{8/3}, D^{3/4} / eps^2) * (1 + ln(1/delta))), eps = sqrt(eps2).
std::size_t sample_size_for_test(double D, double eps2, double delta, double base_constant = 5.0);

// ceil(c * (D + ln(1/delta)) / eps^2).
std::size_t learn_sample_size(double D, double eps, double delta, double learn_constant = 2.0);

// Empirical frequencies of `atoms` over K^|support| cells. Throws
// InsufficientSamples below learn_sample_size.
DiscreteDist learn_empirical(std::span<const int> atoms, const std::vector<Vertex>& support, int K, double eps,
                             double delta, double learn_constant = 2.0);

} // namespace cbnt
