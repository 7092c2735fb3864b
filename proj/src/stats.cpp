#include <cbnt/parallel.hpp>
#include <cbnt/stats.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace cbnt {

namespace {

void require_same_support(const DiscreteDist& p, const DiscreteDist& q) {
    if (p.support != q.support || p.K != q.K || p.probs.size() != q.probs.size())
        throw Error(ErrorCode::SupportMismatch, "distributions are over different variables");
}

void require_same_size(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw Error(ErrorCode::SupportMismatch, "probability vectors differ in length");
}

} // namespace

double tv_distance(std::span<const double> p, std::span<const double> q) {
    require_same_size(p, q);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
    return std::clamp(0.5 * sum, 0.0, 1.0);
}

double bhattacharyya(std::span<const double> p, std::span<const double> q) {
    require_same_size(p, q);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::sqrt(p[i] * q[i]);
    return sum;
}

double squared_hellinger(std::span<const double> p, std::span<const double> q) {
    return std::clamp(1.0 - bhattacharyya(p, q), 0.0, 1.0);
}

double tv_distance(const DiscreteDist& p, const DiscreteDist& q) {
    require_same_support(p, q);
    return tv_distance(std::span<const double>(p.probs), std::span<const double>(q.probs));
}

double bhattacharyya(const DiscreteDist& p, const DiscreteDist& q) {
    require_same_support(p, q);
    return bhattacharyya(std::span<const double>(p.probs), std::span<const double>(q.probs));
}

double squared_hellinger(const DiscreteDist& p, const DiscreteDist& q) {
    require_same_support(p, q);
    return squared_hellinger(std::span<const double>(p.probs), std::span<const double>(q.probs));
}

std::size_t calibration_reps_for(double delta) {
    const double want = std::ceil(20.0 / (delta / 2.0));
    return static_cast<std::size_t>(std::clamp(want, 2000.0, 20000.0));
}

double collision_statistic(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
    double z = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = x[i], b = y[i];
        if (a + b == 0.0) continue;
        z += ((a - b) * (a - b) - a - b) / (a + b);
    }
    return z;
}

namespace {

// Multinomial(m, p) restricted to `atoms` (the cells with p > 0).
void draw_multinomial(rng::Engine& eng, std::size_t m, const std::vector<double>& p, const std::vector<int>& atoms,
                      std::vector<std::uint32_t>& out) {
    std::fill(out.begin(), out.end(), 0u);
    double rest = 1.0;
    std::size_t left = m;
    for (std::size_t k = 0; k < atoms.size() && left > 0; ++k) {
        const int a = atoms[k];
        if (k + 1 == atoms.size()) {
            out[a] = static_cast<std::uint32_t>(left);
            break;
        }
        const double q = std::clamp(p[a] / rest, 0.0, 1.0);
        std::binomial_distribution<long long> bin(static_cast<long long>(left), q);
        const auto c = static_cast<std::size_t>(bin(eng));
        out[a] = static_cast<std::uint32_t>(c);
        left -= c;
        rest -= p[a];
    }
}

} // namespace

TestVerdict hellinger_two_sample_test(std::span<const int> sa, std::span<const int> sb, std::size_t D,
                                      const TestParams& params, std::uint64_t seed, int threads) {
    if (sa.size() != params.sample_budget || sb.size() != params.sample_budget)
        throw Error(ErrorCode::BudgetMismatch, "sample sizes " + std::to_string(sa.size()) + "/" +
                                                   std::to_string(sb.size()) + " differ from budget " +
                                                   std::to_string(params.sample_budget));
    std::vector<std::uint32_t> x(D, 0), y(D, 0);
    for (int a : sa) {
        if (a < 0 || static_cast<std::size_t>(a) >= D) throw Error(ErrorCode::BadDimensions, "atom out of domain");
        ++x[a];
    }
    for (int b : sb) {
        if (b < 0 || static_cast<std::size_t>(b) >= D) throw Error(ErrorCode::BadDimensions, "atom out of domain");
        ++y[b];
    }

    TestVerdict verdict;
    verdict.samples_used = params.sample_budget;
    verdict.statistic = collision_statistic(x, y);

    const std::size_t m = params.sample_budget;
    std::vector<double> pooled(D, 0.0);
    std::vector<int> atoms;
    for (std::size_t i = 0; i < D; ++i) {
        pooled[i] = static_cast<double>(x[i] + y[i]) / static_cast<double>(2 * m);
        if (x[i] + y[i] > 0) atoms.push_back(static_cast<int>(i));
    }

    const std::size_t reps = params.calibration_reps ? params.calibration_reps : calibration_reps_for(params.delta);
    std::vector<double> null_stats(reps);
    constexpr std::size_t kBlock = 256;
    const std::size_t blocks = (reps + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](std::size_t block) {
        std::vector<std::uint32_t> bx(D), by(D);
        auto eng = rng::engine(rng::derive(seed, block));
        for (std::size_t r = block * kBlock; r < std::min(reps, (block + 1) * kBlock); ++r) {
            draw_multinomial(eng, m, pooled, atoms, bx);
            draw_multinomial(eng, m, pooled, atoms, by);
            null_stats[r] = collision_statistic(bx, by);
        }
    });
    std::sort(null_stats.begin(), null_stats.end());
    const double rank = std::ceil((1.0 - params.delta / 2.0) * static_cast<double>(reps));
    const std::size_t idx = std::min(reps, static_cast<std::size_t>(std::max(rank, 1.0))) - 1;
    verdict.threshold = null_stats[idx];
    verdict.decision = verdict.statistic > verdict.threshold ? Decision::Far : Decision::Equal;
    return verdict;
}

std::size_t sample_size_for_test(double D, double eps2, double delta, double base_constant) {
    const double a = std::pow(D, 2.0 / 3.0) / std::pow(eps2, 4.0 / 3.0);
    const double b = std::pow(D, 0.75) / eps2;
    const double log_term = 1.0 + std::max(0.0, std::log(1.0 / delta));
    return static_cast<std::size_t>(std::max(1.0, std::ceil(base_constant * std::min(a, b) * log_term)));
}

std::size_t learn_sample_size(double D, double eps, double delta, double learn_constant) {
    const double log_term = std::max(0.0, std::log(1.0 / delta));
    return static_cast<std::size_t>(std::max(1.0, std::ceil(learn_constant * (D + log_term) / (eps * eps))));
}

DiscreteDist learn_empirical(std::span<const int> atoms, const std::vector<Vertex>& support, int K, double eps,
                             double delta, double learn_constant) {
    const auto D = checked_pow(K, static_cast<int>(support.size()));
    const auto need = learn_sample_size(static_cast<double>(D), eps, delta, learn_constant);
    if (atoms.size() < need)
        throw Error(ErrorCode::InsufficientSamples,
                    "have " + std::to_string(atoms.size()) + " samples, need " + std::to_string(need));
    std::vector<double> counts(D, 0.0);
    for (int a : atoms) {
        if (a < 0 || static_cast<std::uint64_t>(a) >= D) throw Error(ErrorCode::BadDimensions, "atom out of domain");
        counts[a] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(atoms.size());
    return DiscreteDist(support, K, std::move(counts));
}

} // namespace cbnt
