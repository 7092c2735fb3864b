#pragma once

// Goodness-of-fit and two-sample testing of SMBNs through their local
// distributions P[S | do(pa(S))], learning an interventional oracle, and the
// exact subadditivity audit.

#include <cbnt/covering.hpp>
#include <cbnt/stats.hpp>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace cbnt {

// Interventional sample access. Implementations must be safe to call
// concurrently and deterministic in (I, count, seed).
class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual int n() const = 0;
    virtual int K() const = 0;
    virtual SampleBatch sample(const Intervention& I, std::size_t count, std::uint64_t seed, int threads) const = 0;
};

class SmbnSampler final : public SampleSource {
public:
    explicit SmbnSampler(const Smbn& m) : m_(&m) {}
    int n() const override { return m_->n(); }
    int K() const override { return m_->K(); }
    SampleBatch sample(const Intervention& I, std::size_t count, std::uint64_t seed, int threads) const override {
        return sample_interventional(*m_, I, count, seed, threads);
    }

private:
    const Smbn* m_;
};

struct LocalTarget {
    VertexSet S;
    VertexSet pa_vertices;
    std::vector<int> pa;
    std::size_t witness = 0; // index into the covering set
};

// One target per (S, pa) in local_subsets() order, witnessed by the first
// covering intervention. Throws NotCovering on a gap unless allow_gaps.
std::vector<LocalTarget> enumerate_local_targets(const Smcg& g, const CoveringSet& cs, bool allow_gaps = false);

enum class BudgetMode { PerTarget, Aggregate };

struct AlgoParams {
    double eps = 0.3;
    double base_constant = 5.0;
    double learn_constant = 2.0;
    BudgetMode budget_mode = BudgetMode::PerTarget;
    std::size_t calibration_reps = 0; // 0: calibration_reps_for(delta)
    double cover_delta = 1.0 / 6.0;
    // Skip (S, pa) pairs the covering set misses instead of failing.
    bool allow_partial_cover = false;
    int threads = 1;
};

struct SubtestRecord {
    VertexSet S;
    VertexSet pa_vertices;
    std::vector<int> pa;
    std::size_t witness = 0;
    double statistic = 0.0;
    double threshold = 0.0;
    Decision verdict = Decision::Equal;
    std::size_t samples = 0;
};

struct TestReport {
    Decision decision = Decision::Equal;
    std::size_t interventions_used = 0;
    std::size_t total_samples = 0;
    std::uint64_t seed = 0;
    int n = 0, K = 0, d = 0, l = 0;
    double eps = 0.0;
    double eps2_threshold = 0.0;
    double delta_sub = 0.0;
    std::size_t budget = 0; // samples per side per intervention
    std::size_t cover_size = 0;
    std::size_t planned_subtests = 0;
    std::vector<SubtestRecord> subtests;
};

// eps^2 / (2 K^{l(d+1)} n)
double local_h2_threshold(double eps, int n, int K, int d, int l);
// 1 / (3 K^{ld} 2^l n)
double local_delta(int n, int K, int d, int l);
// Samples per side per intervention for the chosen mode.
std::size_t test_budget(const AlgoParams& p, int n, int K, int d, int l, double eps2, double delta_sub);

// Two unknown models over g. When `cover` is null a randomized covering set
// is drawn from the "cover" stream and redrawn until it verifies.
TestReport c2st(const SampleSource& x, const SampleSource& y, const Smcg& g, const AlgoParams& params,
                std::uint64_t seed, const CoveringSet* cover = nullptr);

// c2st with the hypothesis side drawn from the known model m.
TestReport cgft(const Smbn& m, const SampleSource& x, const Smcg& g, const AlgoParams& params, std::uint64_t seed,
                const CoveringSet* cover = nullptr);

// Graph-free variant: tests every S of size <= l left free by each
// intervention of a randomized family for (n, K, d, l).
TestReport c2st_unknown_graph(const SampleSource& x, const SampleSource& y, int d, int l, int K, int n,
                              const AlgoParams& params, std::uint64_t seed);

using LocalKey = std::pair<VertexSet, std::vector<int>>;

struct LearnedOracle {
    Smcg graph;
    std::map<LocalKey, DiscreteDist> locals;

    const DiscreteDist& local(const VertexSet& S, const std::vector<int>& pa) const;
};

LearnedOracle clp_learn(const SampleSource& x, const Smcg& g, const AlgoParams& params, std::uint64_t seed,
                        const CoveringSet* cover = nullptr);

// Oracle whose locals are the exact local distributions of m.
LearnedOracle exact_oracle(const Smbn& m);

struct OracleAnswer {
    DiscreteDist dist; // over V \ T, ascending
    double mass = 1.0; // product mass before renormalization
};

OracleAnswer oracle_query(const LearnedOracle& o, const VertexSet& T, std::span<const int> t_assign);

struct AuditReport {
    double gamma_max = 0.0;
    double worst_joint_h2 = 0.0;
    double bound = 0.0;
    bool holds = true;
    bool markovian = false; // no bidirected edges: n * gamma_max also checked
    double tight_bound = 0.0;
    bool tight_holds = true;
    std::size_t interventions = 0;
};

// Exhaustive over every T and t: gamma_max over the full c-components of
// G[V\T] and their parent assignments, worst joint H^2 over do(t).
AuditReport subadditivity_audit(const Smbn& x, const Smbn& y, EnumLimits limits = {});

} // namespace cbnt
