#include <cbnt/algos.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace cbnt {

std::vector<LocalTarget> enumerate_local_targets(const Smcg& g, const CoveringSet& cs, bool allow_gaps) {
    const int K = g.K();
    for (const auto& I : cs.interventions) check_intervention(I, g.n(), K);
    std::vector<LocalTarget> out;
    for (const auto& S : local_subsets(g)) {
        const auto pa_vertices = parents(g, S);
        const int k = static_cast<int>(pa_vertices.size());
        const auto count = checked_pow(K, k);
        std::vector<std::size_t> witness(count, cs.size());
        std::vector<int> pa(k);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const auto& I = cs.interventions[i];
            bool ok = std::none_of(S.begin(), S.end(), [&](Vertex v) { return I.is_set(v); });
            for (int j = 0; ok && j < k; ++j) {
                pa[j] = I.value(pa_vertices[j]);
                ok = pa[j] != Intervention::kFree;
            }
            if (!ok) continue;
            auto& w = witness[encode(pa, K)];
            if (w == cs.size()) w = i;
        }
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            if (witness[idx] == cs.size()) {
                if (allow_gaps) continue;
                throw Error(ErrorCode::NotCovering, "no intervention exposes a local distribution of S of size " +
                                                        std::to_string(S.size()));
            }
            out.push_back({S, pa_vertices, decode(idx, k, K), witness[idx]});
        }
    }
    return out;
}

double local_h2_threshold(double eps, int n, int K, int d, int l) {
    return eps * eps / (2.0 * std::pow(static_cast<double>(K), static_cast<double>(l) * (d + 1)) * n);
}

double local_delta(int n, int K, int d, int l) {
    return 1.0 / (3.0 * std::pow(static_cast<double>(K), static_cast<double>(l) * d) * std::pow(2.0, l) * n);
}

std::size_t test_budget(const AlgoParams& p, int n, int K, int d, int l, double eps2, double delta_sub) {
    if (p.budget_mode == BudgetMode::Aggregate) {
        const double t = p.base_constant * std::pow(static_cast<double>(K), l * (d + 1.75)) * n / (p.eps * p.eps) *
                         (1.0 + std::log(1.0 / delta_sub));
        return static_cast<std::size_t>(std::max(1.0, std::ceil(t)));
    }
    return sample_size_for_test(std::pow(static_cast<double>(K), l), eps2, delta_sub, p.base_constant);
}

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorCode::DegenerateParams, "eps must lie in (0, 1]");
}

void check_source(const SampleSource& s, const Smcg& g, const char* name) {
    if (s.n() != g.n() || s.K() != g.K())
        throw Error(ErrorCode::PreconditionViolated, std::string(name) + " does not match the graph dimensions");
}

CoveringSet resolve_cover(const Smcg& g, const AlgoParams& params, std::uint64_t seed, const CoveringSet* cover) {
    if (cover) {
        if (!params.allow_partial_cover && verify_covering(g, *cover))
            throw Error(ErrorCode::NotCovering, "supplied intervention set is not covering");
        return *cover;
    }
    const std::uint64_t stream = rng::derive(seed, "cover");
    constexpr int kAttempts = 64;
    for (int a = 0; a < kAttempts; ++a) {
        auto cs = build_randomized(g, params.cover_delta, rng::derive(stream, static_cast<std::uint64_t>(a)));
        if (!verify_covering(g, cs)) return cs;
    }
    throw Error(ErrorCode::NotCovering, "no covering set found in 64 randomized draws");
}

// Shared body of c2st and cgft.
TestReport run_local_tests(const SampleSource& x, const SampleSource& y, const char* y_stream, const Smcg& g,
                           const AlgoParams& params, std::uint64_t seed, const CoveringSet* cover) {
    require_valid(g);
    check_eps(params.eps);
    check_source(x, g, "x");
    check_source(y, g, "y");
    const auto cp = class_params(g);
    const int n = g.n(), K = g.K();

    TestReport report;
    report.seed = seed;
    report.n = n;
    report.K = K;
    report.d = cp.d;
    report.l = cp.l;
    report.eps = params.eps;
    report.eps2_threshold = local_h2_threshold(params.eps, n, K, cp.d, cp.l);
    report.delta_sub = local_delta(n, K, cp.d, cp.l);
    report.budget = test_budget(params, n, K, cp.d, cp.l, report.eps2_threshold, report.delta_sub);

    const auto cs = resolve_cover(g, params, seed, cover);
    report.cover_size = cs.size();
    const auto targets = enumerate_local_targets(g, cs, params.allow_partial_cover);
    report.planned_subtests = targets.size();

    TestParams tp;
    tp.eps2_threshold = report.eps2_threshold;
    tp.delta = report.delta_sub;
    tp.sample_budget = report.budget;
    tp.calibration_reps = params.calibration_reps;
    tp.base_constant = params.base_constant;

    const std::uint64_t xs = rng::derive(seed, "x-samples");
    const std::uint64_t ys = rng::derive(seed, y_stream);
    const std::uint64_t cal = rng::derive(seed, "calibration");
    std::map<std::size_t, std::pair<SampleBatch, SampleBatch>> batches;

    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& target = targets[t];
        auto it = batches.find(target.witness);
        if (it == batches.end()) {
            const auto& I = cs.interventions[target.witness];
            auto bx = x.sample(I, report.budget, rng::derive(xs, target.witness), params.threads);
            auto by = y.sample(I, report.budget, rng::derive(ys, target.witness), params.threads);
            it = batches.emplace(target.witness, std::make_pair(std::move(bx), std::move(by))).first;
            ++report.interventions_used;
            report.total_samples += 2 * report.budget;
        }
        const auto ax = encode_atoms(it->second.first, target.S, K);
        const auto ay = encode_atoms(it->second.second, target.S, K);
        const auto D = checked_pow(K, static_cast<int>(target.S.size()));
        const auto v = hellinger_two_sample_test(ax, ay, D, tp, rng::derive(cal, t), params.threads);
        report.subtests.push_back(
            {target.S, target.pa_vertices, target.pa, target.witness, v.statistic, v.threshold, v.decision, v.samples_used});
        if (v.decision == Decision::Far) {
            report.decision = Decision::Far;
            break;
        }
    }
    return report;
}

// Subsets of `from` with 1..max_size elements, by size then lexicographically.
void bounded_subsets(const VertexSet& from, int max_size, std::vector<VertexSet>& out) {
    out.clear();
    const int m = static_cast<int>(from.size());
    for (int k = 1; k <= std::min(max_size, m); ++k) {
        std::vector<int> idx(k);
        for (int j = 0; j < k; ++j) idx[j] = j;
        while (true) {
            VertexSet S(k);
            for (int j = 0; j < k; ++j) S[j] = from[idx[j]];
            out.push_back(std::move(S));
            int j = k - 1;
            while (j >= 0 && idx[j] == m - k + j) --j;
            if (j < 0) break;
            ++idx[j];
            for (int r = j + 1; r < k; ++r) idx[r] = idx[r - 1] + 1;
        }
    }
}

std::uint64_t binomial_sum(int m, int max_size) {
    std::uint64_t total = 0, c = 1;
    for (int k = 1; k <= std::min(max_size, m); ++k) {
        c = c * static_cast<std::uint64_t>(m - k + 1) / static_cast<std::uint64_t>(k);
        total += c;
    }
    return total;
}

DiscreteDist local_distribution(const Smbn& m, const VertexSet& S, const VertexSet& pa_vertices,
                                const std::vector<int>& pa) {
    const int K = m.K();
    std::vector<int> values(m.n(), 0);
    for (std::size_t j = 0; j < pa_vertices.size(); ++j) values[pa_vertices[j]] = pa[j];
    std::vector<double> probs(checked_pow(K, static_cast<int>(S.size())));
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        const auto s = decode(idx, static_cast<int>(S.size()), K);
        for (std::size_t j = 0; j < S.size(); ++j) values[S[j]] = s[j];
        probs[idx] = local_probability(m, S, values);
    }
    return DiscreteDist(S, K, std::move(probs));
}

} // namespace

TestReport c2st(const SampleSource& x, const SampleSource& y, const Smcg& g, const AlgoParams& params,
                std::uint64_t seed, const CoveringSet* cover) {
    return run_local_tests(x, y, "y-samples", g, params, seed, cover);
}

TestReport cgft(const Smbn& m, const SampleSource& x, const Smcg& g, const AlgoParams& params, std::uint64_t seed,
                const CoveringSet* cover) {
    if (!(m.graph() == g)) throw Error(ErrorCode::PreconditionViolated, "hypothesis model is over a different graph");
    SmbnSampler hypothesis(m);
    return run_local_tests(x, hypothesis, "model-samples", g, params, seed, cover);
}

TestReport c2st_unknown_graph(const SampleSource& x, const SampleSource& y, int d, int l, int K, int n,
                              const AlgoParams& params, std::uint64_t seed) {
    check_eps(params.eps);
    if (x.n() != n || y.n() != n || x.K() != K || y.K() != K)
        throw Error(ErrorCode::PreconditionViolated, "sample sources do not match (n, K)");
    const auto cs = build_randomized(n, K, d, l, params.cover_delta, rng::derive(seed, "cover"));

    TestReport report;
    report.seed = seed;
    report.n = n;
    report.K = K;
    report.d = d;
    report.l = l;
    report.eps = params.eps;
    report.cover_size = cs.size();
    for (const auto& I : cs.interventions)
        report.planned_subtests += binomial_sum(static_cast<int>(I.free_vertices().size()), l);
    report.eps2_threshold = local_h2_threshold(params.eps, n, K, d, l);
    const double nominal_delta = 1.0 / (6.0 * std::pow(static_cast<double>(K), static_cast<double>(l) * d) *
                                      std::pow(2.0, l) * n);
    report.delta_sub = report.planned_subtests
                           ? std::min(nominal_delta, 1.0 / (6.0 * static_cast<double>(report.planned_subtests)))
                           : nominal_delta;
    report.budget = test_budget(params, n, K, d, l, report.eps2_threshold, report.delta_sub);

    TestParams tp;
    tp.eps2_threshold = report.eps2_threshold;
    tp.delta = report.delta_sub;
    tp.sample_budget = report.budget;
    tp.calibration_reps = params.calibration_reps;
    tp.base_constant = params.base_constant;

    const std::uint64_t xs = rng::derive(seed, "x-samples");
    const std::uint64_t ys = rng::derive(seed, "y-samples");
    const std::uint64_t cal = rng::derive(seed, "calibration");
    std::vector<VertexSet> subsets;
    std::size_t test_index = 0;
    for (std::size_t i = 0; i < cs.size() && report.decision == Decision::Equal; ++i) {
        const auto& I = cs.interventions[i];
        bounded_subsets(I.free_vertices(), l, subsets);
        if (subsets.empty()) continue;
        const auto bx = x.sample(I, report.budget, rng::derive(xs, i), params.threads);
        const auto by = y.sample(I, report.budget, rng::derive(ys, i), params.threads);
        ++report.interventions_used;
        report.total_samples += 2 * report.budget;
        for (const auto& S : subsets) {
            const auto D = checked_pow(K, static_cast<int>(S.size()));
            const auto v = hellinger_two_sample_test(encode_atoms(bx, S, K), encode_atoms(by, S, K), D, tp,
                                                     rng::derive(cal, test_index++), params.threads);
            VertexSet set_vertices = I.targets();
            std::vector<int> set_values;
            for (Vertex u : set_vertices) set_values.push_back(I.value(u));
            report.subtests.push_back({S, std::move(set_vertices), std::move(set_values), i, v.statistic, v.threshold,
                                       v.decision, v.samples_used});
            if (v.decision == Decision::Far) {
                report.decision = Decision::Far;
                break;
            }
        }
    }
    return report;
}

const DiscreteDist& LearnedOracle::local(const VertexSet& S, const std::vector<int>& pa) const {
    auto it = locals.find({S, pa});
    if (it == locals.end()) throw Error(ErrorCode::PreconditionViolated, "oracle has no local for this (S, pa)");
    return it->second;
}

LearnedOracle clp_learn(const SampleSource& x, const Smcg& g, const AlgoParams& params, std::uint64_t seed,
                        const CoveringSet* cover) {
    require_valid(g);
    check_eps(params.eps);
    check_source(x, g, "x");
    const auto cp = class_params(g);
    const int n = g.n(), K = g.K();
    const double eps_loc = std::sqrt(local_h2_threshold(params.eps, n, K, cp.d, cp.l));
    const double delta_t = local_delta(n, K, cp.d, cp.l);

    AlgoParams strict = params;
    strict.allow_partial_cover = false;
    const auto cs = resolve_cover(g, strict, seed, cover);
    const auto targets = enumerate_local_targets(g, cs);

    std::map<std::size_t, std::size_t> need;
    for (const auto& t : targets) {
        const auto D = static_cast<double>(checked_pow(K, static_cast<int>(t.S.size())));
        auto& c = need[t.witness];
        c = std::max(c, learn_sample_size(D, eps_loc, delta_t, params.learn_constant));
    }
    const std::uint64_t xs = rng::derive(seed, "x-samples");
    std::map<std::size_t, SampleBatch> batches;
    for (const auto& [w, count] : need)
        batches.emplace(w, x.sample(cs.interventions[w], count, rng::derive(xs, w), params.threads));

    LearnedOracle o;
    o.graph = g;
    for (const auto& t : targets) {
        const auto atoms = encode_atoms(batches.at(t.witness), t.S, K);
        o.locals.emplace(LocalKey{t.S, t.pa}, learn_empirical(atoms, t.S, K, eps_loc, delta_t, params.learn_constant));
    }
    return o;
}

LearnedOracle exact_oracle(const Smbn& m) {
    LearnedOracle o;
    o.graph = m.graph();
    const int K = m.K();
    for (const auto& S : local_subsets(m.graph())) {
        const auto pa_vertices = parents(m.graph(), S);
        const int k = static_cast<int>(pa_vertices.size());
        for (std::uint64_t idx = 0; idx < checked_pow(K, k); ++idx) {
            auto pa = decode(idx, k, K);
            o.locals.emplace(LocalKey{S, pa}, local_distribution(m, S, pa_vertices, pa));
        }
    }
    return o;
}

OracleAnswer oracle_query(const LearnedOracle& o, const VertexSet& T, std::span<const int> t_assign) {
    const auto& g = o.graph;
    const int K = g.K();
    for (Vertex v : T)
        if (v < 0 || v >= g.n()) throw Error(ErrorCode::VertexOutOfRange, "vertex " + std::to_string(v));
    if (t_assign.size() != T.size()) throw Error(ErrorCode::PreconditionViolated, "assignment length differs from |T|");
    for (int x : t_assign)
        if (x < 0 || x >= K) throw Error(ErrorCode::PreconditionViolated, "value outside alphabet");

    const auto free = set_difference(all_vertices(g.n()), T);
    struct Factor {
        VertexSet S;
        VertexSet pa_vertices;
    };
    std::vector<Factor> factors;
    for (auto& S : c_components(g, free)) {
        auto pa = parents(g, S);
        factors.push_back({std::move(S), std::move(pa)});
    }

    std::vector<int> values(g.n(), 0);
    for (std::size_t j = 0; j < T.size(); ++j) values[T[j]] = t_assign[j];
    std::vector<double> probs(checked_pow(K, static_cast<int>(free.size())), 0.0);
    std::vector<int> pa, s;
    double mass = 0.0;
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        const auto digits = decode(idx, static_cast<int>(free.size()), K);
        for (std::size_t j = 0; j < free.size(); ++j) values[free[j]] = digits[j];
        double p = 1.0;
        for (const auto& f : factors) {
            pa.clear();
            s.clear();
            for (Vertex u : f.pa_vertices) pa.push_back(values[u]);
            for (Vertex u : f.S) s.push_back(values[u]);
            p *= o.local(f.S, pa).probs[encode(s, K)];
            if (p == 0.0) break;
        }
        probs[idx] = p;
        mass += p;
    }
    if (mass > 0.0 && mass != 1.0)
        for (double& p : probs) p /= mass;
    return {DiscreteDist(free, K, std::move(probs)), mass};
}

AuditReport subadditivity_audit(const Smbn& x, const Smbn& y, EnumLimits limits) {
    const auto& g = x.graph();
    if (!(g == y.graph())) throw Error(ErrorCode::PreconditionViolated, "models are over different graphs");
    const int n = g.n(), K = g.K();
    if (n >= 31) throw Error(ErrorCode::TooLargeToEnumerate, "too many vertices for an exhaustive audit");
    const auto cp = class_params(g);

    AuditReport report;
    std::map<VertexSet, double> gamma_of;
    auto gamma = [&](const VertexSet& S) {
        auto it = gamma_of.find(S);
        if (it != gamma_of.end()) return it->second;
        const auto pa_vertices = parents(g, S);
        const int k = static_cast<int>(pa_vertices.size());
        double worst = 0.0;
        for (std::uint64_t idx = 0; idx < checked_pow(K, k); ++idx) {
            const auto pa = decode(idx, k, K);
            worst = std::max(worst, squared_hellinger(local_distribution(x, S, pa_vertices, pa),
                                                      local_distribution(y, S, pa_vertices, pa)));
        }
        gamma_of.emplace(S, worst);
        return worst;
    };

    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        VertexSet T;
        for (int v = 0; v < n; ++v)
            if (mask & (1u << v)) T.push_back(v);
        const auto free = set_difference(all_vertices(n), T);
        for (const auto& S : c_components(g, free)) report.gamma_max = std::max(report.gamma_max, gamma(S));
        for (std::uint64_t ti = 0; ti < checked_pow(K, static_cast<int>(T.size())); ++ti) {
            const auto t = decode(ti, static_cast<int>(T.size()), K);
            Intervention I(n);
            for (std::size_t j = 0; j < T.size(); ++j) I.set(T[j], t[j]);
            const double h2 = squared_hellinger(exact_interventional(x, I, limits), exact_interventional(y, I, limits));
            report.worst_joint_h2 = std::max(report.worst_joint_h2, h2);
            ++report.interventions;
        }
    }
    report.bound = report.gamma_max * std::pow(static_cast<double>(K), static_cast<double>(cp.l) * (cp.d + 1)) * n + 1e-9;
    report.holds = report.worst_joint_h2 <= report.bound;
    report.markovian = g.bidirected().empty();
    if (report.markovian) {
        report.tight_bound = n * report.gamma_max + 1e-9;
        report.tight_holds = report.worst_joint_h2 <= report.tight_bound;
    }
    return report;
}

} // namespace cbnt
