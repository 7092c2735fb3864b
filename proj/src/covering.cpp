#include <cbnt/covering.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace cbnt {

std::string_view to_string(Construction c) {
    switch (c) {
    case Construction::Randomized: return "randomized";
    case Construction::Resampled: return "resampled";
    case Construction::Explicit: return "explicit";
    }
    return "explicit";
}

Construction construction_from_string(std::string_view s) {
    if (s == "randomized") return Construction::Randomized;
    if (s == "resampled") return Construction::Resampled;
    if (s == "explicit") return Construction::Explicit;
    throw Error(ErrorCode::ParseError, "unknown construction '" + std::string(s) + "'");
}

std::vector<VertexSet> local_subsets(const Smcg& g) {
    std::vector<VertexSet> out;
    for (const auto& comp : c_components(g)) {
        if (comp.size() >= 31) throw Error(ErrorCode::TooLargeToEnumerate, "c-component too large");
        const std::uint32_t masks = 1u << comp.size();
        for (std::uint32_t mask = 1; mask < masks; ++mask) {
            VertexSet S;
            for (std::size_t k = 0; k < comp.size(); ++k)
                if (mask & (1u << k)) S.push_back(comp[k]);
            out.push_back(std::move(S));
        }
    }
    return out;
}

bool covers(const Intervention& I, const VertexSet& S, const VertexSet& pa_vertices, std::span<const int> pa) {
    for (Vertex v : S)
        if (I.is_set(v)) return false;
    for (std::size_t k = 0; k < pa_vertices.size(); ++k)
        if (I.value(pa_vertices[k]) != pa[k]) return false;
    return true;
}

namespace {

double log_term_size(double K, int d, int l) {
    return std::pow(K, static_cast<double>(l) * d) * std::pow(std::max(3.0 * d, 1.0), l);
}

void check_params(int n, int K, int d, int l, double delta) {
    if (n <= 0) throw Error(ErrorCode::DegenerateParams, "n must be positive");
    if (K < 2) throw Error(ErrorCode::InvalidAlphabet, "K must be at least 2");
    if (d < 0 || l < 0) throw Error(ErrorCode::DegenerateParams, "d and l must be non-negative");
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::DegenerateParams, "delta must lie in (0, 1)");
}

Intervention draw_intervention(rng::Engine& eng, int n, int K, double p_free) {
    Intervention I(n);
    for (int v = 0; v < n; ++v)
        if (rng::uniform01(eng) >= p_free) I.set(v, static_cast<int>(rng::uniform_below(eng, K)));
    return I;
}

void redraw(rng::Engine& eng, Intervention& I, Vertex v, int K, double p_free) {
    if (rng::uniform01(eng) >= p_free)
        I.set(v, static_cast<int>(rng::uniform_below(eng, K)));
    else
        I.clear(v);
}

} // namespace

std::uint64_t randomized_size(int n, int K, int d, int l, double delta) {
    const double lnK = std::log(static_cast<double>(K));
    const double t = log_term_size(K, d, l) * (std::log(static_cast<double>(n)) + 2.0 * l * d * lnK + std::log(1.0 / delta));
    return static_cast<std::uint64_t>(std::max(1.0, std::ceil(t)));
}

std::uint64_t resampled_size(int K, int d, int l) {
    d = std::max(d, 1);
    const double lnK = std::log(static_cast<double>(K));
    const double t = log_term_size(K, d, l) * (static_cast<double>(l) * d * d + static_cast<double>(l) * d * lnK + 2.0);
    return static_cast<std::uint64_t>(std::ceil(t));
}

CoveringSet build_randomized(int n, int K, int d, int l, double delta, std::uint64_t seed) {
    check_params(n, K, d, l, delta);
    CoveringSet cs;
    cs.params = {d, l};
    cs.n = n;
    cs.K = K;
    cs.target_delta = delta;
    cs.seed = seed;
    cs.construction = Construction::Randomized;
    const auto t = randomized_size(n, K, d, l, delta);
    auto eng = rng::engine(rng::derive(seed, "randomized-cover"));
    const double p_free = 1.0 / (d + 1.0);
    cs.interventions.reserve(t);
    for (std::uint64_t i = 0; i < t; ++i) cs.interventions.push_back(draw_intervention(eng, n, K, p_free));
    return cs;
}

CoveringSet build_randomized(const Smcg& g, double delta, std::uint64_t seed) {
    require_valid(g);
    const auto p = class_params(g);
    return build_randomized(g.n(), g.K(), p.d, p.l, delta, seed);
}

namespace {

struct Requirement {
    VertexSet S;
    VertexSet pa_vertices;
    std::vector<int> pa;
    VertexSet vars; // S u Pa(S)
};

std::vector<Requirement> all_requirements(const Smcg& g) {
    std::vector<Requirement> out;
    const int K = g.K();
    for (const auto& S : local_subsets(g)) {
        const auto pa_vertices = parents(g, S);
        const auto count = checked_pow(K, static_cast<int>(pa_vertices.size()));
        for (std::uint64_t idx = 0; idx < count; ++idx)
            out.push_back({S, pa_vertices, decode(idx, static_cast<int>(pa_vertices.size()), K), set_union(S, pa_vertices)});
    }
    return out;
}

} // namespace

std::uint64_t requirement_count(const Smcg& g) {
    std::uint64_t total = 0;
    for (const auto& S : local_subsets(g)) {
        const auto c = checked_pow(g.K(), static_cast<int>(parents(g, S).size()));
        total = (c == UINT64_MAX || total > UINT64_MAX - c) ? UINT64_MAX : total + c;
    }
    return total;
}

CoveringSet build_resampled(const Smcg& g, std::uint64_t seed, ResampleOptions options) {
    require_valid(g);
    if (g.n() == 0) throw Error(ErrorCode::DegenerateParams, "n must be positive");
    const int d = std::max(max_total_degree(g), 1);
    const int l = class_params(g).l;
    const int K = g.K();
    const auto t = options.family_size ? options.family_size : resampled_size(K, d, l);
    const double p_free = 1.0 / (d + 1.0);

    CoveringSet cs;
    cs.params = {d, l};
    cs.n = g.n();
    cs.K = K;
    cs.seed = seed;
    cs.construction = Construction::Resampled;
    auto eng = rng::engine(rng::derive(seed, "resampled-cover"));
    cs.interventions.reserve(t);
    for (std::uint64_t i = 0; i < t; ++i) cs.interventions.push_back(draw_intervention(eng, g.n(), K, p_free));

    const auto reqs = all_requirements(g);
    std::vector<std::vector<int>> touching(g.n());
    for (std::size_t r = 0; r < reqs.size(); ++r)
        for (Vertex v : reqs[r].vars) touching[v].push_back(static_cast<int>(r));

    auto covered = [&](const Requirement& q) {
        for (const auto& I : cs.interventions)
            if (covers(I, q.S, q.pa_vertices, q.pa)) return true;
        return false;
    };
    std::set<int> bad;
    for (std::size_t r = 0; r < reqs.size(); ++r)
        if (!covered(reqs[r])) bad.insert(static_cast<int>(r));

    std::size_t rounds = 0;
    while (!bad.empty()) {
        if (rounds == options.round_budget) {
            if (options.rounds) *options.rounds = rounds;
            throw Error(ErrorCode::IterationBudgetExceeded,
                        std::to_string(bad.size()) + " requirements still uncovered after " + std::to_string(rounds) +
                            " resampling rounds");
        }
        ++rounds;
        const Requirement& q = reqs[*bad.begin()];
        for (auto& I : cs.interventions)
            for (Vertex v : q.vars) redraw(eng, I, v, K, p_free);
        std::vector<int> affected;
        for (Vertex v : q.vars) affected.insert(affected.end(), touching[v].begin(), touching[v].end());
        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        for (int r : affected) {
            if (covered(reqs[r]))
                bad.erase(r);
            else
                bad.insert(r);
        }
    }
    if (options.rounds) *options.rounds = rounds;
    return cs;
}

std::optional<LocalPair> verify_covering(const Smcg& g, const CoveringSet& cs, EnumLimits limits) {
    const int K = g.K();
    const auto subsets = local_subsets(g);
    if (requirement_count(g) > limits.max_cells)
        throw Error(ErrorCode::TooLargeToEnumerate, "too many (S, pa) requirements to verify");
    for (const auto& I : cs.interventions) check_intervention(I, g.n(), K);

    for (const auto& S : subsets) {
        const auto pa_vertices = parents(g, S);
        const int k = static_cast<int>(pa_vertices.size());
        std::vector<char> seen(checked_pow(K, k), 0);
        std::vector<int> pa(k);
        for (const auto& I : cs.interventions) {
            bool ok = true;
            for (Vertex v : S)
                if (I.is_set(v)) {
                    ok = false;
                    break;
                }
            for (int j = 0; ok && j < k; ++j) {
                pa[j] = I.value(pa_vertices[j]);
                if (pa[j] == Intervention::kFree) ok = false;
            }
            if (ok) seen[encode(pa, K)] = 1;
        }
        auto missing = std::find(seen.begin(), seen.end(), 0);
        if (missing != seen.end())
            return LocalPair{S, pa_vertices, decode(static_cast<std::size_t>(missing - seen.begin()), k, K)};
    }
    return std::nullopt;
}

} // namespace cbnt
