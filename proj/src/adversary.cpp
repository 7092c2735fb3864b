#include <cbnt/adversary.hpp>
#include <cbnt/stats.hpp>

#include <algorithm>
#include <cmath>

namespace cbnt {

VertexSet AdversaryPair::C() const {
    VertexSet out(ell);
    for (int j = 0; j < ell; ++j) out[j] = s + j;
    return out;
}

VertexSet AdversaryPair::W() const { return all_vertices(s); }

Intervention AdversaryPair::secret_intervention() const {
    Intervention I(s + ell);
    for (int i = 0; i < s; ++i) I.set(i, secret_pa[i]);
    return I;
}

namespace {

// Edges of a uniformly random labelled tree on `count` nodes via a Pruefer code.
std::vector<std::pair<int, int>> random_tree(int count, rng::Engine& eng) {
    std::vector<std::pair<int, int>> edges;
    if (count < 2) return edges;
    std::vector<int> code(count - 2);
    for (int& c : code) c = static_cast<int>(rng::uniform_below(eng, count));
    std::vector<int> degree(count, 1);
    for (int c : code) ++degree[c];
    for (int c : code) {
        int leaf = 0;
        while (degree[leaf] != 1) ++leaf;
        edges.emplace_back(leaf, c);
        --degree[leaf];
        --degree[c];
    }
    int a = -1, b = -1;
    for (int v = 0; v < count; ++v)
        if (degree[v] == 1) (a < 0 ? a : b) = v;
    edges.emplace_back(a, b);
    return edges;
}

Cpt v_cpt(const Smcg& g, Vertex v, const std::vector<int>& secret, bool flip) {
    Cpt c = cpt_skeleton(g, v);
    const int np = static_cast<int>(c.parents.size());
    const int nh = static_cast<int>(c.hidden.size());
    const auto rows = checked_pow(2, np + nh);
    c.table.assign(rows * 2, 0.0);
    for (std::uint64_t r = 0; r < rows; ++r) {
        const auto digits = decode(r, np + nh, 2);
        bool consistent = true;
        for (int k = 0; k < np; ++k) consistent = consistent && digits[k] == secret[c.parents[k]];
        auto row = c.row(r, 2);
        if (!consistent) {
            row[0] = row[1] = 0.5;
            continue;
        }
        int x = flip ? 1 : 0;
        for (int k = np; k < np + nh; ++k) x ^= digits[k];
        row[x] = 1.0;
    }
    return c;
}

} // namespace

AdversaryPair build_adversary_pair(int ell, int s, std::vector<int> secret_pa, std::optional<std::uint64_t> tree_seed) {
    if (ell < 1 || s < 1) throw Error(ErrorCode::BadDimensions, "ell and s must be positive");
    if (static_cast<int>(secret_pa.size()) != s)
        throw Error(ErrorCode::BadDimensions, "secret_pa must have one bit per parent");
    for (int b : secret_pa)
        if (b != 0 && b != 1) throw Error(ErrorCode::BadDimensions, "secret_pa must be a bit vector");

    const int n = s + ell;
    std::vector<DirectedEdge> directed;
    for (int i = 0; i < s; ++i) directed.push_back({i, s + i % ell});
    std::vector<std::pair<Vertex, Vertex>> bidirected;
    if (tree_seed) {
        auto eng = rng::engine(rng::derive(*tree_seed, "adversary-tree"));
        for (auto [a, b] : random_tree(ell, eng)) bidirected.emplace_back(s + a, s + b);
    } else {
        for (int j = 0; j + 1 < ell; ++j) bidirected.emplace_back(s + j, s + j + 1);
    }
    Smcg g(n, Alphabet{2}, directed, bidirected);

    std::vector<std::vector<double>> priors(g.bidirected().size(), std::vector<double>{0.5, 0.5});
    std::vector<Cpt> cm, cn;
    for (int i = 0; i < s; ++i) {
        Cpt c = cpt_skeleton(g, i);
        c.table = {1.0, 0.0};
        cm.push_back(c);
        cn.push_back(c);
    }
    for (int j = 0; j < ell; ++j) {
        cm.push_back(v_cpt(g, s + j, secret_pa, false));
        cn.push_back(v_cpt(g, s + j, secret_pa, j == 0));
    }

    AdversaryPair ap;
    ap.graph = g;
    ap.model_m = Smbn(g, priors, std::move(cm));
    ap.model_n = Smbn(g, std::move(priors), std::move(cn));
    ap.secret_pa = std::move(secret_pa);
    ap.ell = ell;
    ap.s = s;
    ap.tree_seed = tree_seed;
    return ap;
}

std::string_view to_string(AdversaryCase c) {
    switch (c) {
    case AdversaryCase::Secret: return "secret";
    case AdversaryCase::Exposing: return "exposing";
    case AdversaryCase::Violating: return "violating";
    }
    return "violating";
}

AdversaryReport verify_adversary_pair(const AdversaryPair& ap, double tol, EnumLimits limits) {
    const int n = ap.s + ap.ell;
    if (n > 16) throw Error(ErrorCode::TooLargeToEnumerate, "adversary pair too large to verify exhaustively");
    AdversaryReport report;
    const auto C = ap.C();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        VertexSet T;
        for (int v = 0; v < n; ++v)
            if (mask & (1u << v)) T.push_back(v);
        for (std::uint64_t ti = 0; ti < checked_pow(2, static_cast<int>(T.size())); ++ti) {
            const auto t = decode(ti, static_cast<int>(T.size()), 2);
            AdversaryCaseRecord rec;
            rec.I = Intervention(n);
            for (std::size_t j = 0; j < T.size(); ++j) rec.I.set(T[j], t[j]);

            bool c_free = true;
            for (Vertex v : C) c_free = c_free && !rec.I.is_set(v);
            bool exposes = c_free;
            for (int i = 0; i < ap.s && exposes; ++i) {
                const int effective = rec.I.is_set(i) ? rec.I.value(i) : 0;
                exposes = effective == ap.secret_pa[i];
            }

            const auto p = exact_interventional(ap.model_m, rec.I, limits);
            const auto q = exact_interventional(ap.model_n, rec.I, limits);
            rec.tv = tv_distance(p, q);
            if (exposes) {
                rec.kind = rec.I == ap.secret_intervention() ? AdversaryCase::Secret : AdversaryCase::Exposing;
                rec.ok = std::abs(rec.tv - 1.0) <= tol;
                if (rec.kind == AdversaryCase::Secret) report.secret_tv = rec.tv;
            } else {
                rec.kind = AdversaryCase::Violating;
                ++report.violating;
                double diff = 0.0;
                for (std::size_t k = 0; k < p.size(); ++k) diff = std::max(diff, std::abs(p.probs[k] - q.probs[k]));
                const auto rest = set_difference(C, T);
                const double cell = std::pow(0.5, static_cast<double>(rest.size()));
                for (const auto* dist : {&p, &q})
                    for (double x : marginalize(*dist, rest).probs) rec.uniform = rec.uniform && std::abs(x - cell) <= tol;
                rec.ok = diff <= tol && rec.uniform;
            }
            report.ok = report.ok && rec.ok;
            report.cases.push_back(std::move(rec));
            ++report.interventions;
        }
    }
    return report;
}

Smcg build_hard_graph(int n, int d, int l, std::uint64_t seed, Alphabet alphabet) {
    if (n < 1 || d < 0 || l < 1 || l * d < 2)
        throw Error(ErrorCode::BadDimensions, "hard graph needs n >= 1, l >= 1 and l*d >= 2");
    const int free_parents = l * d - 2;
    const int blocks = (n + l - 1) / l;
    const int total = n + free_parents + blocks * l;
    auto block_vertex = [&](int i, int k) { return n + free_parents + i * l + k; };

    auto eng = rng::engine(rng::derive(seed, "hard-graph"));
    const double p = std::min(1.0, 2.0 / n);
    std::vector<DirectedEdge> directed;
    std::vector<std::pair<Vertex, Vertex>> bidirected;
    for (int i = 0; i < blocks; ++i) {
        for (int k = 0; k + 1 < l; ++k) bidirected.emplace_back(block_vertex(i, k), block_vertex(i, k + 1));
        for (int f = 0; f < free_parents; ++f) directed.push_back({n + f, block_vertex(i, f % l)});
        for (int a = 0; a < n; ++a)
            if (rng::uniform01(eng) < p)
                directed.push_back({a, block_vertex(i, static_cast<int>(rng::uniform_below(eng, l)))});
    }
    Smcg g(total, alphabet, std::move(directed), std::move(bidirected));
    require_valid(g);
    return g;
}

} // namespace cbnt
