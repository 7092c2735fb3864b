#include <cbnt/cbn.hpp>
#include <cbnt/parallel.hpp>
#include <cbnt/stats.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cbnt {

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
    std::uint64_t out = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && out > UINT64_MAX / base) return UINT64_MAX;
        out *= base;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Intervention

VertexSet Intervention::targets() const {
    VertexSet out;
    for (int v = 0; v < n(); ++v)
        if (is_set(v)) out.push_back(v);
    return out;
}

VertexSet Intervention::free_vertices() const {
    VertexSet out;
    for (int v = 0; v < n(); ++v)
        if (!is_set(v)) out.push_back(v);
    return out;
}

std::uint64_t Intervention::hash() const {
    std::uint64_t h = rng::splitmix64(static_cast<std::uint64_t>(values_.size()));
    for (int x : values_) h = rng::splitmix64(h ^ static_cast<std::uint64_t>(x + 2));
    return h;
}

void check_intervention(const Intervention& I, int n, int K) {
    if (I.n() != n)
        throw Error(ErrorCode::VertexOutOfRange,
                    "intervention covers " + std::to_string(I.n()) + " vertices, graph has " + std::to_string(n));
    for (int v = 0; v < n; ++v) {
        const int x = I.value(v);
        if (x != Intervention::kFree && (x < 0 || x >= K))
            throw Error(ErrorCode::PreconditionViolated,
                        "value " + std::to_string(x) + " for vertex " + std::to_string(v) + " outside alphabet");
    }
}

// ---------------------------------------------------------------------------
// DiscreteDist

std::size_t encode(std::span<const int> values, int K) {
    std::size_t idx = 0;
    for (int x : values) idx = idx * static_cast<std::size_t>(K) + static_cast<std::size_t>(x);
    return idx;
}

std::vector<int> decode(std::size_t index, int digits, int K) {
    std::vector<int> out(digits);
    for (int k = digits - 1; k >= 0; --k) {
        out[k] = static_cast<int>(index % static_cast<std::size_t>(K));
        index /= static_cast<std::size_t>(K);
    }
    return out;
}

DiscreteDist::DiscreteDist(std::vector<Vertex> support_, int K_, std::vector<double> probs_)
    : support(std::move(support_)), K(K_), probs(std::move(probs_)) {
    if (probs.size() != checked_pow(K, static_cast<int>(support.size())))
        throw Error(ErrorCode::BadDimensions, "probability vector length does not match K^|support|");
}

std::size_t DiscreteDist::index_of(std::span<const int> values) const { return encode(values, K); }

std::vector<int> DiscreteDist::assignment(std::size_t index) const {
    return decode(index, static_cast<int>(support.size()), K);
}

double DiscreteDist::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

// ---------------------------------------------------------------------------
// Cpt / Smbn

std::size_t Cpt::row_index(std::span<const int> observable, std::span<const int> hidden_values, int K) const {
    std::size_t idx = 0;
    for (Vertex p : parents) idx = idx * static_cast<std::size_t>(K) + static_cast<std::size_t>(observable[p]);
    for (int e : hidden) idx = idx * static_cast<std::size_t>(K) + static_cast<std::size_t>(hidden_values[e]);
    return idx;
}

Cpt cpt_skeleton(const Smcg& g, Vertex v) {
    Cpt c;
    c.parents = g.parents(v);
    c.hidden = g.hidden_edges(v);
    return c;
}

namespace {

void check_row(std::span<const double> row, const std::string& where) {
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidModel, where + ": negative or non-finite entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidModel, where + ": row does not sum to 1");
}

} // namespace

Smbn::Smbn(Smcg graph, std::vector<std::vector<double>> hidden_priors, std::vector<Cpt> cpts)
    : graph_(std::move(graph)), priors_(std::move(hidden_priors)), cpts_(std::move(cpts)) {
    if (auto err = validate(graph_)) throw Error(ErrorCode::InvalidModel, std::string("graph: ") + err->what());
    const int K = graph_.K();
    if (priors_.size() != graph_.bidirected().size())
        throw Error(ErrorCode::InvalidModel, "one hidden prior per bidirected edge required");
    for (std::size_t e = 0; e < priors_.size(); ++e) {
        if (priors_[e].size() != static_cast<std::size_t>(K))
            throw Error(ErrorCode::InvalidModel, "hidden prior " + std::to_string(e) + " has wrong length");
        check_row(priors_[e], "hidden prior " + std::to_string(e));
    }
    if (cpts_.size() != static_cast<std::size_t>(graph_.n()))
        throw Error(ErrorCode::InvalidModel, "one CPT per observable vertex required");
    for (int v = 0; v < graph_.n(); ++v) {
        const Cpt& c = cpts_[v];
        const std::string where = "cpt " + std::to_string(v);
        if (c.parents != graph_.parents(v) || c.hidden != graph_.hidden_edges(v))
            throw Error(ErrorCode::InvalidModel, where + ": domain does not match the graph");
        const auto rows = checked_pow(K, static_cast<int>(c.parents.size() + c.hidden.size()));
        if (c.table.size() != rows * static_cast<std::size_t>(K))
            throw Error(ErrorCode::InvalidModel, where + ": table size mismatch");
        for (std::size_t r = 0; r < rows; ++r) check_row(c.row(r, K), where + " row " + std::to_string(r));
    }
    order_ = topological_order(graph_);
}

Smbn Smbn::with_cpt(Vertex v, Cpt cpt) const {
    auto cpts = cpts_;
    cpts.at(v) = std::move(cpt);
    return Smbn(graph_, priors_, std::move(cpts));
}

// ---------------------------------------------------------------------------
// Exact enumeration

namespace {

// Hidden edges with at least one endpoint in `free` (others integrate out).
std::vector<int> relevant_hidden(const Smcg& g, const std::vector<char>& is_free) {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(g.bidirected().size()); ++e) {
        const auto& b = g.bidirected()[e];
        if (is_free[b.first] || is_free[b.second]) out.push_back(e);
    }
    return out;
}

class Enumerator {
public:
    Enumerator(const Smbn& m, const Intervention& I, std::vector<double>& out) : m_(m), out_(out) {
        const int n = m.n();
        values_ = I.values();
        hidden_.assign(m.hidden_count(), 0);
        const auto free = I.free_vertices();
        std::vector<std::size_t> stride(n, 0);
        std::size_t s = 1;
        for (auto it = free.rbegin(); it != free.rend(); ++it) {
            stride[*it] = s;
            s *= static_cast<std::size_t>(m.K());
        }
        for (Vertex v : m.order())
            if (!I.is_set(v)) plan_.push_back({v, stride[v]});
    }

    void run(double weight) { descend(0, weight, 0); }
    std::vector<int>& hidden() { return hidden_; }

private:
    struct Step {
        Vertex v;
        std::size_t stride;
    };

    void descend(std::size_t pos, double weight, std::size_t index) {
        if (pos == plan_.size()) {
            out_[index] += weight;
            return;
        }
        const Step& step = plan_[pos];
        const Cpt& cpt = m_.cpt(step.v);
        const auto row = cpt.row(cpt.row_index(values_, hidden_, m_.K()), m_.K());
        for (int a = 0; a < m_.K(); ++a) {
            if (row[a] == 0.0) continue;
            values_[step.v] = a;
            descend(pos + 1, weight * row[a], index + static_cast<std::size_t>(a) * step.stride);
        }
        values_[step.v] = Intervention::kFree;
    }

    const Smbn& m_;
    std::vector<double>& out_;
    std::vector<int> values_;
    std::vector<int> hidden_;
    std::vector<Step> plan_;
};

// Calls fn() for every assignment of `edges` in hidden, with its prior weight.
template <typename Fn>
void for_each_hidden(const Smbn& m, const std::vector<int>& edges, std::vector<int>& hidden, Fn&& fn) {
    const int K = m.K();
    for (int e : edges) hidden[e] = 0;
    while (true) {
        double w = 1.0;
        for (int e : edges) w *= m.hidden_prior(e)[hidden[e]];
        if (w != 0.0) fn(w);
        std::size_t k = edges.size();
        while (k > 0) {
            int& digit = hidden[edges[k - 1]];
            if (++digit < K) break;
            digit = 0;
            --k;
        }
        if (k == 0) return;
    }
}

} // namespace

DiscreteDist exact_interventional(const Smbn& m, const Intervention& I, EnumLimits limits) {
    check_intervention(I, m.n(), m.K());
    const auto free = I.free_vertices();
    std::vector<char> is_free(m.n(), 0);
    for (Vertex v : free) is_free[v] = 1;
    const auto edges = relevant_hidden(m.graph(), is_free);
    const auto cells = checked_pow(m.K(), static_cast<int>(free.size() + edges.size()));
    if (cells > limits.max_cells)
        throw Error(ErrorCode::TooLargeToEnumerate,
                    std::to_string(free.size()) + " free and " + std::to_string(edges.size()) +
                        " hidden variables exceed the enumeration guard");

    std::vector<double> probs(checked_pow(m.K(), static_cast<int>(free.size())), 0.0);
    Enumerator en(m, I, probs);
    for_each_hidden(m, edges, en.hidden(), [&](double w) { en.run(w); });
    return DiscreteDist(free, m.K(), std::move(probs));
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

constexpr std::size_t kChunkRows = 4096;

} // namespace

SampleBatch sample_interventional(const Smbn& m, const Intervention& I, std::size_t count, std::uint64_t seed,
                                  int threads) {
    check_intervention(I, m.n(), m.K());
    SampleBatch batch;
    batch.n = m.n();
    batch.rows = count;
    batch.data.assign(count * static_cast<std::size_t>(m.n()), 0);
    const std::uint64_t stream = rng::derive(seed, I.hash());
    const std::size_t chunks = (count + kChunkRows - 1) / kChunkRows;
    const int K = m.K();

    parallel_for(chunks, threads, [&](std::size_t chunk) {
        auto eng = rng::engine(rng::derive(stream, chunk));
        std::vector<int> hidden(m.hidden_count(), 0);
        const std::size_t begin = chunk * kChunkRows;
        const std::size_t end = std::min(count, begin + kChunkRows);
        for (std::size_t r = begin; r < end; ++r) {
            int* row = batch.data.data() + r * static_cast<std::size_t>(m.n());
            for (std::size_t e = 0; e < hidden.size(); ++e)
                hidden[e] = rng::categorical(eng, m.hidden_prior(static_cast<int>(e)));
            for (Vertex v : m.order()) {
                if (I.is_set(v)) {
                    row[v] = I.value(v);
                    continue;
                }
                const Cpt& cpt = m.cpt(v);
                std::size_t idx = 0;
                for (Vertex p : cpt.parents) idx = idx * static_cast<std::size_t>(K) + static_cast<std::size_t>(row[p]);
                for (int e : cpt.hidden) idx = idx * static_cast<std::size_t>(K) + static_cast<std::size_t>(hidden[e]);
                row[v] = rng::categorical(eng, cpt.row(idx, K));
            }
        }
    });
    return batch;
}

std::vector<int> encode_atoms(const SampleBatch& batch, const VertexSet& S, int K) {
    std::vector<int> atoms(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto row = batch.row(i);
        std::size_t idx = 0;
        for (Vertex v : S) idx = idx * static_cast<std::size_t>(K) + static_cast<std::size_t>(row[v]);
        atoms[i] = static_cast<int>(idx);
    }
    return atoms;
}

DiscreteDist empirical_marginal(const SampleBatch& batch, const VertexSet& S, int K) {
    std::vector<double> probs(checked_pow(K, static_cast<int>(S.size())), 0.0);
    if (batch.size() == 0) throw Error(ErrorCode::InsufficientSamples, "empty sample batch");
    for (int a : encode_atoms(batch, S, K)) probs[a] += 1.0;
    for (double& p : probs) p /= static_cast<double>(batch.size());
    return DiscreteDist(S, K, std::move(probs));
}

DiscreteDist marginalize(const DiscreteDist& dist, const std::vector<Vertex>& S) {
    std::vector<int> position;
    for (Vertex v : S) {
        auto it = std::find(dist.support.begin(), dist.support.end(), v);
        if (it == dist.support.end())
            throw Error(ErrorCode::VertexNotInSupport, "vertex " + std::to_string(v) + " not in support");
        position.push_back(static_cast<int>(it - dist.support.begin()));
    }
    std::vector<double> out(checked_pow(dist.K, static_cast<int>(S.size())), 0.0);
    const int digits = static_cast<int>(dist.support.size());
    std::vector<int> full(digits, 0);
    for (std::size_t idx = 0; idx < dist.probs.size(); ++idx) {
        std::size_t target = 0;
        for (int pos : position) target = target * static_cast<std::size_t>(dist.K) + static_cast<std::size_t>(full[pos]);
        out[target] += dist.probs[idx];
        for (int k = digits - 1; k >= 0; --k) {
            if (++full[k] < dist.K) break;
            full[k] = 0;
        }
    }
    return DiscreteDist(S, dist.K, std::move(out));
}

double local_probability(const Smbn& m, const VertexSet& S, std::span<const int> values) {
    std::vector<char> in_s(m.n(), 0);
    for (Vertex v : S) in_s[v] = 1;
    const auto edges = relevant_hidden(m.graph(), in_s);
    std::vector<int> hidden(m.hidden_count(), 0);
    double total = 0.0;
    for_each_hidden(m, edges, hidden, [&](double w) {
        for (Vertex v : S) {
            const Cpt& cpt = m.cpt(v);
            w *= cpt.row(cpt.row_index(values, hidden, m.K()), m.K())[values[v]];
            if (w == 0.0) return;
        }
        total += w;
    });
    return total;
}

bool truncation_check(const Smbn& m, const VertexSet& S, const VertexSet& D, std::span<const int> d_assign,
                      double tol, EnumLimits limits) {
    const auto& g = m.graph();
    if (d_assign.size() != D.size()) throw Error(ErrorCode::PreconditionViolated, "assignment length differs from |D|");
    if (intersects(S, D)) throw Error(ErrorCode::PreconditionViolated, "D must be disjoint from S");
    const auto pa = parents(g, S);
    if (!is_subset(pa, D)) throw Error(ErrorCode::PreconditionViolated, "D must contain Pa(S)");

    Intervention full(m.n()), trimmed(m.n());
    for (std::size_t k = 0; k < D.size(); ++k) {
        full.set(D[k], d_assign[k]);
        if (std::binary_search(pa.begin(), pa.end(), D[k])) trimmed.set(D[k], d_assign[k]);
    }
    const auto p = marginalize(exact_interventional(m, full, limits), S);
    const auto q = marginalize(exact_interventional(m, trimmed, limits), S);
    return tv_distance(p, q) <= tol;
}

DiscreteDist c_component_factorization(const Smbn& m, const VertexSet& T, std::span<const int> t_assign,
                                       EnumLimits limits) {
    const auto& g = m.graph();
    if (t_assign.size() != T.size()) throw Error(ErrorCode::PreconditionViolated, "assignment length differs from |T|");
    const auto free = set_difference(all_vertices(m.n()), T);
    const auto components = c_components(g, free);
    if (checked_pow(m.K(), static_cast<int>(free.size())) > limits.max_cells)
        throw Error(ErrorCode::TooLargeToEnumerate, "too many free vertices");

    std::vector<int> values(m.n(), 0);
    for (std::size_t k = 0; k < T.size(); ++k) values[T[k]] = t_assign[k];
    std::vector<double> probs(checked_pow(m.K(), static_cast<int>(free.size())), 0.0);
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        const auto digits = decode(idx, static_cast<int>(free.size()), m.K());
        for (std::size_t k = 0; k < free.size(); ++k) values[free[k]] = digits[k];
        double p = 1.0;
        for (const auto& comp : components) {
            p *= local_probability(m, comp, values);
            if (p == 0.0) break;
        }
        probs[idx] = p;
    }
    return DiscreteDist(free, m.K(), std::move(probs));
}

bool independence_lemma_check(const Smbn& m, const VertexSet& T, const VertexSet& C, int i, const VertexSet& D,
                              double tol, EnumLimits limits) {
    const auto& g = m.graph();
    const int K = m.K();
    const auto rest = set_difference(all_vertices(m.n()), T);
    const auto comps = c_components(g, rest);
    if (std::find(comps.begin(), comps.end(), C) == comps.end())
        throw Error(ErrorCode::PreconditionViolated, "C is not a c-component of G[V \\ T]");
    if (i < 1 || i > static_cast<int>(C.size())) throw Error(ErrorCode::PreconditionViolated, "i out of range");

    std::vector<int> position(m.n());
    for (std::size_t k = 0; k < m.order().size(); ++k) position[m.order()[k]] = static_cast<int>(k);
    std::vector<Vertex> ordered = C;
    std::sort(ordered.begin(), ordered.end(), [&](Vertex a, Vertex b) { return position[a] < position[b]; });
    const std::vector<Vertex> prefix(ordered.begin(), ordered.begin() + i);
    const auto prefix_set = make_set(prefix);
    const auto pa_prime = set_difference(parents(g, prefix_set), T);
    if (intersects(D, T) || intersects(D, prefix_set))
        throw Error(ErrorCode::PreconditionViolated, "D must avoid T and the first i vertices of C");
    if (!is_subset(pa_prime, D)) throw Error(ErrorCode::PreconditionViolated, "D must contain Pa_G'(prefix)");

    const auto t_count = checked_pow(K, static_cast<int>(T.size()));
    const auto d_count = checked_pow(K, static_cast<int>(D.size()));
    for (std::size_t ti = 0; ti < t_count; ++ti) {
        const auto t = decode(ti, static_cast<int>(T.size()), K);
        for (std::size_t di = 0; di < d_count; ++di) {
            const auto d = decode(di, static_cast<int>(D.size()), K);
            Intervention wide(m.n()), narrow(m.n());
            for (std::size_t k = 0; k < T.size(); ++k) {
                wide.set(T[k], t[k]);
                narrow.set(T[k], t[k]);
            }
            for (std::size_t k = 0; k < D.size(); ++k) {
                wide.set(D[k], d[k]);
                if (std::binary_search(pa_prime.begin(), pa_prime.end(), D[k])) narrow.set(D[k], d[k]);
            }
            // Joint over the prefix, in topological order so the last digit is v_{n_i}.
            const auto p = marginalize(exact_interventional(m, wide, limits), prefix);
            const auto q = marginalize(exact_interventional(m, narrow, limits), prefix);
            for (std::size_t head = 0; head < p.size(); head += static_cast<std::size_t>(K)) {
                double den_p = 0.0, den_q = 0.0;
                for (int a = 0; a < K; ++a) {
                    den_p += p.probs[head + a];
                    den_q += q.probs[head + a];
                }
                constexpr double kNegligible = 1e-12;
                if (den_p <= kNegligible && den_q <= kNegligible) continue;
                if (den_p <= kNegligible || den_q <= kNegligible) return false;
                for (int a = 0; a < K; ++a)
                    if (std::abs(p.probs[head + a] / den_p - q.probs[head + a] / den_q) > tol) return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Random models

std::vector<double> dirichlet(rng::Engine& eng, int K, double alpha) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> out(K);
    double sum = 0.0;
    for (double& x : out) sum += (x = gamma(eng));
    if (!(sum > 0.0)) {
        std::fill(out.begin(), out.end(), 0.0);
        out[rng::uniform_below(eng, K)] = 1.0;
        return out;
    }
    for (double& x : out) x /= sum;
    return out;
}

Smbn random_smbn(const Smcg& g, rng::Engine& eng, double alpha) {
    const int K = g.K();
    std::vector<std::vector<double>> priors;
    for (std::size_t e = 0; e < g.bidirected().size(); ++e) priors.push_back(dirichlet(eng, K, alpha));
    std::vector<Cpt> cpts;
    for (int v = 0; v < g.n(); ++v) {
        Cpt c = cpt_skeleton(g, v);
        const auto rows = checked_pow(K, static_cast<int>(c.parents.size() + c.hidden.size()));
        c.table.reserve(rows * static_cast<std::size_t>(K));
        for (std::size_t r = 0; r < rows; ++r) {
            const auto row = dirichlet(eng, K, alpha);
            c.table.insert(c.table.end(), row.begin(), row.end());
        }
        cpts.push_back(std::move(c));
    }
    return Smbn(g, std::move(priors), std::move(cpts));
}

} // namespace cbnt
