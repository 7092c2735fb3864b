#pragma once

// Semi-Markovian Bayesian networks: CPTs over an Smcg, exact interventional
// distributions by enumeration and ancestral sampling under do().

#include <cbnt/graph.hpp>
#include <cbnt/rng.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbnt {

// Guard for exact enumeration: max number of (observable x hidden) cells.
struct EnumLimits {
    std::uint64_t max_cells = std::uint64_t{1} << 26;
};

// K^e with saturation at UINT64_MAX.
std::uint64_t checked_pow(std::uint64_t base, int exponent);

// Partial assignment of observable vertices; unset vertices are free.
class Intervention {
public:
    static constexpr int kFree = -1;

    Intervention() = default;
    explicit Intervention(int n) : values_(n, kFree) {}
    // values[v] == kFree or a symbol in [0, K).
    explicit Intervention(std::vector<int> values) : values_(std::move(values)) {}

    int n() const { return static_cast<int>(values_.size()); }
    bool is_set(Vertex v) const { return values_[v] != kFree; }
    int value(Vertex v) const { return values_[v]; }
    void set(Vertex v, int value) { values_[v] = value; }
    void clear(Vertex v) { values_[v] = kFree; }
    const std::vector<int>& values() const { return values_; }

    VertexSet targets() const;
    VertexSet free_vertices() const;
    std::uint64_t hash() const;

    friend bool operator==(const Intervention&, const Intervention&) = default;

private:
    std::vector<int> values_;
};

// Throws VertexOutOfRange / PreconditionViolated on bad keys or values.
void check_intervention(const Intervention& I, int n, int K);

// Probability vector over the joint assignments of `support`, row-major:
// support[0] is the most significant digit. Empty support holds one atom.
struct DiscreteDist {
    std::vector<Vertex> support;
    int K = 2;
    std::vector<double> probs;

    DiscreteDist() = default;
    DiscreteDist(std::vector<Vertex> support, int K, std::vector<double> probs);

    std::size_t size() const { return probs.size(); }
    std::size_t index_of(std::span<const int> values) const;
    std::vector<int> assignment(std::size_t index) const;
    double total() const;
};

// Row-major index of `values` (each in [0, K)).
std::size_t encode(std::span<const int> values, int K);
std::vector<int> decode(std::size_t index, int digits, int K);

struct Cpt {
    VertexSet parents;        // observable parents, ascending
    std::vector<int> hidden;  // incident bidirected-edge ids, ascending
    std::vector<double> table; // rows() * K entries

    std::size_t rows(int K) const { return table.size() / static_cast<std::size_t>(K); }
    std::span<const double> row(std::size_t r, int K) const {
        return {table.data() + r * static_cast<std::size_t>(K), static_cast<std::size_t>(K)};
    }
    std::span<double> row(std::size_t r, int K) {
        return {table.data() + r * static_cast<std::size_t>(K), static_cast<std::size_t>(K)};
    }
    // Row for a full observable assignment and hidden assignment.
    std::size_t row_index(std::span<const int> observable, std::span<const int> hidden_values, int K) const;
};

class Smbn {
public:
    Smbn() = default;
    // Validates the graph, priors and CPT domains; throws InvalidModel.
    Smbn(Smcg graph, std::vector<std::vector<double>> hidden_priors, std::vector<Cpt> cpts);

    const Smcg& graph() const { return graph_; }
    int n() const { return graph_.n(); }
    int K() const { return graph_.K(); }
    std::size_t hidden_count() const { return priors_.size(); }
    const std::vector<double>& hidden_prior(int edge) const { return priors_[edge]; }
    const std::vector<std::vector<double>>& hidden_priors() const { return priors_; }
    const Cpt& cpt(Vertex v) const { return cpts_[v]; }
    const std::vector<Cpt>& cpts() const { return cpts_; }
    const std::vector<Vertex>& order() const { return order_; }

    // Copy with one CPT replaced (revalidated).
    Smbn with_cpt(Vertex v, Cpt cpt) const;

private:
    Smcg graph_;
    std::vector<std::vector<double>> priors_;
    std::vector<Cpt> cpts_;
    std::vector<Vertex> order_;
};

// Empty-domain skeleton for vertex v of g (parents/hidden filled, no table).
Cpt cpt_skeleton(const Smcg& g, Vertex v);

// P[V \ targets(I) | do(I)] over the free vertices in ascending order.
DiscreteDist exact_interventional(const Smbn& m, const Intervention& I, EnumLimits limits = {});

// Full assignments over V, row-major with n columns.
struct SampleBatch {
    int n = 0;
    std::size_t rows = 0;
    std::vector<int> data;

    std::size_t size() const { return rows; }
    std::span<const int> row(std::size_t i) const {
        return {data.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }
};

// Ancestral sampling under do(I). Rows are generated in fixed-size chunks,
// each seeded from (seed, I, chunk), so output is independent of `threads`.
SampleBatch sample_interventional(const Smbn& m, const Intervention& I, std::size_t count, std::uint64_t seed,
                                  int threads = 1);

// Atom index (row-major over S) of every sample.
std::vector<int> encode_atoms(const SampleBatch& batch, const VertexSet& S, int K);

// Empirical distribution of the S-coordinates.
DiscreteDist empirical_marginal(const SampleBatch& batch, const VertexSet& S, int K);

// Exact marginal onto S (order of S is kept; S must be inside support).
DiscreteDist marginalize(const DiscreteDist& dist, const std::vector<Vertex>& S);

// P[s | do(v \ s)] for the S-part of the full assignment `values`, computed
// from the CPTs of S and the hidden variables touching S.
double local_probability(const Smbn& m, const VertexSet& S, std::span<const int> values);

// TV( P[S | do(d)], P[S | do(pa(S))] ) <= tol, with pa(S) read off d.
bool truncation_check(const Smbn& m, const VertexSet& S, const VertexSet& D, std::span<const int> d_assign,
                      double tol, EnumLimits limits = {});

// P[V\T | do(t)] rebuilt as the product over c-components S_i of G[V\T] of
// P[s_i | do(v \ s_i)].
DiscreteDist c_component_factorization(const Smbn& m, const VertexSet& T, std::span<const int> t_assign,
                                       EnumLimits limits = {});

// Exhaustive check of the conditional-independence identity for the i-th
// (1-based, topological) vertex of c-component C of G[V\T], over every
// assignment of T, D and the first i vertices of C.
bool independence_lemma_check(const Smbn& m, const VertexSet& T, const VertexSet& C, int i, const VertexSet& D,
                              double tol, EnumLimits limits = {});

// Symmetric Dirichlet(alpha) draw of length K.
std::vector<double> dirichlet(rng::Engine& eng, int K, double alpha);

// Random model over g: every CPT row and hidden prior ~ Dirichlet(alpha).
Smbn random_smbn(const Smcg& g, rng::Engine& eng, double alpha = 1.0);

} // namespace cbnt
