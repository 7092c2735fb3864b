#pragma once

// Semi-Markovian causal graphs: a DAG over observable vertices plus
// bidirected edges, each standing for a hidden root with exactly two
// observable children.

#include <cbnt/error.hpp>
#include <cbnt/rng.hpp>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace cbnt {

using Vertex = int;
// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

struct Alphabet {
    int size = 2;
};

struct DirectedEdge {
    Vertex from;
    Vertex to;
    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

// Stored with first < second.
struct BidirectedEdge {
    Vertex first;
    Vertex second;
    friend bool operator==(const BidirectedEdge&, const BidirectedEdge&) = default;
    friend auto operator<=>(const BidirectedEdge&, const BidirectedEdge&) = default;
};

struct GraphClassParams {
    int d = 0; // max observable in-degree
    int l = 0; // max c-component size
    friend bool operator==(const GraphClassParams&, const GraphClassParams&) = default;
};

class Smcg {
public:
    Smcg() = default;

    // Vertex ids must lie in [0, n); throws VertexOutOfRange otherwise.
    // Bidirected pairs are normalized and deduplicated; self-loops, cycles and
    // repeated directed edges are kept so that validate() can report them.
    Smcg(int n, Alphabet alphabet, std::vector<DirectedEdge> directed,
         std::vector<std::pair<Vertex, Vertex>> bidirected);

    int n() const { return n_; }
    int K() const { return alphabet_.size; }
    Alphabet alphabet() const { return alphabet_; }

    const std::vector<DirectedEdge>& directed() const { return directed_; }
    const std::vector<BidirectedEdge>& bidirected() const { return bidirected_; }

    const VertexSet& parents(Vertex v) const { return parents_[v]; }
    const VertexSet& children(Vertex v) const { return children_[v]; }
    // Vertices sharing a bidirected edge with v.
    const VertexSet& spouses(Vertex v) const { return spouses_[v]; }
    // Indices into bidirected() of the edges incident to v, ascending.
    const std::vector<int>& hidden_edges(Vertex v) const { return hidden_of_[v]; }

    bool has_directed(Vertex from, Vertex to) const;
    bool has_bidirected(Vertex a, Vertex b) const;

    friend bool operator==(const Smcg& a, const Smcg& b) {
        return a.n_ == b.n_ && a.alphabet_.size == b.alphabet_.size && a.directed_ == b.directed_ &&
               a.bidirected_ == b.bidirected_;
    }

private:
    int n_ = 0;
    Alphabet alphabet_{};
    std::vector<DirectedEdge> directed_;
    std::vector<BidirectedEdge> bidirected_;
    std::vector<VertexSet> parents_;
    std::vector<VertexSet> children_;
    std::vector<VertexSet> spouses_;
    std::vector<std::vector<int>> hidden_of_;
};

// First violated invariant, or nullopt when g is a valid SMCG.
std::optional<Error> validate(const Smcg& g);
// Throws the first violated invariant.
void require_valid(const Smcg& g);

// Kahn's algorithm, smallest ready vertex first.
std::vector<Vertex> topological_order(const Smcg& g);

// Connected components of the bidirected graph induced on `subset`, each
// sorted, ordered by minimum vertex.
std::vector<VertexSet> c_components(const Smcg& g, const VertexSet& subset);
std::vector<VertexSet> c_components(const Smcg& g);

// Observable parents / ancestors / descendants of X, excluding X itself.
VertexSet parents(const Smcg& g, const VertexSet& X);
VertexSet ancestors(const Smcg& g, const VertexSet& X);
VertexSet descendants(const Smcg& g, const VertexSet& X);

// d-separation on the graph with every bidirected edge expanded into a hidden
// fork node. Hidden forks are never conditioned on.
bool d_separated(const Smcg& g, const VertexSet& X, const VertexSet& Y, const VertexSet& Z);

GraphClassParams class_params(const Smcg& g);
// Max over observables of in-degree plus out-degree (directed edges only).
int max_total_degree(const Smcg& g);

// Causal graph with arbitrary hidden structure. Vertex ids are arbitrary
// distinct integers; observables map to SMCG vertices by their position in
// `observables`.
struct GeneralCausalGraph {
    std::vector<int> observables;
    std::vector<int> unobservables;
    std::vector<std::pair<int, int>> edges;
    Alphabet alphabet{};
};

// Three-step projection: keep observables; i -> j when i reaches j by an
// edge or a directed path through hidden vertices only; i <-> j when some
// hidden vertex reaches both through hidden vertices only.
Smcg project_to_smcg(const GeneralCausalGraph& h);

// c-components straight from the general-graph relation (shared hidden
// ancestor via hidden-only paths, closed transitively), in SMCG vertex ids.
std::vector<VertexSet> c_components(const GeneralCausalGraph& h);

// Each bidirected edge of g as a hidden fork U_e -> i, U_e -> j.
GeneralCausalGraph expand_hidden_forks(const Smcg& g);

// Generators.
Smcg chain_graph(int n, Alphabet alphabet);
// Vertices 0..n-2 all point to vertex n-1.
Smcg star_graph(int n, Alphabet alphabet);
// Random member of G_{d,l}: vertices in index order, each draws up to d
// parents uniformly among earlier vertices; vertices are grouped into random
// blocks of size <= l joined by a random bidirected spanning tree.
Smcg random_graph(int n, int d, int l, Alphabet alphabet, rng::Engine& eng);

// Set helpers.
VertexSet make_set(std::vector<Vertex> v);
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);
bool is_subset(const VertexSet& a, const VertexSet& b);
bool intersects(const VertexSet& a, const VertexSet& b);
VertexSet all_vertices(int n);

} // namespace cbnt
