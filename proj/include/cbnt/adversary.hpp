#pragma once

// Lower-bound fixtures: the XOR/XNOR model pair that only a covering
// intervention can tell apart, and the random bipartite hard graph.

#include <cbnt/cbn.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cbnt {

// Vertices 0..s-1 are the parents W_1..W_s, s..s+l-1 are C = V_1..V_l.
// W_i has the single child V_{1 + ((i-1) mod l)}.
struct AdversaryPair {
    Smcg graph;
    Smbn model_m;
    Smbn model_n;
    std::vector<int> secret_pa; // value of W_i
    int ell = 0;
    int s = 0;
    std::optional<std::uint64_t> tree_seed;

    VertexSet C() const;
    VertexSet W() const;
    // do(W = secret_pa) with C free.
    Intervention secret_intervention() const;
};

// Boolean construction. Bidirected edges on C form a path, or a uniformly
// random labelled tree when tree_seed is given. Throws BadDimensions.
AdversaryPair build_adversary_pair(int ell, int s, std::vector<int> secret_pa,
                                   std::optional<std::uint64_t> tree_seed = std::nullopt);

enum class AdversaryCase { Secret, Exposing, Violating };

std::string_view to_string(AdversaryCase c);

struct AdversaryCaseRecord {
    Intervention I;
    AdversaryCase kind = AdversaryCase::Violating;
    double tv = 0.0;
    bool uniform = true; // marginal over C \ T uniform (violating cases)
    bool ok = true;
};

struct AdversaryReport {
    bool ok = true;
    double secret_tv = 0.0;
    std::size_t interventions = 0;
    std::size_t violating = 0;
    std::vector<AdversaryCaseRecord> cases;
};

// Exhausts every do(t), T over all vertices. A free W_i is 0 with
// probability one, so the parent assignment seen by C is t on W ∩ T and 0
// elsewhere. Interventions that leave C free and expose secret_pa must give
// TV = 1; all others must give equal distributions, uniform on C \ T.
AdversaryReport verify_adversary_pair(const AdversaryPair& ap, double tol = 1e-12, EnumLimits limits = {});

// A_r = vertices 0..n-1, A_f = n..n+ld-3, then ceil(n/l) blocks B_i of l
// vertices joined by a bidirected path. Every A_f vertex points into each
// block; each pair (a in A_r, B_i) gets an edge a -> random member of B_i
// with probability 2/n. Throws BadDimensions unless ld >= 2 and n >= 1.
Smcg build_hard_graph(int n, int d, int l, std::uint64_t seed, Alphabet alphabet = {2});

} // namespace cbnt
