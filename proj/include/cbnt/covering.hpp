#pragma once

// Covering intervention sets: families in which every subset S of every
// c-component, under every parent assignment, is witnessed by an
// intervention that leaves S free and clamps Pa(S) to that assignment.

#include <cbnt/cbn.hpp>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace cbnt {

enum class Construction { Randomized, Resampled, Explicit };

std::string_view to_string(Construction c);
Construction construction_from_string(std::string_view s);

struct CoveringSet {
    std::vector<Intervention> interventions;
    GraphClassParams params;
    int n = 0;
    int K = 2;
    double target_delta = 0.0;
    std::uint64_t seed = 0;
    Construction construction = Construction::Explicit;

    std::size_t size() const { return interventions.size(); }
};

// One (S, pa(S)) requirement. pa holds values for pa_vertices, ascending.
struct LocalPair {
    VertexSet S;
    VertexSet pa_vertices;
    std::vector<int> pa;
    friend bool operator==(const LocalPair&, const LocalPair&) = default;
};

// Nonempty subsets of every c-component, components by minimum vertex and
// subsets by bitmask over the sorted members.
std::vector<VertexSet> local_subsets(const Smcg& g);

// I frees every vertex of S and sets Pa(S) to pa.
bool covers(const Intervention& I, const VertexSet& S, const VertexSet& pa_vertices, std::span<const int> pa);

// ceil(K^{ld} * max(3d,1)^l * (ln n + 2 l d ln K + ln(1/delta))).
std::uint64_t randomized_size(int n, int K, int d, int l, double delta);
// ceil(K^{ld} * (3d)^l * (l d^2 + l d ln K + 2)), d >= 1.
std::uint64_t resampled_size(int K, int d, int l);

// Each vertex free with probability 1/(d+1), else set uniformly.
CoveringSet build_randomized(const Smcg& g, double delta, std::uint64_t seed);
CoveringSet build_randomized(int n, int K, int d, int l, double delta, std::uint64_t seed);

struct ResampleOptions {
    std::size_t round_budget = 1'000'000;
    // Filled with the number of resampling rounds performed.
    std::size_t* rounds = nullptr;
    // Family size; 0 uses resampled_size().
    std::size_t family_size = 0;
};

// Random family of resampled_size() interventions repaired by resampling the
// columns of Pa(S) and S while some (S, pa) is uncovered. d is the max total
// degree, clamped to >= 1.
CoveringSet build_resampled(const Smcg& g, std::uint64_t seed, ResampleOptions options = {});

// First uncovered pair in local_subsets() order (pa in row-major order).
std::optional<LocalPair> verify_covering(const Smcg& g, const CoveringSet& cs, EnumLimits limits = {});

// Number of (S, pa) requirements: sum over subsets of K^{|Pa(S)|}.
std::uint64_t requirement_count(const Smcg& g);

} // namespace cbnt
