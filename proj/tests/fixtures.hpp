#pragma once

#include <cbnt/cbn.hpp>

#include <vector>

namespace fixture {

using namespace cbnt;

// Single binary vertex with P[V = 1] = p.
inline Smbn bernoulli(double p) {
    Smcg g(1, Alphabet{2}, {}, {});
    Cpt c = cpt_skeleton(g, 0);
    c.table = {1.0 - p, p};
    return Smbn(g, {}, {c});
}

// A <-> B with U ~ Bern(0.5) and A = B = U.
inline Smbn copy_pair() {
    Smcg g(2, Alphabet{2}, {}, {{0, 1}});
    std::vector<Cpt> cpts;
    for (int v = 0; v < 2; ++v) {
        Cpt c = cpt_skeleton(g, v);
        c.table = {1.0, 0.0, 0.0, 1.0};
        cpts.push_back(c);
    }
    return Smbn(g, {{0.5, 0.5}}, cpts);
}

// X -> Y with P[X=1] = px and P[Y=1 | X=x] = py[x].
inline Smbn chain2(double px, double py0, double py1) {
    Smcg g(2, Alphabet{2}, {{0, 1}}, {});
    Cpt x = cpt_skeleton(g, 0), y = cpt_skeleton(g, 1);
    x.table = {1 - px, px};
    y.table = {1 - py0, py0, 1 - py1, py1};
    return Smbn(g, {}, {x, y});
}

inline Smbn random_model(int n, int d, int l, int K, rng::Engine& eng, double alpha = 1.0) {
    return random_smbn(random_graph(n, d, l, {K}, eng), eng, alpha);
}

inline Intervention random_intervention(int n, int K, rng::Engine& eng) {
    Intervention I(n);
    for (int v = 0; v < n; ++v)
        if (rng::uniform_below(eng, 2)) I.set(v, static_cast<int>(rng::uniform_below(eng, K)));
    return I;
}

} // namespace fixture
