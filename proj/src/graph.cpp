#include <cbnt/graph.hpp>

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

namespace cbnt {

namespace {

std::string edge_str(Vertex a, Vertex b, const char* arrow) {
    std::ostringstream os;
    os << a << arrow << b;
    return os.str();
}

void check_vertex(int n, Vertex v) {
    if (v < 0 || v >= n)
        throw Error(ErrorCode::VertexOutOfRange,
                    "vertex " + std::to_string(v) + " not in [0, " + std::to_string(n) + ")");
}

void check_set(const Smcg& g, const VertexSet& X) {
    for (Vertex v : X) check_vertex(g.n(), v);
}

std::vector<char> membership(int n, const VertexSet& X) {
    std::vector<char> in(n, 0);
    for (Vertex v : X) in[v] = 1;
    return in;
}

VertexSet collect(const std::vector<char>& flags) {
    VertexSet out;
    for (int v = 0; v < static_cast<int>(flags.size()); ++v)
        if (flags[v]) out.push_back(v);
    return out;
}

// Union-find over small integer ranges.
struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::vector<VertexSet> group(const std::vector<Vertex>& members, Dsu& dsu) {
    std::vector<VertexSet> blocks;
    std::unordered_map<int, std::size_t> slot;
    for (Vertex v : members) {
        const int root = dsu.find(v);
        auto [it, fresh] = slot.try_emplace(root, blocks.size());
        if (fresh) blocks.emplace_back();
        blocks[it->second].push_back(v);
    }
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const VertexSet& a, const VertexSet& b) { return a.front() < b.front(); });
    return blocks;
}

} // namespace

Smcg::Smcg(int n, Alphabet alphabet, std::vector<DirectedEdge> directed,
           std::vector<std::pair<Vertex, Vertex>> bidirected)
    : n_(n), alphabet_(alphabet), directed_(std::move(directed)) {
    if (n < 0) throw Error(ErrorCode::BadDimensions, "negative vertex count");
    for (const auto& e : directed_) {
        check_vertex(n, e.from);
        check_vertex(n, e.to);
    }
    std::set<BidirectedEdge> unique;
    for (auto [a, b] : bidirected) {
        check_vertex(n, a);
        check_vertex(n, b);
        unique.insert(BidirectedEdge{std::min(a, b), std::max(a, b)});
    }
    bidirected_.assign(unique.begin(), unique.end());

    parents_.assign(n, {});
    children_.assign(n, {});
    spouses_.assign(n, {});
    hidden_of_.assign(n, {});
    for (const auto& e : directed_) {
        parents_[e.to].push_back(e.from);
        children_[e.from].push_back(e.to);
    }
    for (int idx = 0; idx < static_cast<int>(bidirected_.size()); ++idx) {
        const auto& e = bidirected_[idx];
        spouses_[e.first].push_back(e.second);
        spouses_[e.second].push_back(e.first);
        hidden_of_[e.first].push_back(idx);
        if (e.second != e.first) hidden_of_[e.second].push_back(idx);
    }
    auto tidy = [](VertexSet& s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    };
    for (int v = 0; v < n; ++v) {
        tidy(parents_[v]);
        tidy(children_[v]);
        tidy(spouses_[v]);
    }
}

bool Smcg::has_directed(Vertex from, Vertex to) const {
    const auto& p = parents_.at(to);
    return std::binary_search(p.begin(), p.end(), from);
}

bool Smcg::has_bidirected(Vertex a, Vertex b) const {
    const auto& s = spouses_.at(a);
    return std::binary_search(s.begin(), s.end(), b);
}

std::optional<Error> validate(const Smcg& g) {
    if (g.K() < 2) return Error(ErrorCode::InvalidAlphabet, "alphabet size must be >= 2");
    std::set<std::pair<Vertex, Vertex>> seen;
    for (const auto& e : g.directed()) {
        if (e.from == e.to) return Error(ErrorCode::SelfLoop, edge_str(e.from, e.to, "->"));
        if (!seen.insert({e.from, e.to}).second)
            return Error(ErrorCode::DuplicateEdge, edge_str(e.from, e.to, "->"));
    }
    for (const auto& e : g.bidirected())
        if (e.first == e.second) return Error(ErrorCode::SelfLoop, edge_str(e.first, e.second, "<->"));

    std::vector<int> indegree(g.n());
    for (int v = 0; v < g.n(); ++v) indegree[v] = static_cast<int>(g.parents(v).size());
    std::vector<Vertex> ready;
    for (int v = 0; v < g.n(); ++v)
        if (indegree[v] == 0) ready.push_back(v);
    int visited = 0;
    while (!ready.empty()) {
        const Vertex v = ready.back();
        ready.pop_back();
        ++visited;
        for (Vertex c : g.children(v))
            if (--indegree[c] == 0) ready.push_back(c);
    }
    if (visited != g.n()) {
        for (int v = 0; v < g.n(); ++v)
            if (indegree[v] > 0)
                return Error(ErrorCode::CycleDetected, "vertex " + std::to_string(v) + " lies on a cycle");
    }
    return std::nullopt;
}

void require_valid(const Smcg& g) {
    if (auto err = validate(g)) throw *err;
}

std::vector<Vertex> topological_order(const Smcg& g) {
    std::vector<int> indegree(g.n());
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
    for (int v = 0; v < g.n(); ++v) {
        indegree[v] = static_cast<int>(g.parents(v).size());
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<Vertex> order;
    order.reserve(g.n());
    while (!ready.empty()) {
        const Vertex v = ready.top();
        ready.pop();
        order.push_back(v);
        for (Vertex c : g.children(v))
            if (--indegree[c] == 0) ready.push(c);
    }
    return order;
}

std::vector<VertexSet> c_components(const Smcg& g, const VertexSet& subset) {
    check_set(g, subset);
    const auto in = membership(g.n(), subset);
    Dsu dsu(g.n());
    for (const auto& e : g.bidirected())
        if (in[e.first] && in[e.second]) dsu.unite(e.first, e.second);
    return group(make_set(subset), dsu);
}

std::vector<VertexSet> c_components(const Smcg& g) { return c_components(g, all_vertices(g.n())); }

VertexSet parents(const Smcg& g, const VertexSet& X) {
    check_set(g, X);
    const auto in = membership(g.n(), X);
    std::vector<char> out(g.n(), 0);
    for (Vertex v : X)
        for (Vertex p : g.parents(v))
            if (!in[p]) out[p] = 1;
    return collect(out);
}

namespace {

VertexSet reach(const Smcg& g, const VertexSet& X, bool upward) {
    check_set(g, X);
    std::vector<char> seen(g.n(), 0);
    std::deque<Vertex> queue(X.begin(), X.end());
    const auto in = membership(g.n(), X);
    while (!queue.empty()) {
        const Vertex v = queue.front();
        queue.pop_front();
        for (Vertex w : upward ? g.parents(v) : g.children(v)) {
            if (!seen[w]) {
                seen[w] = 1;
                queue.push_back(w);
            }
        }
    }
    for (int v = 0; v < g.n(); ++v)
        if (in[v]) seen[v] = 0;
    return collect(seen);
}

} // namespace

VertexSet ancestors(const Smcg& g, const VertexSet& X) { return reach(g, X, true); }
VertexSet descendants(const Smcg& g, const VertexSet& X) { return reach(g, X, false); }

bool d_separated(const Smcg& g, const VertexSet& X, const VertexSet& Y, const VertexSet& Z) {
    check_set(g, X);
    check_set(g, Y);
    check_set(g, Z);
    if (intersects(X, Y) || intersects(X, Z) || intersects(Y, Z))
        throw Error(ErrorCode::SetsOverlap, "X, Y and Z must be pairwise disjoint");

    // Expanded graph: observables 0..n-1, hidden fork n+e for bidirected edge e.
    const int n = g.n();
    const int total = n + static_cast<int>(g.bidirected().size());
    std::vector<std::vector<int>> par(total), chi(total);
    for (const auto& e : g.directed()) {
        par[e.to].push_back(e.from);
        chi[e.from].push_back(e.to);
    }
    for (int idx = 0; idx < static_cast<int>(g.bidirected().size()); ++idx) {
        const auto& e = g.bidirected()[idx];
        const int h = n + idx;
        chi[h] = {e.first, e.second};
        par[e.first].push_back(h);
        par[e.second].push_back(h);
    }

    std::vector<char> in_z(total, 0), anc_z(total, 0);
    for (Vertex z : Z) in_z[z] = 1;
    // Z together with its ancestors: colliders open iff in this set.
    std::deque<int> queue(Z.begin(), Z.end());
    for (Vertex z : Z) anc_z[z] = 1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int p : par[v])
            if (!anc_z[p]) {
                anc_z[p] = 1;
                queue.push_back(p);
            }
    }

    // Reachability over (node, arrived-from-child?) states.
    std::vector<char> in_y(total, 0);
    for (Vertex y : Y) in_y[y] = 1;
    std::vector<std::array<char, 2>> visited(total, {0, 0});
    std::deque<std::pair<int, int>> frontier; // dir 0: came from a child (moving up), 1: from a parent
    for (Vertex x : X) frontier.emplace_back(x, 0);
    while (!frontier.empty()) {
        auto [v, dir] = frontier.front();
        frontier.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = 1;
        if (in_y[v]) return false;
        if (dir == 0) {
            if (in_z[v]) continue;
            for (int p : par[v]) frontier.emplace_back(p, 0);
            for (int c : chi[v]) frontier.emplace_back(c, 1);
        } else {
            if (!in_z[v])
                for (int c : chi[v]) frontier.emplace_back(c, 1);
            if (anc_z[v])
                for (int p : par[v]) frontier.emplace_back(p, 0);
        }
    }
    return true;
}

GraphClassParams class_params(const Smcg& g) {
    GraphClassParams params;
    for (int v = 0; v < g.n(); ++v) params.d = std::max(params.d, static_cast<int>(g.parents(v).size()));
    for (const auto& c : c_components(g)) params.l = std::max(params.l, static_cast<int>(c.size()));
    return params;
}

int max_total_degree(const Smcg& g) {
    int best = 0;
    for (int v = 0; v < g.n(); ++v)
        best = std::max(best, static_cast<int>(g.parents(v).size() + g.children(v).size()));
    return best;
}

namespace {

struct IndexedGeneral {
    int size = 0;
    std::vector<char> hidden;
    std::vector<std::vector<int>> children;
    std::vector<int> smcg_id; // -1 for hidden vertices
};

IndexedGeneral index_general(const GeneralCausalGraph& h) {
    std::unordered_map<int, int> slot;
    IndexedGeneral out;
    auto add = [&](int id, bool hidden) {
        if (!slot.try_emplace(id, out.size).second)
            throw Error(ErrorCode::DuplicateEdge, "vertex id " + std::to_string(id) + " listed twice");
        out.hidden.push_back(hidden ? 1 : 0);
        out.smcg_id.push_back(hidden ? -1 : out.size);
        ++out.size;
    };
    for (int v : h.observables) add(v, false);
    for (int v : h.unobservables) add(v, true);
    out.children.assign(out.size, {});
    for (auto [a, b] : h.edges) {
        auto ia = slot.find(a), ib = slot.find(b);
        if (ia == slot.end() || ib == slot.end())
            throw Error(ErrorCode::VertexOutOfRange, "edge references unknown vertex");
        if (ia->second == ib->second) throw Error(ErrorCode::SelfLoop, "self-loop on " + std::to_string(a));
        out.children[ia->second].push_back(ib->second);
    }
    // Acyclicity of the union graph.
    std::vector<int> indeg(out.size, 0);
    for (const auto& cs : out.children)
        for (int c : cs) ++indeg[c];
    std::vector<int> ready;
    for (int v = 0; v < out.size; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    int visited = 0;
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        ++visited;
        for (int c : out.children[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (visited != out.size) throw Error(ErrorCode::CycleDetected, "general causal graph has a cycle");
    return out;
}

// Observables reachable from `start` by a directed path whose intermediate
// vertices are all hidden.
std::vector<int> hidden_reach(const IndexedGeneral& ix, int start) {
    std::vector<char> seen(ix.size, 0);
    std::vector<int> stack{start};
    std::vector<int> found;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int c : ix.children[v]) {
            if (seen[c]) continue;
            seen[c] = 1;
            if (ix.hidden[c])
                stack.push_back(c);
            else
                found.push_back(ix.smcg_id[c]);
        }
    }
    std::sort(found.begin(), found.end());
    return found;
}

} // namespace

Smcg project_to_smcg(const GeneralCausalGraph& h) {
    const auto ix = index_general(h);
    const int n = static_cast<int>(h.observables.size());
    std::vector<DirectedEdge> directed;
    std::vector<std::pair<Vertex, Vertex>> bidirected;
    for (int v = 0; v < ix.size; ++v) {
        const auto targets = hidden_reach(ix, v);
        if (!ix.hidden[v]) {
            for (int t : targets) directed.push_back({ix.smcg_id[v], t});
        } else {
            for (std::size_t a = 0; a < targets.size(); ++a)
                for (std::size_t b = a + 1; b < targets.size(); ++b) bidirected.emplace_back(targets[a], targets[b]);
        }
    }
    std::sort(directed.begin(), directed.end(),
              [](const DirectedEdge& a, const DirectedEdge& b) { return std::pair(a.from, a.to) < std::pair(b.from, b.to); });
    Smcg g(n, h.alphabet, std::move(directed), std::move(bidirected));
    require_valid(g);
    return g;
}

std::vector<VertexSet> c_components(const GeneralCausalGraph& h) {
    const auto ix = index_general(h);
    const int n = static_cast<int>(h.observables.size());
    Dsu dsu(n);
    for (int v = n; v < ix.size; ++v) {
        // Observables with a hidden-only directed path from hidden vertex v.
        std::vector<char> seen(ix.size, 0);
        std::deque<int> queue{v};
        int anchor = -1;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int c : ix.children[u]) {
                if (seen[c]) continue;
                seen[c] = 1;
                if (ix.hidden[c]) {
                    queue.push_back(c);
                } else if (anchor < 0) {
                    anchor = c;
                } else {
                    dsu.unite(anchor, c);
                }
            }
        }
    }
    return group(all_vertices(n), dsu);
}

GeneralCausalGraph expand_hidden_forks(const Smcg& g) {
    GeneralCausalGraph h;
    h.alphabet = g.alphabet();
    h.observables = all_vertices(g.n());
    for (const auto& e : g.directed()) h.edges.emplace_back(e.from, e.to);
    for (int idx = 0; idx < static_cast<int>(g.bidirected().size()); ++idx) {
        const int u = g.n() + idx;
        h.unobservables.push_back(u);
        h.edges.emplace_back(u, g.bidirected()[idx].first);
        h.edges.emplace_back(u, g.bidirected()[idx].second);
    }
    return h;
}

Smcg chain_graph(int n, Alphabet alphabet) {
    std::vector<DirectedEdge> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
    return Smcg(n, alphabet, std::move(edges), {});
}

Smcg star_graph(int n, Alphabet alphabet) {
    std::vector<DirectedEdge> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, n - 1});
    return Smcg(n, alphabet, std::move(edges), {});
}

Smcg random_graph(int n, int d, int l, Alphabet alphabet, rng::Engine& eng) {
    if (n < 0 || d < 0 || l < 1) throw Error(ErrorCode::BadDimensions, "random_graph needs n >= 0, d >= 0, l >= 1");
    std::vector<Vertex> label(n);
    std::iota(label.begin(), label.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(label[i], label[rng::uniform_below(eng, i + 1)]);

    std::vector<DirectedEdge> directed;
    for (int pos = 1; pos < n; ++pos) {
        const int count = static_cast<int>(rng::uniform_below(eng, std::min(d, pos) + 1));
        std::vector<int> pool(pos);
        std::iota(pool.begin(), pool.end(), 0);
        for (int k = 0; k < count; ++k) {
            const auto pick = k + rng::uniform_below(eng, pos - k);
            std::swap(pool[k], pool[pick]);
            directed.push_back({label[pool[k]], label[pos]});
        }
    }
    std::vector<std::pair<Vertex, Vertex>> bidirected;
    for (int start = 0; start < n;) {
        const int size = std::min<int>(n - start, 1 + static_cast<int>(rng::uniform_below(eng, l)));
        for (int k = 1; k < size; ++k) {
            const int other = start + static_cast<int>(rng::uniform_below(eng, k));
            bidirected.emplace_back(label[start + k], label[other]);
        }
        start += size;
    }
    std::sort(directed.begin(), directed.end(),
              [](const DirectedEdge& a, const DirectedEdge& b) { return std::pair(a.from, a.to) < std::pair(b.from, b.to); });
    return Smcg(n, alphabet, std::move(directed), std::move(bidirected));
}

VertexSet make_set(std::vector<Vertex> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool is_subset(const VertexSet& a, const VertexSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

bool intersects(const VertexSet& a, const VertexSet& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j)
            ++i;
        else
            ++j;
    }
    return false;
}

VertexSet all_vertices(int n) {
    VertexSet out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

} // namespace cbnt
