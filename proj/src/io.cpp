#include <cbnt/io.hpp>

#include <fstream>
#include <sstream>

namespace cbnt::io {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        parse_fail(std::string(what) + ": " + e.what());
    }
}

std::string join(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

int parse_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        parse_fail("not an integer: '" + s + "'");
    }
    if (used != s.size()) parse_fail("not an integer: '" + s + "'");
    return v;
}

std::vector<int> split_ints(const std::string& s) {
    std::vector<int> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_int(part));
    if (s.back() == ',') parse_fail("trailing comma in '" + s + "'");
    return out;
}

} // namespace

json to_json(const Smcg& g) {
    json directed = json::array(), bidirected = json::array();
    for (const auto& e : g.directed()) directed.push_back({e.from, e.to});
    for (const auto& e : g.bidirected()) bidirected.push_back({e.first, e.second});
    return {{"n", g.n()}, {"K", g.K()}, {"directed", directed}, {"bidirected", bidirected}};
}

Smcg graph_from_json(const json& j) {
    return guarded("graph", [&] {
        std::vector<DirectedEdge> directed;
        std::vector<std::pair<Vertex, Vertex>> bidirected;
        for (const auto& e : j.at("directed")) directed.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        for (const auto& e : j.at("bidirected")) bidirected.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        Smcg g(j.at("n").get<int>(), Alphabet{j.at("K").get<int>()}, std::move(directed), std::move(bidirected));
        require_valid(g);
        return g;
    });
}

GeneralCausalGraph general_graph_from_json(const json& j) {
    return guarded("general graph", [&] {
        GeneralCausalGraph h;
        h.observables = j.at("observables").get<std::vector<int>>();
        h.unobservables = j.value("unobservables", std::vector<int>{});
        for (const auto& e : j.at("edges")) h.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        h.alphabet = Alphabet{j.value("K", 2)};
        return h;
    });
}

json to_json(const Smbn& m) {
    const int K = m.K();
    json priors = json::object();
    for (std::size_t e = 0; e < m.hidden_count(); ++e) priors[std::to_string(e)] = m.hidden_prior(static_cast<int>(e));
    json cpts = json::object();
    for (int v = 0; v < m.n(); ++v) {
        const Cpt& c = m.cpt(v);
        const int digits = static_cast<int>(c.parents.size() + c.hidden.size());
        json rows = json::object();
        for (std::size_t r = 0; r < c.rows(K); ++r) {
            const auto row = c.row(r, K);
            rows[join(decode(r, digits, K))] = std::vector<double>(row.begin(), row.end());
        }
        cpts[std::to_string(v)] = rows;
    }
    return {{"graph", to_json(m.graph())}, {"hidden_priors", priors}, {"cpts", cpts}};
}

Smbn model_from_json(const json& j) {
    return guarded("model", [&] {
        Smcg g = graph_from_json(j.at("graph"));
        const int K = g.K();
        std::vector<std::vector<double>> priors(g.bidirected().size());
        for (std::size_t e = 0; e < priors.size(); ++e)
            priors[e] = j.at("hidden_priors").at(std::to_string(e)).get<std::vector<double>>();
        std::vector<Cpt> cpts;
        for (int v = 0; v < g.n(); ++v) {
            const auto& cj = j.at("cpts").at(std::to_string(v));
            Cpt c = cpt_skeleton(g, v);
            const int digits = static_cast<int>(c.parents.size() + c.hidden.size());
            const auto rows = checked_pow(K, digits);
            const auto& rj = cj;
            if (rj.size() != rows) throw Error(ErrorCode::InvalidModel, "cpt " + std::to_string(v) + ": wrong row count");
            c.table.resize(rows * static_cast<std::size_t>(K));
            for (const auto& [key, val] : rj.items()) {
                const auto idx = split_ints(key);
                if (static_cast<int>(idx.size()) != digits)
                    throw Error(ErrorCode::InvalidModel, "cpt " + std::to_string(v) + ": bad row key '" + key + "'");
                for (int x : idx)
                    if (x < 0 || x >= K) throw Error(ErrorCode::InvalidModel, "row key value outside alphabet");
                const auto probs = val.get<std::vector<double>>();
                if (static_cast<int>(probs.size()) != K)
                    throw Error(ErrorCode::InvalidModel, "cpt " + std::to_string(v) + ": row of wrong length");
                std::copy(probs.begin(), probs.end(), c.row(encode(idx, K), K).begin());
            }
            cpts.push_back(std::move(c));
        }
        return Smbn(std::move(g), std::move(priors), std::move(cpts));
    });
}

json to_json(const Intervention& I) {
    json j = json::object();
    for (int v = 0; v < I.n(); ++v)
        if (I.is_set(v)) j[std::to_string(v)] = I.value(v);
    return j;
}

json to_json(const CoveringSet& cs) {
    json list = json::array();
    for (const auto& I : cs.interventions) list.push_back(to_json(I));
    return {{"interventions", list},
            {"metadata",
             {{"n", cs.n},
              {"K", cs.K},
              {"d", cs.params.d},
              {"l", cs.params.l},
              {"delta", cs.target_delta},
              {"seed", cs.seed},
              {"construction", std::string(to_string(cs.construction))}}}};
}

CoveringSet cover_from_json(const json& j) {
    return guarded("cover", [&] {
        CoveringSet cs;
        const auto& meta = j.at("metadata");
        cs.n = meta.at("n").get<int>();
        cs.K = meta.at("K").get<int>();
        cs.params = {meta.value("d", 0), meta.value("l", 0)};
        cs.target_delta = meta.value("delta", 0.0);
        cs.seed = meta.value("seed", std::uint64_t{0});
        cs.construction = construction_from_string(meta.value("construction", std::string("explicit")));
        for (const auto& ij : j.at("interventions")) {
            Intervention I(cs.n);
            for (const auto& [key, val] : ij.items()) {
                const int v = parse_int(key);
                if (v < 0 || v >= cs.n) throw Error(ErrorCode::VertexOutOfRange, "vertex " + key);
                const int x = val.get<int>();
                if (x < 0 || x >= cs.K) parse_fail("value outside alphabet for vertex " + key);
                I.set(v, x);
            }
            cs.interventions.push_back(std::move(I));
        }
        return cs;
    });
}

json to_json(const DiscreteDist& d) { return {{"support", d.support}, {"K", d.K}, {"probs", d.probs}}; }

namespace {

std::string decision_name(Decision d) { return d == Decision::Far ? "far" : "equal"; }

} // namespace

json to_json(const TestReport& r) {
    json subtests = json::array();
    for (const auto& s : r.subtests)
        subtests.push_back({{"S", s.S},
                            {"pa_vertices", s.pa_vertices},
                            {"pa", s.pa},
                            {"witness", s.witness},
                            {"statistic", s.statistic},
                            {"threshold", s.threshold},
                            {"verdict", decision_name(s.verdict)},
                            {"samples", s.samples}});
    return {{"decision", decision_name(r.decision)},
            {"interventions_used", r.interventions_used},
            {"total_samples", r.total_samples},
            {"seed", r.seed},
            {"params",
             {{"n", r.n},
              {"K", r.K},
              {"d", r.d},
              {"l", r.l},
              {"eps", r.eps},
              {"eps2_threshold", r.eps2_threshold},
              {"delta_sub", r.delta_sub},
              {"budget", r.budget},
              {"cover_size", r.cover_size},
              {"planned_subtests", r.planned_subtests}}},
            {"subtests", subtests}};
}

json to_json(const LearnedOracle& o) {
    json locals = json::array();
    for (const auto& [key, dist] : o.locals)
        locals.push_back({{"S", key.first}, {"pa", key.second}, {"probs", dist.probs}});
    return {{"graph", to_json(o.graph)}, {"locals", locals}};
}

LearnedOracle oracle_from_json(const json& j) {
    return guarded("oracle", [&] {
        LearnedOracle o;
        o.graph = graph_from_json(j.at("graph"));
        for (const auto& lj : j.at("locals")) {
            auto S = lj.at("S").get<VertexSet>();
            auto pa = lj.at("pa").get<std::vector<int>>();
            for (Vertex v : S)
                if (v < 0 || v >= o.graph.n()) throw Error(ErrorCode::VertexOutOfRange, "oracle local vertex");
            if (pa.size() != parents(o.graph, S).size()) parse_fail("oracle local has wrong parent arity");
            DiscreteDist d(S, o.graph.K(), lj.at("probs").get<std::vector<double>>());
            o.locals.emplace(LocalKey{std::move(S), std::move(pa)}, std::move(d));
        }
        return o;
    });
}

json to_json(const AuditReport& r) {
    json j = {{"gamma_max", r.gamma_max},
              {"worst_joint_h2", r.worst_joint_h2},
              {"bound", r.bound},
              {"holds", r.holds},
              {"markovian", r.markovian},
              {"interventions", r.interventions}};
    if (r.markovian) {
        j["tight_bound"] = r.tight_bound;
        j["tight_holds"] = r.tight_holds;
    }
    return j;
}

json to_json(const AdversaryReport& r) {
    json cases = json::array();
    for (const auto& c : r.cases)
        cases.push_back({{"do", to_json(c.I)},
                         {"kind", std::string(to_string(c.kind))},
                         {"tv", c.tv},
                         {"uniform", c.uniform},
                         {"ok", c.ok}});
    return {{"ok", r.ok},
            {"secret_tv", r.secret_tv},
            {"interventions", r.interventions},
            {"violating", r.violating},
            {"cases", cases}};
}

Intervention parse_intervention(const std::string& text, int n, int K) {
    Intervention I(n);
    if (text.empty()) return I;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) parse_fail("expected vertex=value, got '" + part + "'");
        const int v = parse_int(part.substr(0, eq));
        const int x = parse_int(part.substr(eq + 1));
        if (v < 0 || v >= n) throw Error(ErrorCode::VertexOutOfRange, "vertex " + std::to_string(v));
        if (x < 0 || x >= K) parse_fail("value " + std::to_string(x) + " outside alphabet");
        if (I.is_set(v)) parse_fail("vertex " + std::to_string(v) + " assigned twice");
        I.set(v, x);
    }
    if (text.back() == ',') parse_fail("trailing comma in intervention");
    return I;
}

std::string format_intervention(const Intervention& I) {
    std::string out;
    for (int v = 0; v < I.n(); ++v) {
        if (!I.is_set(v)) continue;
        if (!out.empty()) out += ',';
        out += std::to_string(v) + "=" + std::to_string(I.value(v));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_fail("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
    out << contents;
}

json read_json(const std::string& path) {
    const auto text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        parse_fail("'" + path + "': " + e.what());
    }
}

void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::string samples_csv(const SampleBatch& batch) {
    std::string out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto row = batch.row(i);
        for (int v = 0; v < batch.n; ++v) {
            if (v) out += ',';
            out += std::to_string(row[v]);
        }
        out += '\n';
    }
    return out;
}

} // namespace cbnt::io
