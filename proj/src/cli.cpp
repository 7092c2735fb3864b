#include <cbnt/cli.hpp>
#include <cbnt/io.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace cbnt {

namespace {

using io::json;
namespace fs = std::filesystem;

std::string hex64(std::uint64_t h) {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

std::string file_hash(const std::string& path) { return hex64(rng::fnv1a(io::read_file(path))); }

struct Options {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string manifest;
    std::uint64_t max_enum = EnumLimits{}.max_cells;
    double eps = 0.3;
    double delta = 0.05;
    double base_constant = 5.0;
    double learn_constant = 2.0;
    std::string budget_mode = "per-target";
    std::size_t calibration_reps = 0;

    std::string graph, model, x, y, cover, oracle, pair, general, intervention;
    std::string kind = "random", construction = "randomized", secret;
    int n = 4, d = 1, l = 1, K = 2, ell = 2, s = 2;
    double alpha = 1.0;
    std::size_t count = 1000;
    std::uint64_t tree_seed = 0;
    bool has_tree_seed = false;
    bool partial_cover = false;
    std::string replay_path;
};

// Records inputs, outputs and verdicts of a run for its manifest.
struct Run {
    std::string command;
    std::vector<std::string> argv;
    json params = json::object();
    json inputs = json::array();
    json outputs = json::array();
    json verdicts = json::object();

    json read(const std::string& path) {
        auto j = io::read_json(path);
        inputs.push_back({{"path", path}, {"fnv1a64", file_hash(path)}});
        return j;
    }
    void write(const std::string& path, const std::string& contents) {
        io::write_file(path, contents);
        outputs.push_back({{"path", path}, {"fnv1a64", hex64(rng::fnv1a(contents))}});
    }
    void write(const std::string& path, const json& j) { write(path, j.dump(2) + "\n"); }
};

std::string default_out(const std::string& command) {
    if (command == "gen-graph" || command == "project") return "graph.json";
    if (command == "gen-model") return "model.json";
    if (command == "cover") return "cover.json";
    if (command == "cover-verify") return "cover_verify.json";
    if (command == "dist") return "dist.json";
    if (command == "sample") return "samples.csv";
    if (command == "learn") return "oracle.json";
    if (command == "query") return "query.json";
    if (command == "audit-subadditivity") return "audit.json";
    if (command == "adversary") return "adversary";
    if (command == "verify-adversary") return "adversary_ledger.json";
    return "report.json";
}

AlgoParams algo_params(const Options& o) {
    AlgoParams p;
    p.eps = o.eps;
    p.base_constant = o.base_constant;
    p.learn_constant = o.learn_constant;
    p.budget_mode = o.budget_mode == "aggregate" ? BudgetMode::Aggregate : BudgetMode::PerTarget;
    p.calibration_reps = o.calibration_reps;
    p.allow_partial_cover = o.partial_cover;
    p.threads = o.threads;
    return p;
}

json algo_params_json(const Options& o) {
    return {{"eps", o.eps},
            {"base_constant", o.base_constant},
            {"learn_constant", o.learn_constant},
            {"budget_mode", o.budget_mode},
            {"calibration_reps", o.calibration_reps}};
}

std::string verdict_name(Decision d) { return d == Decision::Far ? "far" : "equal"; }

int finish_test(Run& run, const Options& o, const TestReport& r, std::ostream& out) {
    run.write(o.out, io::to_json(r));
    run.verdicts["decision"] = verdict_name(r.decision);
    out << verdict_name(r.decision) << " (" << r.subtests.size() << " subtests, " << r.interventions_used
        << " interventions, " << r.total_samples << " samples)\n";
    return r.decision == Decision::Far ? 1 : 0;
}

int cmd_gen_graph(Run& run, const Options& o, std::ostream& out) {
    run.params = {{"kind", o.kind}, {"n", o.n}, {"d", o.d}, {"l", o.l}, {"K", o.K}};
    Smcg g;
    if (o.kind == "chain") {
        g = chain_graph(o.n, {o.K});
    } else if (o.kind == "star") {
        g = star_graph(o.n, {o.K});
    } else if (o.kind == "hard") {
        g = build_hard_graph(o.n, o.d, o.l, rng::derive(o.seed, "graph"), {o.K});
    } else {
        auto eng = rng::engine(rng::derive(o.seed, "graph"));
        g = random_graph(o.n, o.d, o.l, {o.K}, eng);
    }
    run.write(o.out, io::to_json(g));
    const auto cp = class_params(g);
    out << "graph n=" << g.n() << " d=" << cp.d << " l=" << cp.l << "\n";
    return 0;
}

int cmd_gen_model(Run& run, const Options& o, std::ostream& out) {
    run.params = {{"alpha", o.alpha}};
    const auto g = io::graph_from_json(run.read(o.graph));
    auto eng = rng::engine(rng::derive(o.seed, "model"));
    const auto m = random_smbn(g, eng, o.alpha);
    run.write(o.out, io::to_json(m));
    out << "model over " << g.n() << " vertices\n";
    return 0;
}

int cmd_project(Run& run, const Options& o, std::ostream& out) {
    const auto h = io::general_graph_from_json(run.read(o.general));
    const auto g = project_to_smcg(h);
    run.write(o.out, io::to_json(g));
    const bool agree = c_components(h) == c_components(g);
    run.verdicts["c_components_agree"] = agree;
    out << "projected " << g.n() << " observables; c-components " << (agree ? "agree" : "DIFFER") << "\n";
    return agree ? 0 : 1;
}

int report_cover(Run& run, const Smcg& g, const CoveringSet& cs, const Options& o, std::ostream& out) {
    const auto missing = verify_covering(g, cs, {o.max_enum});
    run.verdicts["covering"] = !missing;
    if (missing) {
        out << "missing S=" << json(missing->S).dump() << " pa=" << json(missing->pa).dump() << "\n";
        return 1;
    }
    out << "ok (" << cs.size() << " interventions)\n";
    return 0;
}

int cmd_cover(Run& run, const Options& o, std::ostream& out) {
    run.params = {{"delta", o.delta}, {"construction", o.construction}};
    const auto g = io::graph_from_json(run.read(o.graph));
    const auto cs = o.construction == "resampled" ? build_resampled(g, rng::derive(o.seed, "cover"))
                                                  : build_randomized(g, o.delta, rng::derive(o.seed, "cover"));
    run.write(o.out, io::to_json(cs));
    return report_cover(run, g, cs, o, out);
}

int cmd_cover_verify(Run& run, const Options& o, std::ostream& out) {
    const auto g = io::graph_from_json(run.read(o.graph));
    const auto cs = io::cover_from_json(run.read(o.cover));
    const auto missing = verify_covering(g, cs, {o.max_enum});
    json j = {{"ok", !missing}};
    if (missing) j["missing"] = {{"S", missing->S}, {"pa_vertices", missing->pa_vertices}, {"pa", missing->pa}};
    run.write(o.out, j);
    return report_cover(run, g, cs, o, out);
}

int cmd_dist(Run& run, const Options& o, std::ostream& out) {
    run.params = {{"do", o.intervention}};
    const auto m = io::model_from_json(run.read(o.model));
    const auto I = io::parse_intervention(o.intervention, m.n(), m.K());
    const auto d = exact_interventional(m, I, {o.max_enum});
    run.write(o.out, io::to_json(d));
    out << d.size() << " atoms over " << d.support.size() << " free vertices\n";
    return 0;
}

int cmd_sample(Run& run, const Options& o, std::ostream& out) {
    run.params = {{"do", o.intervention}, {"count", o.count}};
    const auto m = io::model_from_json(run.read(o.model));
    const auto I = io::parse_intervention(o.intervention, m.n(), m.K());
    const auto batch = sample_interventional(m, I, o.count, rng::derive(o.seed, "samples"), o.threads);
    run.write(o.out, io::samples_csv(batch));
    out << batch.size() << " samples\n";
    return 0;
}

const CoveringSet* load_cover(Run& run, const Options& o, CoveringSet& storage) {
    if (o.cover.empty()) return nullptr;
    storage = io::cover_from_json(run.read(o.cover));
    return &storage;
}

int cmd_c2st(Run& run, const Options& o, std::ostream& out) {
    run.params = algo_params_json(o);
    const auto mx = io::model_from_json(run.read(o.x));
    const auto my = io::model_from_json(run.read(o.y));
    const auto g = io::graph_from_json(run.read(o.graph));
    CoveringSet storage;
    const auto* cover = load_cover(run, o, storage);
    const auto r = c2st(SmbnSampler(mx), SmbnSampler(my), g, algo_params(o), o.seed, cover);
    return finish_test(run, o, r, out);
}

int cmd_cgft(Run& run, const Options& o, std::ostream& out) {
    run.params = algo_params_json(o);
    const auto m = io::model_from_json(run.read(o.model));
    const auto mx = io::model_from_json(run.read(o.x));
    const auto g = io::graph_from_json(run.read(o.graph));
    CoveringSet storage;
    const auto* cover = load_cover(run, o, storage);
    const auto r = cgft(m, SmbnSampler(mx), g, algo_params(o), o.seed, cover);
    return finish_test(run, o, r, out);
}

int cmd_c2st_unknown(Run& run, const Options& o, std::ostream& out) {
    run.params = algo_params_json(o);
    run.params["d"] = o.d;
    run.params["l"] = o.l;
    const auto mx = io::model_from_json(run.read(o.x));
    const auto my = io::model_from_json(run.read(o.y));
    const auto r = c2st_unknown_graph(SmbnSampler(mx), SmbnSampler(my), o.d, o.l, mx.K(), mx.n(), algo_params(o), o.seed);
    return finish_test(run, o, r, out);
}

int cmd_learn(Run& run, const Options& o, std::ostream& out) {
    run.params = algo_params_json(o);
    const auto mx = io::model_from_json(run.read(o.x));
    const auto g = io::graph_from_json(run.read(o.graph));
    CoveringSet storage;
    const auto* cover = load_cover(run, o, storage);
    const auto oracle = clp_learn(SmbnSampler(mx), g, algo_params(o), o.seed, cover);
    run.write(o.out, io::to_json(oracle));
    out << oracle.locals.size() << " local distributions learned\n";
    return 0;
}

int cmd_query(Run& run, const Options& o, std::ostream& out) {
    run.params = {{"do", o.intervention}};
    const auto oracle = io::oracle_from_json(run.read(o.oracle));
    const auto I = io::parse_intervention(o.intervention, oracle.graph.n(), oracle.graph.K());
    VertexSet T = I.targets();
    std::vector<int> t;
    for (Vertex v : T) t.push_back(I.value(v));
    const auto answer = oracle_query(oracle, T, t);
    run.write(o.out, json{{"dist", io::to_json(answer.dist)}, {"mass", answer.mass}});
    out << "mass before renormalization " << answer.mass << "\n";
    return 0;
}

int cmd_audit(Run& run, const Options& o, std::ostream& out) {
    const auto mx = io::model_from_json(run.read(o.x));
    const auto my = io::model_from_json(run.read(o.y));
    const auto r = subadditivity_audit(mx, my, {o.max_enum});
    run.write(o.out, io::to_json(r));
    const bool ok = r.holds && r.tight_holds;
    run.verdicts["holds"] = ok;
    out << (ok ? "holds" : "VIOLATED") << ": worst H2 " << r.worst_joint_h2 << " <= bound " << r.bound << "\n";
    return ok ? 0 : 1;
}

std::vector<int> parse_bits(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part != "0" && part != "1") throw Error(ErrorCode::ParseError, "secret must be comma-separated bits");
        out.push_back(part == "1");
    }
    return out;
}

int cmd_adversary(Run& run, const Options& o, std::ostream& out) {
    auto secret = o.secret.empty() ? std::vector<int>(o.s, 1) : parse_bits(o.secret);
    run.params = {{"ell", o.ell}, {"s", o.s}, {"secret", secret}};
    std::optional<std::uint64_t> tree_seed;
    if (o.has_tree_seed) tree_seed = o.tree_seed;
    const auto ap = build_adversary_pair(o.ell, o.s, secret, tree_seed);
    fs::create_directories(o.out);
    const fs::path dir(o.out);
    run.write((dir / "m.json").string(), io::to_json(ap.model_m));
    run.write((dir / "n.json").string(), io::to_json(ap.model_n));
    run.write((dir / "graph.json").string(), io::to_json(ap.graph));
    json meta = {{"ell", ap.ell}, {"s", ap.s}, {"secret_pa", ap.secret_pa}, {"C", ap.C()}, {"parents", ap.W()}};
    meta["tree_seed"] = tree_seed ? json(*tree_seed) : json(nullptr);
    run.write((dir / "meta.json").string(), meta);
    out << "adversary pair written to " << o.out << "\n";
    return 0;
}

int cmd_verify_adversary(Run& run, const Options& o, std::ostream& out) {
    const fs::path dir(o.pair);
    const auto meta = run.read((dir / "meta.json").string());
    const auto m = io::model_from_json(run.read((dir / "m.json").string()));
    const auto nm = io::model_from_json(run.read((dir / "n.json").string()));
    AdversaryPair ap;
    try {
        ap.ell = meta.at("ell").get<int>();
        ap.s = meta.at("s").get<int>();
        ap.secret_pa = meta.at("secret_pa").get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("meta.json: ") + e.what());
    }
    if (m.n() != ap.s + ap.ell || !(m.graph() == nm.graph()) || static_cast<int>(ap.secret_pa.size()) != ap.s)
        throw Error(ErrorCode::BadDimensions, "pair files disagree with meta.json");
    ap.graph = m.graph();
    ap.model_m = m;
    ap.model_n = nm;
    const auto r = verify_adversary_pair(ap, 1e-12, {o.max_enum});
    run.write(o.out, io::to_json(r));
    run.verdicts["ok"] = r.ok;
    out << "secret TV=" << r.secret_tv << "; " << r.interventions << " interventions, " << r.violating
        << " non-exposing; " << (r.ok ? "all assertions hold" : "ASSERTION FAILED") << "\n";
    return r.ok ? 0 : 1;
}

int dispatch(const std::string& command, Run& run, const Options& o, std::ostream& out) {
    if (command == "gen-graph") return cmd_gen_graph(run, o, out);
    if (command == "gen-model") return cmd_gen_model(run, o, out);
    if (command == "project") return cmd_project(run, o, out);
    if (command == "cover") return cmd_cover(run, o, out);
    if (command == "cover-verify") return cmd_cover_verify(run, o, out);
    if (command == "dist") return cmd_dist(run, o, out);
    if (command == "sample") return cmd_sample(run, o, out);
    if (command == "c2st") return cmd_c2st(run, o, out);
    if (command == "cgft") return cmd_cgft(run, o, out);
    if (command == "c2st-unknown") return cmd_c2st_unknown(run, o, out);
    if (command == "learn") return cmd_learn(run, o, out);
    if (command == "query") return cmd_query(run, o, out);
    if (command == "audit-subadditivity") return cmd_audit(run, o, out);
    if (command == "adversary") return cmd_adversary(run, o, out);
    if (command == "verify-adversary") return cmd_verify_adversary(run, o, out);
    throw Error(ErrorCode::PreconditionViolated, "unknown command " + command);
}

int cmd_replay(const std::string& path, std::ostream& out, std::ostream& err) {
    const auto manifest = io::read_json(path);
    std::vector<std::string> argv;
    try {
        for (const auto& in : manifest.at("inputs")) {
            const auto p = in.at("path").get<std::string>();
            if (!fs::exists(p) || file_hash(p) != in.at("fnv1a64").get<std::string>()) {
                err << "error: input '" << p << "' changed since the manifest was written\n";
                return 2;
            }
        }
        argv = manifest.at("argv").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("manifest: ") + e.what());
    }
    // Keep the original manifest intact.
    std::vector<std::string> args;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--manifest") {
            ++i;
            continue;
        }
        if (argv[i].rfind("--manifest=", 0) == 0) continue;
        args.push_back(argv[i]);
    }
    args.push_back("--manifest");
    args.push_back(path + ".replay.json");
    std::ostringstream sink;
    run_cli(args, sink, err);

    bool same = true;
    for (const auto& o : manifest.at("outputs")) {
        const auto p = o.at("path").get<std::string>();
        const bool match = fs::exists(p) && file_hash(p) == o.at("fnv1a64").get<std::string>();
        if (!match) err << "differs: " << p << "\n";
        same = same && match;
    }
    out << (same ? "replay: identical outputs\n" : "replay: outputs differ\n");
    return same ? 0 : 1;
}

void add_common(CLI::App* sub, Options& o, bool seeded) {
    sub->add_option("--out", o.out, "Output path");
    sub->add_option("--manifest", o.manifest, "Manifest path (default <out>.manifest.json)");
    sub->add_option("--max-enum", o.max_enum, "Enumeration guard in cells")->check(CLI::PositiveNumber);
    if (seeded) {
        sub->add_option("--seed", o.seed, "Root seed");
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1, 256));
    }
}

void add_test_options(CLI::App* sub, Options& o) {
    sub->add_option("--eps", o.eps, "Distance parameter")->check(CLI::Range(1e-9, 1.0));
    sub->add_option("--base-constant", o.base_constant, "Tester sample-size constant")->check(CLI::PositiveNumber);
    sub->add_option("--learn-constant", o.learn_constant, "Learner sample-size constant")->check(CLI::PositiveNumber);
    sub->add_option("--budget-mode", o.budget_mode, "per-target or aggregate")
        ->check(CLI::IsMember({"per-target", "aggregate"}));
    sub->add_option("--calibration-reps", o.calibration_reps, "Null calibration replicates (0 = auto)");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Testing and learning semi-Markovian causal Bayesian networks"};
    app.require_subcommand(1);
    Options o;

    auto* gen_graph = app.add_subcommand("gen-graph", "Generate a graph");
    add_common(gen_graph, o, true);
    gen_graph->add_option("--kind", o.kind, "random, chain, star or hard")
        ->check(CLI::IsMember({"random", "chain", "star", "hard"}));
    gen_graph->add_option("--n", o.n, "Vertex count (A_r size for hard)")->check(CLI::Range(1, 100000));
    gen_graph->add_option("--d", o.d, "In-degree bound")->check(CLI::Range(0, 64));
    gen_graph->add_option("--l", o.l, "c-component size bound")->check(CLI::Range(1, 64));
    gen_graph->add_option("--K", o.K, "Alphabet size")->check(CLI::Range(2, 64));

    auto* gen_model = app.add_subcommand("gen-model", "Random Dirichlet CPTs over a graph");
    add_common(gen_model, o, true);
    gen_model->add_option("--graph", o.graph, "Graph JSON")->required();
    gen_model->add_option("--alpha", o.alpha, "Dirichlet concentration")->check(CLI::PositiveNumber);

    auto* project = app.add_subcommand("project", "Project a general causal graph to an SMCG");
    add_common(project, o, false);
    project->add_option("--general", o.general, "General graph JSON")->required();

    auto* cover = app.add_subcommand("cover", "Build and verify a covering intervention set");
    add_common(cover, o, true);
    cover->add_option("--graph", o.graph, "Graph JSON")->required();
    cover->add_option("--delta", o.delta, "Failure probability")->check(CLI::Range(1e-12, 0.999999));
    cover->add_option("--construction", o.construction, "randomized or resampled")
        ->check(CLI::IsMember({"randomized", "resampled"}));

    auto* cover_verify = app.add_subcommand("cover-verify", "Verify a covering set");
    add_common(cover_verify, o, false);
    cover_verify->add_option("--graph", o.graph, "Graph JSON")->required();
    cover_verify->add_option("--cover", o.cover, "Covering set JSON")->required();

    auto* dist = app.add_subcommand("dist", "Exact interventional distribution");
    add_common(dist, o, false);
    dist->add_option("--model", o.model, "Model JSON")->required();
    dist->add_option("--do", o.intervention, "Intervention, e.g. 0=1,2=0");

    auto* sample = app.add_subcommand("sample", "Interventional samples as CSV");
    add_common(sample, o, true);
    sample->add_option("--model", o.model, "Model JSON")->required();
    sample->add_option("--do", o.intervention, "Intervention, e.g. 0=1,2=0");
    sample->add_option("--count", o.count, "Number of samples")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 32));

    auto* c2st_cmd = app.add_subcommand("c2st", "Two-sample test with a known graph");
    add_common(c2st_cmd, o, true);
    add_test_options(c2st_cmd, o);
    c2st_cmd->add_option("--x", o.x, "First model JSON")->required();
    c2st_cmd->add_option("--y", o.y, "Second model JSON")->required();
    c2st_cmd->add_option("--graph", o.graph, "Graph JSON")->required();
    c2st_cmd->add_option("--cover", o.cover, "Covering set JSON");
    c2st_cmd->add_flag("--partial-cover", o.partial_cover, "Skip pairs the covering set misses");

    auto* cgft_cmd = app.add_subcommand("cgft", "Goodness-of-fit test against a known model");
    add_common(cgft_cmd, o, true);
    add_test_options(cgft_cmd, o);
    cgft_cmd->add_option("--model", o.model, "Hypothesis model JSON")->required();
    cgft_cmd->add_option("--x", o.x, "Model under test JSON")->required();
    cgft_cmd->add_option("--graph", o.graph, "Graph JSON")->required();
    cgft_cmd->add_option("--cover", o.cover, "Covering set JSON");
    cgft_cmd->add_flag("--partial-cover", o.partial_cover, "Skip pairs the covering set misses");

    auto* unknown = app.add_subcommand("c2st-unknown", "Two-sample test without the graph");
    add_common(unknown, o, true);
    add_test_options(unknown, o);
    unknown->add_option("--x", o.x, "First model JSON")->required();
    unknown->add_option("--y", o.y, "Second model JSON")->required();
    unknown->add_option("--d", o.d, "In-degree bound")->required()->check(CLI::Range(0, 64));
    unknown->add_option("--l", o.l, "c-component size bound")->required()->check(CLI::Range(1, 64));

    auto* learn = app.add_subcommand("learn", "Learn an interventional oracle");
    add_common(learn, o, true);
    add_test_options(learn, o);
    learn->add_option("--x", o.x, "Model JSON to sample from")->required();
    learn->add_option("--graph", o.graph, "Graph JSON")->required();
    learn->add_option("--cover", o.cover, "Covering set JSON");

    auto* query = app.add_subcommand("query", "Query a learned oracle");
    add_common(query, o, false);
    query->add_option("--oracle", o.oracle, "Oracle JSON")->required();
    query->add_option("--do", o.intervention, "Intervention, e.g. 0=1,2=0");

    auto* audit = app.add_subcommand("audit-subadditivity", "Exact subadditivity audit of two models");
    add_common(audit, o, false);
    audit->add_option("--x", o.x, "First model JSON")->required();
    audit->add_option("--y", o.y, "Second model JSON")->required();

    auto* adversary = app.add_subcommand("adversary", "Emit an XOR/XNOR model pair");
    add_common(adversary, o, false);
    adversary->add_option("--ell", o.ell, "c-component size")->check(CLI::Range(1, 12));
    adversary->add_option("--s", o.s, "Parent count")->check(CLI::Range(1, 12));
    adversary->add_option("--secret", o.secret, "Secret parent bits, e.g. 1,0 (default all ones)");
    adversary->add_option("--tree-seed", o.tree_seed, "Random spanning tree seed")->each([&](const std::string&) {
        o.has_tree_seed = true;
    });

    auto* verify_adv = app.add_subcommand("verify-adversary", "Exhaustively verify an adversary pair");
    add_common(verify_adv, o, false);
    verify_adv->add_option("--pair", o.pair, "Directory written by adversary")->required();

    auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
    replay->add_option("manifest", o.replay_path, "Manifest JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        for (auto* sub : app.get_subcommands()) err << sub->help();
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "replay") return cmd_replay(o.replay_path, out, err);
        if (o.out.empty()) o.out = default_out(command);
        if (o.manifest.empty())
            o.manifest = command == "adversary" ? (fs::path(o.out) / "manifest.json").string() : o.out + ".manifest.json";

        Run run;
        run.command = command;
        run.argv = args;
        const auto start = std::chrono::steady_clock::now();
        const int code = dispatch(command, run, o, out);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json manifest = {{"command", command}, {"argv", args},           {"seed", o.seed},
                         {"threads", o.threads}, {"params", run.params}, {"inputs", run.inputs},
                         {"outputs", run.outputs}, {"verdicts", run.verdicts}, {"exit_code", code},
                         {"wall_clock_seconds", seconds}};
        io::write_json(o.manifest, manifest);
        return code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace cbnt
