#pragma once

// JSON forms of every artifact plus CSV sample dumps.

#include <cbnt/adversary.hpp>
#include <cbnt/algos.hpp>

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace cbnt::io {

using nlohmann::json;

// {"n", "K", "directed": [[i, j]], "bidirected": [[i, j]]}
json to_json(const Smcg& g);
Smcg graph_from_json(const json& j);

// {"observables", "unobservables", "edges": [[a, b]], "K"}
GeneralCausalGraph general_graph_from_json(const json& j);

// {"graph", "hidden_priors": {"e": [...]}, "cpts": {"v": {"x,y,...": [...]}}};
// row keys list parent values, then hidden-edge values.
json to_json(const Smbn& m);
Smbn model_from_json(const json& j);

json to_json(const CoveringSet& cs);
CoveringSet cover_from_json(const json& j);

json to_json(const DiscreteDist& d);
json to_json(const Intervention& I);
json to_json(const TestReport& r);
json to_json(const LearnedOracle& o);
LearnedOracle oracle_from_json(const json& j);
json to_json(const AuditReport& r);
json to_json(const AdversaryReport& r);

// "0=1,2=0" -> Intervention over n vertices; throws ParseError.
Intervention parse_intervention(const std::string& text, int n, int K);
std::string format_intervention(const Intervention& I);

json read_json(const std::string& path);
// Pretty-printed with a trailing newline.
void write_json(const std::string& path, const json& j);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// One comma-separated assignment per line, in vertex order.
std::string samples_csv(const SampleBatch& batch);

} // namespace cbnt::io
