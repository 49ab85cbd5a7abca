#include "decseq/spec_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decseq/error.hpp"
#include "json.hpp"

namespace decseq {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(path.empty() ? key : path + "." + key, "missing field");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> row(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array of probabilities");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

LikelihoodRows table(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(path, "expected [row_H0, row_H1]");
  return {row(j[0], path + "[0]"), row(j[1], path + "[1]")};
}

ObservationChannel channel(const json& j, const std::string& path) {
  ObservationChannel ch;
  ch.observer = integer(require(j, "observer", path), path + ".observer");
  const json& tables = require(j, "tables", path);
  std::string tp = path + ".tables";
  if (!tables.is_array() || tables.empty()) throw ValidationError(tp, "expected a non-empty array");
  // A bare [row_H0, row_H1] pair is shorthand for one replicated table.
  bool single = tables.size() == 2 && tables[0].is_array() && !tables[0].empty() && tables[0][0].is_number();
  if (single) {
    ch.tables.push_back(table(tables, tp));
  } else {
    for (std::size_t t = 0; t < tables.size(); ++t)
      ch.tables.push_back(table(tables[t], tp + "[" + std::to_string(t) + "]"));
  }
  return ch;
}

json rows_json(const LikelihoodRows& r) { return json::array({r.h0, r.h1}); }

}  // namespace

ProblemSpec load_problem_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "spec must be a JSON object");

  ProblemSpec spec;
  const json& prior = require(doc, "prior", "");
  spec.p0 = prior.is_object() ? number(require(prior, "p0", "prior"), "prior.p0") : number(prior, "prior");

  const json& channels = require(doc, "channels", "");
  if (!channels.is_array()) throw ValidationError("channels", "expected an array");
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < channels.size(); ++i) {
    ObservationChannel ch = channel(channels[i], "channels[" + std::to_string(i) + "]");
    if (ch.observer != 1 && ch.observer != 2)
      throw ValidationError("channels[" + std::to_string(i) + "].observer", "must be 1 or 2");
    if (seen[ch.observer - 1])
      throw ValidationError("channels[" + std::to_string(i) + "].observer", "duplicate observer");
    seen[ch.observer - 1] = true;
    (ch.observer == 1 ? spec.channel1 : spec.channel2) = std::move(ch);
  }
  if (!seen[0] || !seen[1]) throw ValidationError("channels", "both observer 1 and observer 2 channels required");

  const json& costs = require(doc, "costs", "");
  spec.costs.c1 = number(require(costs, "c1", "costs"), "costs.c1");
  spec.costs.c2 = number(require(costs, "c2", "costs"), "costs.c2");
  const json& J = require(costs, "J", "costs");
  if (!J.is_array() || J.size() != 2) throw ValidationError("costs.J", "expected a 2x2 array");
  for (int u = 0; u < 2; ++u) {
    if (!J[u].is_array() || J[u].size() != 2) throw ValidationError("costs.J", "expected a 2x2 array");
    for (int h = 0; h < 2; ++h)
      spec.costs.J[u][h] = number(J[u][h], "costs.J[" + std::to_string(u) + "][" + std::to_string(h) + "]");
  }
  if (costs.contains("L")) spec.costs.L = number(costs["L"], "costs.L");
  else spec.costs = with_derived_bound(spec.costs);

  const json& horizons = require(doc, "horizons", "");
  spec.T1 = integer(require(horizons, "T1", "horizons"), "horizons.T1");
  spec.T2 = integer(require(horizons, "T2", "horizons"), "horizons.T2");

  const json& variant = require(doc, "variant", "");
  if (variant == "P1") spec.variant = Variant::P1;
  else if (variant == "P2") spec.variant = Variant::P2;
  else throw ValidationError("variant", "must be \"P1\" or \"P2\"");

  spec.M = doc.contains("M") ? integer(doc["M"], "M") : 2;

  validate(spec);
  return spec;
}

ProblemSpec load_problem_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableInput("cannot read spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem_spec(buf.str());
}

std::string problem_spec_to_json(const ProblemSpec& spec, int indent) {
  json doc;
  doc["prior"] = spec.p0;
  json channels = json::array();
  for (const ObservationChannel* ch : {&spec.channel1, &spec.channel2}) {
    json tables = json::array();
    for (const auto& t : ch->tables) tables.push_back(rows_json(t));
    channels.push_back({{"observer", ch->observer}, {"tables", tables}});
  }
  doc["channels"] = channels;
  doc["costs"] = {{"c1", spec.costs.c1},
                  {"c2", spec.costs.c2},
                  {"J", {{spec.costs.J[0][0], spec.costs.J[0][1]}, {spec.costs.J[1][0], spec.costs.J[1][1]}}},
                  {"L", spec.costs.L}};
  doc["horizons"] = {{"T1", spec.T1}, {"T2", spec.T2}};
  doc["variant"] = to_string(spec.variant);
  doc["M"] = spec.M;
  return doc.dump(indent);
}

std::string spec_digest(const ProblemSpec& spec) {
  std::string canon = problem_spec_to_json(spec, -1);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace decseq
