#include "decseq/policy_io.hpp"

#include <fstream>
#include <sstream>

#include "decseq/error.hpp"
#include "json.hpp"

namespace decseq {

using nlohmann::json;

namespace {

json pair_json(const LikelihoodPair& p) { return json::array({p.h0, p.h1}); }

json o1_json(const O1Policy& o1) {
  json stages = json::array();
  for (int t = 1; t <= o1.horizon(); ++t) {
    const O1Stage& st = o1.stage(t);
    json send = json::array();
    for (const auto& iv : st.send) send.push_back(iv ? json::array({iv->lo, iv->hi}) : json(nullptr));
    stages.push_back({{"t", t}, {"terminal", st.terminal}, {"send", send}});
  }
  return {{"M", o1.M}, {"stages", stages}};
}

json o2_json(const O2Policy& o2) {
  json msgs = json::array();
  for (std::size_t i = 0; i < o2.messages.size(); ++i) {
    json syms = json::array();
    for (const auto& p : o2.messages[i].symbol) syms.push_back(pair_json(p));
    msgs.push_back({{"t", i + 1}, {"symbols", syms}, {"blank", pair_json(o2.messages[i].blank)}});
  }
  json pre = json::array();
  for (std::size_t i = 0; i < o2.pre_message.size(); ++i)
    pre.push_back({{"t", i + 1}, {"w1", o2.pre_message[i].alpha}, {"w2", o2.pre_message[i].beta}});
  json wald = json::array();
  for (std::size_t k = 0; k < o2.wald.size(); ++k)
    wald.push_back({{"k", k}, {"w1", o2.wald[k].alpha}, {"w2", o2.wald[k].beta}});
  return {{"variant", to_string(o2.variant)}, {"M", o2.M},        {"T1", o2.T1},   {"T2", o2.T2},
          {"bounded", o2.bounded},           {"messages", msgs}, {"pre_message", pre}, {"wald", wald}};
}

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(path + "." + key, "missing field");
  return j.at(key);
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
  return j.get<int>();
}

LikelihoodPair read_pair(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(path, "expected [h0, h1]");
  return {num(j[0], path + "[0]"), num(j[1], path + "[1]")};
}

StopThresholds read_stop(const json& j, const std::string& path) {
  StopThresholds s{num(field(j, "w1", path), path + ".w1"), num(field(j, "w2", path), path + ".w2")};
  if (!(0.0 <= s.alpha && s.alpha <= s.beta && s.beta <= 1.0))
    throw ValidationError(path, "thresholds must satisfy 0 <= w1 <= w2 <= 1");
  return s;
}

O1Policy read_o1(const json& j, const std::string& path) {
  O1Policy o1;
  o1.M = integer(field(j, "M", path), path + ".M");
  const json& stages = field(j, "stages", path);
  if (!stages.is_array() || stages.empty()) throw ValidationError(path + ".stages", "expected a non-empty array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    std::string sp = path + ".stages[" + std::to_string(i) + "]";
    O1Stage st;
    st.terminal = field(stages[i], "terminal", sp).get<bool>();
    const json& send = field(stages[i], "send", sp);
    if (!send.is_array() || static_cast<int>(send.size()) != o1.M)
      throw ValidationError(sp + ".send", "expected one entry per symbol");
    for (std::size_t z = 0; z < send.size(); ++z) {
      if (send[z].is_null()) {
        st.send.emplace_back(std::nullopt);
        continue;
      }
      LikelihoodPair iv = read_pair(send[z], sp + ".send[" + std::to_string(z) + "]");
      if (!(0.0 <= iv.h0 && iv.h0 <= iv.h1 && iv.h1 <= 1.0))
        throw ValidationError(sp + ".send[" + std::to_string(z) + "]", "expected 0 <= lo <= hi <= 1");
      st.send.emplace_back(Interval{iv.h0, iv.h1});
    }
    o1.stages.push_back(std::move(st));
  }
  if (!o1.stages.back().terminal) throw ValidationError(path + ".stages", "last stage must be terminal");
  return o1;
}

O2Policy read_o2(const json& j, const std::string& path) {
  O2Policy o2;
  std::string v = field(j, "variant", path).get<std::string>();
  if (v == "P1") o2.variant = Variant::P1;
  else if (v == "P2") o2.variant = Variant::P2;
  else throw ValidationError(path + ".variant", "expected \"P1\" or \"P2\"");
  o2.M = integer(field(j, "M", path), path + ".M");
  o2.T1 = integer(field(j, "T1", path), path + ".T1");
  o2.T2 = integer(field(j, "T2", path), path + ".T2");
  if (j.contains("bounded")) o2.bounded = j.at("bounded").get<bool>();
  const json& msgs = field(j, "messages", path);
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    std::string mp = path + ".messages[" + std::to_string(i) + "]";
    MessageLikelihoods m;
    const json& syms = field(msgs[i], "symbols", mp);
    for (std::size_t z = 0; z < syms.size(); ++z)
      m.symbol.push_back(read_pair(syms[z], mp + ".symbols[" + std::to_string(z) + "]"));
    if (static_cast<int>(m.symbol.size()) != o2.M) throw ValidationError(mp + ".symbols", "expected one pair per symbol");
    m.blank = read_pair(field(msgs[i], "blank", mp), mp + ".blank");
    o2.messages.push_back(std::move(m));
  }
  const json& pre = field(j, "pre_message", path);
  for (std::size_t i = 0; i < pre.size(); ++i)
    o2.pre_message.push_back(read_stop(pre[i], path + ".pre_message[" + std::to_string(i) + "]"));
  const json& wald = field(j, "wald", path);
  if (!wald.is_array() || wald.empty()) throw ValidationError(path + ".wald", "expected a non-empty array");
  for (std::size_t k = 0; k < wald.size(); ++k)
    o2.wald.push_back(read_stop(wald[k], path + ".wald[" + std::to_string(k) + "]"));
  return o2;
}

json certificate(const TruncationCertificate& c) {
  return {{"role", to_string(c.role)},
          {"horizon", c.horizon},
          {"tail", c.tail},
          {"epsilon", c.epsilon},
          {"formula", c.role == PolicyRole::O2 ? "L*P" : "(c2*T2+L)*P"}};
}

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::Declare0: return "declare0";
    case Decision::Declare1: return "declare1";
    default: return "continue";
  }
}

}  // namespace

std::string policies_to_json(const O1Policy& o1, const O2Policy& o2, int indent) {
  return json{{"o1", o1_json(o1)}, {"o2", o2_json(o2)}}.dump(indent);
}

PolicyPair load_policies(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("", "policy document is not valid JSON");
  try {
    if (j.contains("o1_thresholds")) return {read_o1(j.at("o1_thresholds"), "o1_thresholds"), read_o2(j.at("o2_thresholds"), "o2_thresholds")};
    return {read_o1(field(j, "o1", ""), "o1"), read_o2(field(j, "o2", ""), "o2")};
  } catch (const json::exception& e) {
    throw ValidationError("", std::string("malformed policy document: ") + e.what());
  }
}

PolicyPair load_policies_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableInput("cannot read policy file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_policies(ss.str());
}

std::string designer_solution_to_json(const DesignerSolution& sol, int indent) {
  json j{{"variant", to_string(sol.variant)},
         {"cost", sol.cost},
         {"o1_thresholds", o1_json(sol.o1)},
         {"o2_thresholds", o2_json(sol.o2)},
         {"stats",
          {{"nodes_expanded", sol.stats.nodes_expanded},
           {"memo_hits", sol.stats.memo_hits},
           {"partitions_evaluated", sol.stats.partitions_evaluated}}}};
  return j.dump(indent);
}

std::string certificate_to_json(const TruncationCertificate& c, int indent) { return certificate(c).dump(indent); }

std::string oracle_result_to_json(const OracleResult& r, int indent) {
  json o1 = json::array();
  for (const auto& [hist, z] : r.o1.entries()) o1.push_back({{"history", hist}, {"symbol", z}});
  json o2 = json::array();
  for (const auto& [key, d] : r.o2.entries()) {
    const auto& [time, sym, hist] = key;
    o2.push_back({{"message", {{"time", time}, {"symbol", sym}}}, {"history", hist}, {"decision", decision_name(d)}});
  }
  json j{{"cost", r.cost},
         {"verified_cost", r.verified_cost},
         {"o1_policies", r.o1_policies},
         {"evaluations", r.evaluations},
         {"pruned", r.pruned},
         {"structured_optimum", r.structured_optimum},
         {"o1", o1},
         {"o2", o2}};
  return j.dump(indent);
}

std::string wald_thresholds_csv(const std::vector<StopThresholds>& stages) {
  std::ostringstream out;
  out.precision(17);
  out << "k,w1_k,w2_k\n";
  for (std::size_t k = 0; k < stages.size(); ++k) out << k << ',' << stages[k].alpha << ',' << stages[k].beta << '\n';
  return out.str();
}

std::string o1_thresholds_csv(const O1Policy& o1) {
  std::ostringstream out;
  out.precision(17);
  out << "t,symbol,lo,hi\n";
  for (int t = 1; t <= o1.horizon(); ++t) {
    const O1Stage& st = o1.stage(t);
    for (std::size_t z = 0; z < st.send.size(); ++z)
      if (st.send[z]) out << t << ',' << z << ',' << st.send[z]->lo << ',' << st.send[z]->hi << '\n';
  }
  return out.str();
}

}  // namespace decseq
