#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "decseq/best_response.hpp"
#include "decseq/error.hpp"
#include "decseq/infinite_horizon.hpp"
#include "decseq/oracle.hpp"
#include "decseq/policy_io.hpp"
#include "decseq/seq_decomp.hpp"
#include "decseq/simulate.hpp"
#include "decseq/spec_io.hpp"
#include "decseq/wald.hpp"
#include "json.hpp"

namespace decseq::cli {

using nlohmann::json;

namespace {

constexpr double kCertifyTol = 1e-9;

struct Result {
  json outputs = json::object();
  std::map<std::string, std::string> files;  // extra files written under --out
  std::string stdout_text;                    // replaces the JSON report on stdout when set
  int code = kOk;
};

struct Options {
  std::string spec_path;
  std::string out_dir;
  std::string policies_path;
  std::string side = "o1";
  std::string variant;
  int horizon = -1;
  bool infinite = false;
  int grid_size = GridOptions{}.grid_size;
  double tol = GridOptions{}.tol;
  int max_iterations = GridOptions{}.max_iterations;
  double epsilon = 0.0;
  int max_horizon = 4;
  std::uint64_t n = 100000;
  std::uint64_t seed = 7;
  std::uint64_t cap = OracleOptions{}.cap;
  bool literal = false;
  int M = 3;
};

json parse(const std::string& text) { return json::parse(text); }

json stop_json(const StopThresholds& s) { return {{"w1", s.alpha}, {"w2", s.beta}}; }

GridOptions grid_options(const Options& o) { return {o.grid_size, o.tol, o.max_iterations}; }

ProblemSpec with_variant(ProblemSpec spec, const Options& o) {
  if (o.variant == "P1") spec.variant = Variant::P1;
  else if (o.variant == "P2") spec.variant = Variant::P2;
  else if (!o.variant.empty()) throw ValidationError("--variant", "expected P1 or P2");
  return spec;
}

void add_policies(Result& r, const O1Policy& o1, const O2Policy& o2) {
  r.files["policies.json"] = policies_to_json(o1, o2);
  r.files["o1_thresholds.csv"] = o1_thresholds_csv(o1);
  r.files["wald_thresholds.csv"] = wald_thresholds_csv(o2.wald);
}

Result solve_wald(const ProblemSpec& spec, const Options& o, json& config) {
  Result r;
  int T = o.horizon >= 0 ? o.horizon : spec.T2;
  config["horizon"] = T;
  auto rows = channel_rows(spec.channel2, 1, T);
  WaldSolution sol = solve_wald_finite(rows, spec.costs, T);
  std::vector<StopThresholds> th;
  for (const WaldStage& st : sol.stages) th.push_back(st.thresholds);
  r.outputs["cost"] = wald_cost(sol, spec.p0, T);
  r.outputs["thresholds"] = json::array();
  for (const auto& s : th) r.outputs["thresholds"].push_back(stop_json(s));
  r.files["wald_thresholds.csv"] = wald_thresholds_csv(th);
  if (o.infinite) {
    config["grid"] = {{"grid_size", o.grid_size}, {"tol", o.tol}, {"max_iterations", o.max_iterations}};
    WaldInfinite inf = solve_wald_infinite(spec.channel2, spec.costs, grid_options(o));
    r.outputs["infinite"] = {{"thresholds", stop_json(inf.thresholds)},
                             {"iterations", inf.iterations},
                             {"converged", inf.converged},
                             {"max_increase", inf.max_increase}};
  }
  return r;
}

Result best_response(const ProblemSpec& spec, const Options& o, json& config) {
  Result r;
  config["side"] = o.side;
  PolicyPair given = load_policies_file(o.policies_path);
  O1Policy o1 = given.o1;
  O2Policy o2 = given.o2;
  if (o.side == "o1") {
    O1BestResponse br = o1_best_response(o2, spec);
    o1 = br.policy;
    r.outputs["best_response_cost"] = br.cost;
  } else if (o.side == "o2") {
    O2BestResponse br = o2_best_response(o1, spec);
    o2 = br.policy;
    r.outputs["best_response_cost"] = br.cost;
  } else {
    throw ValidationError("--side", "expected o1 or o2");
  }
  r.outputs["cost"] = exact_cost(o1, o2, spec);
  r.outputs["policies"] = parse(policies_to_json(o1, o2));
  add_policies(r, o1, o2);
  return r;
}

Result solve(const ProblemSpec& spec, Variant variant) {
  Result r;
  if (spec.variant != variant) throw ValidationError("variant", "spec variant is " + to_string(spec.variant));
  DesignerSolution sol = solve_designer(spec);
  r.outputs["solution"] = parse(designer_solution_to_json(sol));
  r.outputs["cost"] = sol.cost;
  r.files["solution.json"] = designer_solution_to_json(sol);
  add_policies(r, sol.o1, sol.o2);
  return r;
}

Result solve_infinite(const ProblemSpec& spec, const Options& o, json& config) {
  Result r;
  GridOptions g = grid_options(o);
  config["grid"] = {{"grid_size", g.grid_size}, {"tol", g.tol}, {"max_iterations", g.max_iterations}};
  DesignerSolution sol = solve_designer(spec);
  json& out = r.outputs;
  if (sol.o1.stationary() && spec.stationary()) {
    O2Infinite v2 = value_iterate_o2(sol.o1, spec, g);
    json pre = json::array();
    for (const auto& s : v2.pre_message_thresholds) pre.push_back(stop_json(s));
    out["o2"] = {{"wald", stop_json(v2.wald.thresholds)},
                 {"pre_message", pre},
                 {"iterations", v2.iterations},
                 {"converged", v2.converged},
                 {"max_increase", v2.max_increase}};
  } else {
    out["o2"] = nullptr;
  }
  O1Infinite v1 = value_iterate_o1(sol.o2, spec, g);
  json o1 = parse(policies_to_json(v1.policy, sol.o2));
  out["o1"] = {{"policy", o1["o1"]},
               {"horizon", v1.iterations},
               {"converged", v1.converged},
               {"max_increase", v1.max_increase}};
  if (o.epsilon > 0.0) {
    config["epsilon"] = o.epsilon;
    config["max_horizon"] = o.max_horizon;
    EpsilonPair pair = epsilon_optimal_pair(spec, o.epsilon, o.max_horizon);
    out["epsilon_pair"] = {{"horizon", pair.horizon},
                           {"epsilon", pair.epsilon()},
                           {"bounds", pair.bounds},
                           {"certificates", {parse(certificate_to_json(pair.o1)), parse(certificate_to_json(pair.o2))}},
                           {"solution", parse(designer_solution_to_json(pair.solution))}};
    r.files["certificates.json"] = out["epsilon_pair"]["certificates"].dump(2);
  }
  return r;
}

Result simulate(const ProblemSpec& spec, const Options& o, json& config) {
  Result r;
  config["n"] = o.n;
  config["seed"] = o.seed;
  PolicyPair pols;
  std::string policy_id = "designer";
  if (!o.policies_path.empty()) {
    pols = load_policies_file(o.policies_path);
    policy_id = std::filesystem::path(o.policies_path).stem().string();
  } else {
    DesignerSolution sol = solve_designer(spec);
    pols = {sol.o1, sol.o2};
  }
  CostEstimate est = estimate_cost(pols.o1, pols.o2, spec, o.n, o.seed);
  double exact = exact_cost(pols.o1, pols.o2, spec);
  std::ostringstream csv;
  csv.precision(17);
  csv << "instance,policy-id,mean,stderr,n,seed\n"
      << spec_digest(spec) << ',' << policy_id << ',' << est.mean << ',' << est.standard_error << ',' << est.n << ','
      << est.seed << '\n';
  r.stdout_text = csv.str();
  r.files["simulate.csv"] = csv.str();
  r.outputs = {{"mean", est.mean},
               {"stderr", est.standard_error},
               {"stderr_defined", est.stderr_defined},
               {"n", est.n},
               {"seed", est.seed},
               {"exact_cost", exact},
               {"policy_id", policy_id}};
  return r;
}

Result oracle_check(const ProblemSpec& spec, const Options& o, json& config) {
  Result r;
  OracleOptions opt;
  opt.cap = o.cap;
  opt.literal = o.literal;
  config["cap"] = o.cap;
  config["literal"] = o.literal;
  DesignerSolution sol = solve_designer(spec);
  OracleResult orc = enumerate_policies(spec, opt);
  double exact = exact_cost(sol.o1, sol.o2, spec);
  double diff = std::max({std::abs(sol.cost - orc.cost), std::abs(exact - sol.cost),
                          std::abs(orc.verified_cost - orc.cost)});
  r.outputs = {{"solver_cost", sol.cost},
               {"solver_exact_cost", exact},
               {"oracle_cost", orc.cost},
               {"oracle_verified_cost", orc.verified_cost},
               {"difference", diff},
               {"tolerance", kCertifyTol},
               {"certified", diff <= kCertifyTol},
               {"oracle", parse(oracle_result_to_json(orc))}};
  r.files["oracle.json"] = oracle_result_to_json(orc);
  if (diff > kCertifyTol) r.code = kCertificationMismatch;
  return r;
}

Result mary(ProblemSpec spec, const Options& o, json& config) {
  if (o.M < 2) throw ValidationError("--M", "must be at least 2");
  config["M"] = o.M;
  spec.M = o.M;
  Result r = solve(spec, spec.variant);
  json counts = json::array();
  bool ok = true;
  O1Policy o1 = load_policies(r.files.at("policies.json")).o1;
  for (int t = 1; t <= o1.horizon(); ++t) {
    int c = threshold_count(o1.stage(t));
    counts.push_back(c);
    ok = ok && c <= 2 * spec.M;
  }
  r.outputs["threshold_counts"] = counts;
  r.outputs["within_2M"] = ok;
  if (!ok) r.code = kCertificationMismatch;
  return r;
}

void write_files(const std::string& dir, const json& report, const Result& r) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(std::filesystem::path(dir) / name);
    if (!f) throw UnreadableInput("cannot write " + (std::filesystem::path(dir) / name).string());
    f << text;
  };
  put("report.json", report.dump(2) + "\n");
  for (const auto& [name, text] : r.files) put(name, text);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solver, simulator and verification harness for two-observer sequential detection", "decseq"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", o.spec_path, "Problem spec JSON")->required();
    sub->add_option("--out", o.out_dir, "Directory for report.json and CSV/JSON artifacts");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid_size, "Belief grid size")->capture_default_str();
    sub->add_option("--tol", o.tol, "Value-iteration tolerance")->capture_default_str();
    sub->add_option("--max-iter", o.max_iterations, "Value-iteration cap")->capture_default_str();
  };

  auto* wald = app.add_subcommand("solve-wald", "Finite (and optionally stationary) Wald problem for O2");
  add_common(wald);
  wald->add_option("--horizon", o.horizon, "Horizon T (default: spec T2)");
  wald->add_flag("--infinite", o.infinite, "Also run stationary value iteration");
  add_grid(wald);

  auto* br = app.add_subcommand("best-response", "Best response of one observer to the other's policy");
  add_common(br);
  br->add_option("--policies", o.policies_path, "Policy JSON")->required();
  br->add_option("--side", o.side, "Observer to optimize: o1 or o2")->capture_default_str();

  auto* p1 = app.add_subcommand("solve-p1", "Globally optimal pair for variant P1");
  add_common(p1);
  auto* p2 = app.add_subcommand("solve-p2", "Globally optimal pair for variant P2");
  add_common(p2);

  auto* inf = app.add_subcommand("solve-infinite", "Value-iteration limits and epsilon-optimal pairs");
  add_common(inf);
  add_grid(inf);
  inf->add_option("--epsilon", o.epsilon, "Requested epsilon for a certified pair");
  inf->add_option("--max-horizon", o.max_horizon, "Largest horizon tried for --epsilon")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo cost estimate");
  add_common(sim);
  sim->add_option("--policies", o.policies_path, "Policy JSON (default: designer solution)");
  sim->add_option("--n", o.n, "Episodes")->capture_default_str();
  sim->add_option("--seed", o.seed, "Seed")->capture_default_str();

  auto* orc = app.add_subcommand("oracle-check", "Compare the designer with exhaustive enumeration");
  add_common(orc);
  orc->add_option("--cap", o.cap, "Enumeration cap")->capture_default_str();
  orc->add_flag("--literal", o.literal, "Enumerate every table pair");

  auto* mry = app.add_subcommand("mary", "M-ary message alphabet solve");
  add_common(mry);
  mry->add_option("--M", o.M, "Alphabet size")->capture_default_str();

  for (auto* sub : {wald, br, p1, p2, inf, sim, orc, mry})
    sub->add_option("--variant", o.variant, "Override the spec variant (P1 or P2)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  auto start = std::chrono::steady_clock::now();
  try {
    ProblemSpec spec = with_variant(load_problem_spec_file(o.spec_path), o);
    json config{{"spec_path", o.spec_path}, {"spec", parse(problem_spec_to_json(spec))}};
    if (!o.policies_path.empty()) config["policies_path"] = o.policies_path;
    Result r;
    if (command == "solve-wald") r = solve_wald(spec, o, config);
    else if (command == "best-response") r = best_response(spec, o, config);
    else if (command == "solve-p1") r = solve(spec, Variant::P1);
    else if (command == "solve-p2") r = solve(spec, Variant::P2);
    else if (command == "solve-infinite") r = solve_infinite(spec, o, config);
    else if (command == "simulate") r = simulate(spec, o, config);
    else if (command == "oracle-check") r = oracle_check(spec, o, config);
    else r = mary(spec, o, config);

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json report{{"command", command},
                {"spec_digest", spec_digest(spec)},
                {"config", config},
                {"outputs", r.outputs},
                {"wall_time_s", wall}};
    if (!o.out_dir.empty()) write_files(o.out_dir, report, r);
    if (!r.stdout_text.empty()) out << r.stdout_text;
    else out << report.dump(2) << '\n';
    if (r.code == kCertificationMismatch) err << command << ": certification mismatch\n";
    return r.code;
  } catch (const ValidationError& e) {
    err << command << ": validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const UnreadableInput& e) {
    err << command << ": " << e.what() << '\n';
    return kUnreadableInput;
  } catch (const CapExceeded& e) {
    err << command << ": " << e.what() << '\n';
    return kCapExceeded;
  } catch (const UnattainableEpsilon& e) {
    err << command << ": " << e.what() << '\n';
    return kEpsilonUnattainable;
  } catch (const std::exception& e) {
    err << command << ": error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace decseq::cli
