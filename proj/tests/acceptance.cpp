// Acceptance harness: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "decseq/belief.hpp"
#include "decseq/best_response.hpp"
#include "decseq/error.hpp"
#include "decseq/infinite_horizon.hpp"
#include "decseq/info_state.hpp"
#include "decseq/oracle.hpp"
#include "decseq/seq_decomp.hpp"
#include "decseq/simulate.hpp"
#include "decseq/wald.hpp"
#include "support.hpp"

using namespace decseq;

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail << what;
    ok = ok && cond;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Every instance solved by the structural checks.
std::vector<ProblemSpec> solved_instances() {
  std::vector<ProblemSpec> out;
  for (Variant v : {Variant::P1, Variant::P2}) {
    for (const ProblemSpec& s : test::oracle_instances(v)) out.push_back(s);
    out.push_back(test::asym_ternary(2, 2, v, 3));
    out.push_back(test::asym_ternary(2, 3, v, 3));
    out.push_back(test::drift(3, 3, v));
    out.push_back(test::sym02(3, 3, v));
  }
  return out;
}

std::string name(const ProblemSpec& s) {
  std::ostringstream o;
  o << to_string(s.variant) << " p0=" << s.p0 << " T1=" << s.T1 << " T2=" << s.T2 << " M=" << s.M;
  return o.str();
}

void wald_equivalence(Check& c) {
  auto t0 = Clock::now();
  int n = 0;
  for (double p0 : {0.3, 0.5})
    for (double eps : {0.1, 0.2})
      for (double c2 : {0.02, 0.05}) {
        CostModel costs = test::zero_one(0.0, c2);
        for (int T = 1; T <= 3; ++T) {
          std::vector<LikelihoodRows> rows(static_cast<std::size_t>(T), test::symmetric(eps));
          double solver = wald_cost(solve_wald_finite(rows, costs, T), p0, T);
          double oracle = enumerate_stopping_rules(p0, rows, costs, T).cost;
          std::ostringstream what;
          what << "p0=" << p0 << " eps=" << eps << " c2=" << c2 << " T=" << T << ": " << solver << " vs " << oracle
               << "; ";
          c.expect(std::abs(solver - oracle) <= 1e-9, what.str());
        }
        ++n;
      }
  double secs = seconds_since(t0);
  c.expect(secs < 5.0, "runtime " + std::to_string(secs) + " s");
  c.detail << (c.ok ? "" : "; ") << n << " instances x T=1..3, " << secs << " s";
}

void designer_optimality(Check& c) {
  auto t0 = Clock::now();
  for (Variant v : {Variant::P1, Variant::P2}) {
    int binary = 0;
    for (const ProblemSpec& s : test::oracle_instances(v)) {
      bool bin = s.channel1.tables.front().h0.size() == 2 && s.channel2.tables.front().h0.size() == 2;
      binary += bin ? 1 : 0;
      double designer = v == Variant::P1 ? solve_p1(s).cost : solve_p2(s).cost;
      double oracle = v == Variant::P1 ? enumerate_policies_p1(s).cost : enumerate_policies_p2(s).cost;
      c.expect(std::abs(designer - oracle) <= 1e-9, name(s) + ": designer " + std::to_string(designer) +
                                                         " oracle " + std::to_string(oracle) + "; ");
    }
    c.expect(binary >= 6, "fewer than 6 binary instances for " + to_string(v) + "; ");
  }
  double secs = seconds_since(t0);
  c.expect(secs < 120.0, "runtime " + std::to_string(secs) + " s");
  c.detail << (c.ok ? "" : "; ") << secs << " s";
}

void threshold_structure(Check& c) {
  int instances = 0;
  for (const ProblemSpec& s : solved_instances()) {
    try {
      DesignerSolution sol = solve_designer(s);
      for (const O1Stage& st : sol.o1.stages) c.expect(threshold_count(st) <= 2 * s.M, name(s) + ": too many thresholds; ");
      for (const StopThresholds& th : sol.o2.wald) c.expect(th.alpha <= th.beta, name(s) + ": O2 wald region; ");
      for (const StopThresholds& th : sol.o2.pre_message) c.expect(th.alpha <= th.beta, name(s) + ": O2 blank region; ");

      // Re-derive both observers' regions from their atom-level best-response labels.
      O1BestResponse b1 = o1_best_response(sol.o2, s);
      for (const ValueTable& vt : b1.tables) {
        std::vector<Symbol> labels(vt.actions.begin(), vt.actions.end());
        O1Stage st = extract_thresholds(vt.atoms, labels, s.M, vt.t == s.T1, false);
        c.expect(threshold_count(st) <= 2 * s.M, name(s) + ": O1 best response thresholds; ");
      }
      O2BestResponse b2 = o2_best_response(sol.o1, s);
      for (const ValueTable& vt : b2.tables) {
        std::vector<Decision> labels;
        for (int a : vt.actions) labels.push_back(static_cast<Decision>(a));
        extract_stop_thresholds(vt.atoms, labels);
      }
      ++instances;
    } catch (const StructureViolation& e) {
      c.expect(false, name(s) + ": " + e.what() + "; ");
    }
  }
  c.detail << (c.ok ? "" : "; ") << instances << " instances";
}

void concavity_affinity(Check& c) {
  std::size_t tables = 0, lines = 0;
  auto check_table = [&](const ValueTable& vt, const std::string& where) {
    c.expect(midpoint_concave(vt, 1e-9), where + " t=" + std::to_string(vt.t) + " not concave; ");
    ++tables;
  };
  // Three-point test: the line through the values at 0 and 1 reproduces the middle value.
  auto affine_at = [&](const std::function<double(double)>& f, double a, double b, double m, const std::string& where) {
    double lam = (m - a) / (b - a);
    double interp = (1.0 - lam) * f(a) + lam * f(b);
    c.expect(std::abs(interp - f(m)) <= 1e-12 * std::max(1.0, std::abs(f(m))), where + " not affine; ");
    ++lines;
  };
  for (const ProblemSpec& s : solved_instances()) {
    DesignerSolution sol = solve_designer(s);
    O1BestResponse b1 = o1_best_response(sol.o2, s);
    O2BestResponse b2 = o2_best_response(sol.o1, s);
    for (const ValueTable& vt : b1.tables) check_table(vt, name(s) + " O1");
    for (const ValueTable& vt : b2.tables) check_table(vt, name(s) + " O2");
    for (const ValueTable& vt : b2.wald.tables) check_table(vt, name(s) + " Wald");

    ThresholdO2 o2(sol.o2, s);
    for (int t = 1; t <= s.T1; ++t)
      for (Symbol z = 0; z < s.M; ++z) {
        // Send branch: the history-level accountant's per-hypothesis costs mixed at a belief.
        auto per_h = o2_cost_given_message(o2, s, {t, z});
        auto send = [&](double pi) { return pi * per_h[0] + (1.0 - pi) * per_h[1]; };
        Affine line = evaluate_o2_policy(sol.o2, t, z, s);
        for (double pi : {0.0, 0.37, 1.0})
          c.expect(std::abs(line(pi) - send(pi)) <= 1e-12, name(s) + " send line mismatch; ");
        affine_at([&](double pi) { return line(pi); }, 0.1, 0.9, 0.43, name(s) + " send line");
      }
    for (int u = 0; u < 2; ++u)
      affine_at([&](double pi) { return terminal_cost(u, pi, s.costs); }, 0.0, 1.0, 0.29, name(s) + " stop line");
  }
  c.detail << (c.ok ? "" : "; ") << tables << " value tables, " << lines << " affine branches";
}

void monotone_limits(Check& c) {
  GridOptions fine;
  fine.grid_size = 100001;
  std::vector<ProblemSpec> cases{test::sym02(1, 1), test::binary(0.5, 0.1, 0.2, 0.05, 0.05, 1, 1),
                                 test::asym_ternary(1, 1, Variant::P1)};
  double worst = 0.0;
  for (const ProblemSpec& s : cases) {
    WaldInfinite wi = solve_wald_infinite(s.channel2, s.costs, fine);
    c.expect(wi.converged, name(s) + ": stationary Wald not converged; ");
    c.expect(wi.max_increase <= 0.0, name(s) + ": Wald iterate increased; ");
    WaldSolution ref = solve_wald_finite(channel_rows(s.channel2, 1, 40), s.costs, 40);
    for (std::size_t i = 0; i < wi.grid.size(); ++i)
      worst = std::max(worst, std::abs(wi.values[i] - ref.stage(0).value(wi.grid[i])));
  }
  c.expect(worst <= 1e-6, "post-message limit off by " + std::to_string(worst) + "; ");

  // Blank-class and O1 iterations on coarser grids; monotonicity is checked at every node.
  for (Variant v : {Variant::P1, Variant::P2}) {
    ProblemSpec s = test::sym02(3, 3, v);
    DesignerSolution sol = solve_designer(s);
    O1Policy o1 = sol.o1;
    for (std::size_t i = 1; i + 1 < o1.stages.size(); ++i) o1.stages[i].send = o1.stages[0].send;
    O2Infinite r2 = value_iterate_o2(o1, s);
    c.expect(r2.converged && r2.max_increase <= 0.0, name(s) + ": O2 iterates not monotone; ");
    O1Infinite r1 = value_iterate_o1(sol.o2, s);
    c.expect(r1.converged && r1.max_increase <= 0.0, name(s) + ": O1 iterates not monotone; ");
  }
  c.detail << (c.ok ? "" : "; ") << "max deviation from T=40 " << worst;
}

void truncation_certificates(Check& c) {
  for (const ProblemSpec& s : {test::sym02(2, 2), test::sym02(3, 3, Variant::P2), test::drift(2, 3, Variant::P2)}) {
    DesignerSolution sol = solve_designer(s);
    auto [o1, o2] = certify(sol, s);
    ExactEvaluation ev = exact_evaluate(ThresholdO1(sol.o1, s), ThresholdO2(sol.o2, s), s);
    double tail1 = ev.tau1.size() > static_cast<std::size_t>(s.T1) ? ev.tau1[static_cast<std::size_t>(s.T1)] : 0.0;
    double tail2 = 0.0;
    for (std::size_t k = static_cast<std::size_t>(s.T2); k < ev.tau2.size(); ++k) tail2 += ev.tau2[k];
    c.expect(std::abs(o1.tail - tail1) <= 1e-12 && std::abs(o2.tail - tail2) <= 1e-12, name(s) + ": tails; ");
    double L = s.costs.L;
    c.expect(o2.epsilon == L * o2.tail, name(s) + ": O2 epsilon not bit-exact; ");
    c.expect(o1.epsilon == (s.costs.c2 * s.T2 + L) * o1.tail, name(s) + ": O1 epsilon not bit-exact; ");
  }
  for (double eps : {0.5, 0.05}) {
    ProblemSpec s = test::sym02(1, 1);
    try {
      EpsilonPair p = epsilon_optimal_pair(s, eps);
      c.expect(p.o1.epsilon <= eps / 2 && p.o2.epsilon <= eps / 2 && p.epsilon() <= eps,
               "certificate above requested eps; ");
      c.detail << "eps=" << eps << " certified at T=" << p.horizon << "; ";
    } catch (const UnattainableEpsilon& e) {
      c.detail << "eps=" << eps << " cleanly unattainable (best " << e.best_bound() << "); ";
    }
  }
}

void simulator_consistency(Check& c) {
  ProblemSpec s = test::sym02(2, 2);
  DesignerSolution sol = solve_p1(s);
  double exact = exact_cost(sol.o1, sol.o2, s);
  CostEstimate e = estimate_cost(sol.o1, sol.o2, s, 100000, 7);
  c.expect(std::abs(exact - sol.cost) <= 1e-9, "exact cost differs from the solver; ");
  c.expect(e.stderr_defined && std::abs(e.mean - exact) <= 3.0 * e.standard_error, "estimate outside 3 stderr; ");
  c.detail << "exact " << exact << ", estimate " << e.mean << " +- " << e.standard_error;
}

void bayes_invariants(Check& c) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  auto random_rows = [&](std::size_t n) {
    LikelihoodRows r;
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      r.h0.push_back(u(rng) + 1e-3);
      r.h1.push_back(u(rng) + 1e-3);
      s0 += r.h0.back();
      s1 += r.h1.back();
    }
    for (std::size_t y = 0; y < n; ++y) {
      r.h0[y] /= s0;
      r.h1[y] /= s1;
    }
    return r;
  };
  for (int draw = 0; draw < 1000; ++draw) {
    LikelihoodRows r = random_rows(2 + static_cast<std::size_t>(draw % 4));
    double pi = u(rng);
    double mean = 0.0;
    for (std::size_t y = 0; y < r.h0.size(); ++y) mean += r.prob(y, pi) * update_observer1(pi, y, r);
    worst = std::max(worst, std::abs(mean - pi));
  }
  c.expect(worst <= 1e-10, "martingale error " + std::to_string(worst) + "; ");

  double mass_err = 0.0;
  ProblemSpec s = test::asym_ternary(3, 3, Variant::P2, 3);
  for (int draw = 0; draw < 1000; ++draw) {
    double a = u(rng), b = u(rng);
    O1Stage st;
    st.send = {Interval{std::max(a, b), 1.0}, std::nullopt, Interval{0.0, std::min(a, b)}};
    StopThresholds th{0.3 * u(rng), 0.7 + 0.3 * u(rng)};
    Classifier cls = [&](double pi) { return st.classify(pi); };
    InfoStateP2 psi = initial_info_state_p2(s);
    InfoStateP1 xi = initial_info_state_p1(s);
    double total2 = 0.0, total1 = 0.0;
    for (Symbol z : {kBlank, 0, 1, 2}) {
      double p2 = message_probability(psi, cls, z), p1 = message_probability(xi, cls, z);
      total2 += p2;
      total1 += p1;
      if (p2 > 0.0) {
        InfoStateP2 phi = q1_p2(psi, st, z, s.channel2.at(1), 3);
        mass_err = std::max(mass_err, std::abs(phi.mass() - 1.0));
        if (z == kBlank) mass_err = std::max(mass_err, std::abs(q2_p2(phi, th, s.channel1.at(2)).mass() - 1.0));
      }
      if (p1 > 0.0) {
        InfoStateP1 eta = q1_p1(xi, st, z);
        mass_err = std::max(mass_err, std::abs(eta.mass() - 1.0));
        if (z == kBlank) mass_err = std::max(mass_err, std::abs(q2_p1(eta, s.channel1.at(2)).mass() - 1.0));
      }
    }
    mass_err = std::max({mass_err, std::abs(total1 - 1.0), std::abs(total2 - 1.0)});
  }
  c.expect(mass_err <= 1e-10, "mass error " + std::to_string(mass_err) + "; ");
  c.detail << (c.ok ? "" : "; ") << "martingale " << worst << ", mass " << mass_err;
}

void pbpo_sanity(Check& c) {
  int shared = 0;
  for (Variant v : {Variant::P1, Variant::P2})
    for (const ProblemSpec& s : test::oracle_instances(v)) {
      PbpoResult r = pbpo_iteration(s, default_o2_init(s), 50);
      for (std::size_t i = 1; i < r.cost_trace.size(); ++i)
        c.expect(r.cost_trace[i] <= r.cost_trace[i - 1] + 1e-12, name(s) + ": trace increased; ");
      double opt = solve_designer(s).cost;
      c.expect(r.cost_trace.back() >= opt - 1e-9, name(s) + ": PBPO below the optimum; ");
      ++shared;
    }
  c.detail << (c.ok ? "" : "; ") << shared << " instances";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"wald oracle equivalence", wald_equivalence},
      {"designer global optimality", designer_optimality},
      {"threshold structure", threshold_structure},
      {"concavity and affinity", concavity_affinity},
      {"monotone limits", monotone_limits},
      {"truncation certificates", truncation_certificates},
      {"simulator consistency", simulator_consistency},
      {"bayes invariants", bayes_invariants},
      {"pbpo sanity", pbpo_sanity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    auto t0 = Clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %zu %s (%.2f s): %s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                seconds_since(t0), c.detail.str().c_str());
    if (!c.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
