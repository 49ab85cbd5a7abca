#include <cmath>
#include <cstdlib>

#include "decseq/seq_decomp.hpp"
#include "decseq/simulate.hpp"
#include "decseq/wald.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace decseq;

namespace {

// O1 sends at t = 1 whatever it sees.
O1Policy send_now(int T1) {
  O1Policy o1;
  o1.M = 2;
  for (int t = 1; t <= T1; ++t) {
    O1Stage st;
    st.terminal = t == T1;
    st.send = {Interval{0.5, 1.0}, Interval{0.0, 0.5}};
    o1.stages.push_back(st);
  }
  return o1;
}

// O2 ignores messages and declares 0 at once.
O2Policy declare0(const ProblemSpec& s) {
  O2Policy o2;
  o2.variant = s.variant;
  o2.T1 = s.T1;
  o2.T2 = s.T2;
  o2.messages.assign(static_cast<std::size_t>(s.T1), MessageLikelihoods{});
  for (auto& m : o2.messages) m.symbol.assign(2, LikelihoodPair{0.0, 0.0});
  o2.pre_message.assign(static_cast<std::size_t>(std::max(0, s.T1 - 1)), StopThresholds{-1.0, -1.0});
  o2.wald.assign(static_cast<std::size_t>(s.T2 + 1), StopThresholds{-1.0, -1.0});
  return o2;
}

}  // namespace

TEST_CASE("closed form: immediate send, immediate declaration") {
  ProblemSpec s = test::asym_ternary(2, 2, Variant::P1);
  double expected = s.costs.c1 + s.p0 * s.costs.J[0][0] + (1.0 - s.p0) * s.costs.J[0][1];
  O1Policy o1 = send_now(2);
  O2Policy o2 = declare0(s);
  CHECK(exact_cost(o1, o2, s) == doctest::Approx(expected).epsilon(1e-12));
  ExactEvaluation ev = exact_evaluate(ThresholdO1(o1, s), ThresholdO2(o2, s), s);
  CHECK(ev.path_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev.tau1[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev.tau2[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed form: forced send then the optimal Wald rule") {
  ProblemSpec s = test::sym02(1, 3);
  DesignerSolution sol = solve_p1(s);
  WaldSolution w = solve_wald_finite(channel_rows(s.channel2, 1, 3), s.costs, 3);
  double pooled = wald_cost(w, 0.5, 3);
  double split = 0.5 * wald_cost(w, 0.2, 3) + 0.5 * wald_cost(w, 0.8, 3);
  CHECK(exact_cost(sol.o1, sol.o2, s) == doctest::Approx(s.costs.c1 + std::min(pooled, split)).epsilon(1e-12));
}

TEST_CASE("degenerate prior") {
  ProblemSpec s = test::sym02(2, 2);
  s.p0 = 1.0;
  DesignerSolution sol = solve_p1(s);
  CHECK(sol.cost == doctest::Approx(s.costs.c1).epsilon(1e-12));
  CostEstimate e = estimate_cost(sol.o1, sol.o2, s, 1000, 3);
  CHECK(e.mean == doctest::Approx(sol.cost).epsilon(1e-12));
  CHECK(e.standard_error == doctest::Approx(0.0));
}

TEST_CASE("single episode has no standard error") {
  ProblemSpec s = test::sym02(2, 2);
  DesignerSolution sol = solve_p1(s);
  CostEstimate e = estimate_cost(sol.o1, sol.o2, s, 1, 11);
  CHECK(e.n == 1);
  CHECK_FALSE(e.stderr_defined);
  CostEstimate two = estimate_cost(sol.o1, sol.o2, s, 2, 11);
  CHECK(two.stderr_defined);
}

TEST_CASE("determinism across runs and thread counts") {
  ProblemSpec s = test::drift(2, 3, Variant::P2);
  DesignerSolution sol = solve_p2(s);
  CostEstimate a = estimate_cost(sol.o1, sol.o2, s, 20000, 42);
  CostEstimate b = estimate_cost(sol.o1, sol.o2, s, 20000, 42);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  const char* old = std::getenv("DECSEQ_THREADS");
  std::string saved = old ? old : "";
  setenv("DECSEQ_THREADS", "1", 1);
  CostEstimate c = estimate_cost(sol.o1, sol.o2, s, 20000, 42);
  setenv("DECSEQ_THREADS", "3", 1);
  CostEstimate d = estimate_cost(sol.o1, sol.o2, s, 20000, 42);
  if (old)
    setenv("DECSEQ_THREADS", saved.c_str(), 1);
  else
    unsetenv("DECSEQ_THREADS");
  CHECK(a.mean == c.mean);
  CHECK(a.mean == d.mean);
  CHECK(a.standard_error == d.standard_error);

  EpisodeRng r1(5, 17), r2(5, 17);
  ThresholdO1 b1(sol.o1, s);
  ThresholdO2 b2(sol.o2, s);
  CHECK(simulate_once(b1, b2, s, r1) == simulate_once(b1, b2, s, r2));
}

TEST_CASE("standard error shrinks like one over root n") {
  ProblemSpec s = test::sym02(2, 2);
  DesignerSolution sol = solve_p1(s);
  CostEstimate small = estimate_cost(sol.o1, sol.o2, s, 10000, 1);
  CostEstimate big = estimate_cost(sol.o1, sol.o2, s, 40000, 1);
  double ratio = small.standard_error / big.standard_error;
  CHECK(ratio > 1.7);
  CHECK(ratio < 2.3);
}

TEST_CASE("Monte Carlo agrees with the exact cost") {
  for (const ProblemSpec& s : {test::sym02(2, 2), test::asym_ternary(2, 2, Variant::P2, 3), test::drift(2, 3, Variant::P2)}) {
    DesignerSolution sol = solve_designer(s);
    double exact = exact_cost(sol.o1, sol.o2, s);
    CHECK(std::abs(exact - sol.cost) <= 1e-9);
    CostEstimate e = estimate_cost(sol.o1, sol.o2, s, 100000, 7);
    CHECK(std::abs(e.mean - exact) <= 3.0 * e.standard_error);
  }
}
