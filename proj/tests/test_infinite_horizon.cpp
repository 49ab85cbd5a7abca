#include <cmath>

#include "decseq/best_response.hpp"
#include "decseq/error.hpp"
#include "decseq/infinite_horizon.hpp"
#include "decseq/value_table.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace decseq;

namespace {

O1Policy stationary_split(int T1) {
  O1Policy o1;
  o1.M = 2;
  for (int t = 1; t <= T1; ++t) {
    O1Stage st;
    st.terminal = t == T1;
    st.send = t == T1 ? std::vector<std::optional<Interval>>{Interval{0.5, 1.0}, Interval{0.0, 0.5}}
                      : std::vector<std::optional<Interval>>{Interval{0.9, 1.0}, Interval{0.0, 0.1}};
    o1.stages.push_back(st);
  }
  return o1;
}

int blank_pieces(const O1Stage& st, const std::vector<double>& grid) {
  int pieces = 0;
  bool in = false;
  for (double x : grid) {
    bool b = st.classify(x) == kBlank;
    if (b && !in) ++pieces;
    in = b;
  }
  return pieces;
}

}  // namespace

TEST_CASE("truncation bounds follow their formulas exactly") {
  CostModel c = test::zero_one(0.05, 0.05);
  CHECK(truncation_bound(PolicyRole::O2, 0.0, c, 10).epsilon == 0.0);
  CHECK(truncation_bound(PolicyRole::O1, 0.0, c, 10).epsilon == 0.0);
  TruncationCertificate o2 = truncation_bound(PolicyRole::O2, 0.01, c, 10);
  CHECK(o2.epsilon == 1.0 * 0.01);
  CHECK(o2.tail == 0.01);
  TruncationCertificate o1 = truncation_bound(PolicyRole::O1, 0.02, c, 10);
  CHECK(o1.epsilon == (0.05 * 10 + 1.0) * 0.02);
  CHECK(o1.epsilon == doctest::Approx(0.03).epsilon(1e-15));
  CHECK_THROWS_AS(truncation_bound(PolicyRole::O1, 1.5, c, 10), ValidationError);
}

TEST_CASE("O2 value iteration: uninformative channel") {
  ProblemSpec s = test::sym02(1, 1);
  s.channel2 = {2, {test::uninformative()}};
  O2Infinite r = value_iterate_o2(stationary_split(1), s);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    CHECK(r.wald.values[i] == doctest::Approx(std::min(r.grid[i], 1.0 - r.grid[i])).epsilon(1e-15));
}

TEST_CASE("O2 value iteration: monotone, convergent, concave blank classes") {
  for (Variant v : {Variant::P1, Variant::P2}) {
    ProblemSpec s = test::sym02(3, 3, v);
    O2Infinite r = value_iterate_o2(stationary_split(3), s);
    CHECK(r.converged);
    CHECK(r.max_increase <= 0.0);
    CHECK(r.deltas.back() < 1e-9);
    if (v == Variant::P2) {
      REQUIRE(r.pre_message.size() == 2);
      for (const auto& vals : r.pre_message) CHECK(midpoint_concave(r.grid, vals, 1e-8));
      for (const auto& th : r.pre_message_thresholds) CHECK(th.alpha <= th.beta);
    }
  }
}

TEST_CASE("O2 value iteration limit against a long finite horizon") {
  ProblemSpec s = test::sym02(1, 1);
  GridOptions g;
  g.grid_size = 100001;
  O2Infinite r = value_iterate_o2(stationary_split(1), s, g);
  WaldSolution w = solve_wald_finite(channel_rows(s.channel2, 1, 40), s.costs, 40);
  double err = 0.0;
  for (std::size_t i = 0; i < r.grid.size(); ++i) err = std::max(err, std::abs(r.wald.values[i] - w.stage(0).value(r.grid[i])));
  CHECK(err < 1e-6);
}

TEST_CASE("O2 value iteration rejects non-stationary inputs") {
  ProblemSpec s = test::drift(2, 2, Variant::P2);
  CHECK_THROWS_AS(value_iterate_o2(stationary_split(2), s), ValidationError);
  ProblemSpec ok = test::sym02(3, 3, Variant::P2);
  O1Policy moving = stationary_split(3);
  moving.stages[1].send[0] = Interval{0.8, 1.0};
  CHECK_THROWS_AS(value_iterate_o2(moving, ok), ValidationError);
}

TEST_CASE("O1 value iteration") {
  ProblemSpec s = test::sym02(2, 2);
  O2Policy o2 = o2_best_response(stationary_split(2), s).policy;
  O1Infinite r = value_iterate_o1(o2, s);
  CHECK(r.converged);
  CHECK(r.max_increase <= 0.0);
  for (const O1Stage& st : r.policy.stages) {
    CHECK(threshold_count(st) <= 4);
    CHECK(blank_pieces(st, r.grid) <= 3);
  }

  ProblemSpec dear = s;
  dear.costs.c1 = dear.costs.L + dear.costs.c2 * dear.T2 + 0.1;
  O1Infinite d = value_iterate_o1(o2, dear);
  CHECK(d.converged);
  for (double x : d.grid) CHECK(d.policy.stage(1).classify(x) != kBlank);

  O2Policy unbounded = o2;
  unbounded.bounded = false;
  CHECK_THROWS_AS(value_iterate_o1(unbounded, s), ValidationError);
}

TEST_CASE("epsilon-optimal pairs") {
  ProblemSpec s = test::sym02(1, 1);
  EpsilonPair loose = epsilon_optimal_pair(s, 10.0);
  CHECK(loose.horizon == 1);
  CHECK(loose.epsilon() <= 10.0);

  EpsilonPair mid = epsilon_optimal_pair(s, 0.5, 4);
  CHECK(mid.o1.epsilon <= 0.25);
  CHECK(mid.o2.epsilon <= 0.25);
  CHECK(mid.o1.role == PolicyRole::O1);
  CHECK(mid.o2.role == PolicyRole::O2);
  for (std::size_t i = 1; i < mid.bounds.size(); ++i) CHECK(mid.bounds[i] <= mid.bounds[i - 1] + 1e-12);
  CHECK_THROWS_AS(epsilon_optimal_pair(s, 1e-6, 2), UnattainableEpsilon);
}
