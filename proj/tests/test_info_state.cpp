#include <algorithm>
#include <cmath>
#include <random>

#include "decseq/info_state.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace decseq;

namespace {

double hyp_mass(const InfoStateP1& s, int h) {
  double m = 0.0;
  for (const auto& a : s.atoms)
    if (a.h == h) m += a.mass;
  return m;
}

O1Stage regions(std::optional<Interval> one, std::optional<Interval> zero, bool terminal = false) {
  O1Stage st;
  st.terminal = terminal;
  st.send = {zero, one};
  return st;
}

}  // namespace

TEST_CASE("initial P1 state is one observation from the prior") {
  InfoStateP1 xi = initial_info_state_p1(test::sym02());
  CHECK(xi.mass() == doctest::Approx(1.0).epsilon(1e-15));
  auto atoms = o1_atoms(xi);
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0] == doctest::Approx(0.2));
  CHECK(atoms[1] == doctest::Approx(0.8));
}

TEST_CASE("conditioning on the blank of an all-blank rule is the identity") {
  InfoStateP1 xi = initial_info_state_p1(test::sym02());
  InfoStateP1 eta = q1_p1(xi, regions(std::nullopt, std::nullopt), kBlank);
  REQUIRE(eta.atoms.size() == xi.atoms.size());
  for (std::size_t i = 0; i < xi.atoms.size(); ++i) {
    CHECK(eta.atoms[i].pi1 == xi.atoms[i].pi1);
    CHECK(eta.atoms[i].mass == doctest::Approx(xi.atoms[i].mass).epsilon(1e-15));
  }
}

TEST_CASE("conditioning on a one-atom region") {
  InfoStateP1 xi = initial_info_state_p1(test::sym02());
  InfoStateP1 eta = q1_p1(xi, regions(Interval{0.0, 0.3}, std::nullopt), 1);
  CHECK(eta.mass() == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& a : eta.atoms) CHECK(a.pi1 == doctest::Approx(0.2));
  CHECK(hyp_mass(eta, 0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(message_probability(xi, [](double pi) { return pi < 0.5 ? 1 : kBlank; }, 1) == doctest::Approx(0.5));
}

TEST_CASE("P1 pushforward") {
  InfoStateP1 single;
  single.t = 1;
  single.atoms = {{0, 0.5, 0.5}, {1, 0.5, 0.5}};
  InfoStateP1 flat = q2_p1(single, test::uninformative());
  CHECK(o1_atoms(flat) == std::vector<double>{0.5});
  CHECK(flat.mass() == doctest::Approx(1.0));
  InfoStateP1 next = q2_p1(single, test::symmetric(0.2));
  CHECK(next.t == 2);
  auto atoms = o1_atoms(next);
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0] == doctest::Approx(0.2));
  for (const auto& a : next.atoms) {
    double expected = a.pi1 > 0.5 ? (a.h == 0 ? 0.4 : 0.1) : (a.h == 0 ? 0.1 : 0.4);
    CHECK(a.mass == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(next.mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("P2 one-step split of the sym-0.2 state") {
  ProblemSpec s = test::sym02(1, 1, Variant::P2);
  InfoStateP2 psi = initial_info_state_p2(s);
  O1Stage st = regions(Interval{0.0, 0.5}, Interval{0.5, 1.0}, true);
  InfoStateP2 phi = q1_p2(psi, st, 0, test::symmetric(0.2), 2);
  // Given z = 0 (O1 saw the H0-leaning outcome), O2's own observation splits its belief.
  CHECK(phi.mass() == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> pi2s;
  for (const auto& a : phi.atoms) {
    CHECK(a.pi1 == doctest::Approx(0.8));
    pi2s.push_back(a.pi2);
  }
  std::sort(pi2s.begin(), pi2s.end());
  pi2s.erase(std::unique(pi2s.begin(), pi2s.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             pi2s.end());
  REQUIRE(pi2s.size() == 2);
  CHECK(pi2s[0] == doctest::Approx(0.5));
  CHECK(pi2s[1] == doctest::Approx(16.0 / 17.0));
}

TEST_CASE("P2 blank step with nothing to learn") {
  ProblemSpec s = test::sym02(2, 2, Variant::P2);
  s.channel2 = {2, {test::uninformative()}};
  InfoStateP2 psi = initial_info_state_p2(s);
  InfoStateP2 phi = q1_p2(psi, regions(std::nullopt, std::nullopt), kBlank, test::uninformative(), 2);
  for (const auto& a : phi.atoms) CHECK(a.pi2 == doctest::Approx(s.p0));
  CHECK(phi.mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("P2 O2 stopping update") {
  ProblemSpec s = test::sym02(2, 2, Variant::P2);
  InfoStateP2 psi = initial_info_state_p2(s);
  InfoStateP2 phi = q1_p2(psi, regions(std::nullopt, std::nullopt), kBlank, test::symmetric(0.2), 2);
  InfoStateP2 open = q2_p2(phi, {0.0, 1.0}, test::symmetric(0.2));
  CHECK(open.active_mass() == doctest::Approx(1.0).epsilon(1e-14));
  InfoStateP2 closed = q2_p2(phi, {0.5, 0.5}, test::symmetric(0.2));
  CHECK(closed.active_mass() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(closed.mass() == doctest::Approx(1.0).epsilon(1e-14));
  // Stopped atoms keep their O2 belief.
  InfoStateP2 later = q1_p2(closed, regions(std::nullopt, std::nullopt), kBlank, test::symmetric(0.2), 2);
  for (const auto& a : later.atoms) CHECK(a.d == 0);
}

TEST_CASE("information-state maps conserve mass on random rules") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ProblemSpec s = test::asym_ternary(3, 3, Variant::P2, 3);
  for (int draw = 0; draw < 200; ++draw) {
    double a = u(rng), b = u(rng);
    O1Stage st = regions(Interval{0.0, std::min(a, b)}, Interval{std::max(a, b), 1.0});
    StopThresholds th{0.3 * u(rng), 0.7 + 0.3 * u(rng)};
    InfoStateP2 psi = initial_info_state_p2(s);
    double total = 0.0;
    for (Symbol z : {kBlank, 0, 1}) {
      double pz = message_probability(psi, [&](double pi) { return st.classify(pi); }, z);
      if (pz <= 0.0) continue;
      InfoStateP2 phi = q1_p2(psi, st, z, s.channel2.at(1), 3);
      CHECK(std::abs(phi.mass() - 1.0) <= 1e-10);
      total += pz;
      if (z == kBlank) {
        InfoStateP2 next = q2_p2(phi, th, s.channel1.at(2));
        CHECK(std::abs(next.mass() - 1.0) <= 1e-10);
      }
    }
    CHECK(std::abs(total - 1.0) <= 1e-10);

    InfoStateP1 xi = initial_info_state_p1(s);
    if (message_probability(xi, [&](double pi) { return st.classify(pi); }, kBlank) > 0.0) {
      InfoStateP1 eta = q1_p1(xi, st, kBlank);
      CHECK(std::abs(q2_p1(eta, s.channel1.at(2)).mass() - 1.0) <= 1e-10);
    }
  }
}
