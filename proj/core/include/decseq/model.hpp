#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace decseq {

enum class Variant { P1, P2 };

std::string to_string(Variant v);

// Two likelihood rows over one time step's alphabet.
struct LikelihoodRows {
  std::vector<double> h0;  // P(y | H=0)
  std::vector<double> h1;  // P(y | H=1)

  std::size_t size() const { return h0.size(); }
  // P(y | pi) where pi = P(H=0).
  double prob(std::size_t y, double pi) const { return h0[y] * pi + h1[y] * (1.0 - pi); }
  bool operator==(const LikelihoodRows&) const = default;
};

// A pair of per-hypothesis likelihoods for one event (message, observation, ...).
struct LikelihoodPair {
  double h0 = 1.0;
  double h1 = 1.0;

  double prob(double pi) const { return h0 * pi + h1 * (1.0 - pi); }
  bool operator==(const LikelihoodPair&) const = default;
};

struct ObservationChannel {
  int observer = 1;
  // tables[t-1] is the channel at time t; a single table is replicated across time.
  std::vector<LikelihoodRows> tables;

  const LikelihoodRows& at(int t) const;
  bool stationary() const;
  // Number of time steps explicitly covered (unbounded when a single table is given).
  bool covers(int horizon) const { return tables.size() == 1 || static_cast<int>(tables.size()) >= horizon; }
};

// f(pi) = h0 * pi + h1 * (1 - pi): cost under H=0 weighted by pi plus cost under H=1.
struct Affine {
  double h0 = 0.0;
  double h1 = 0.0;

  double operator()(double pi) const { return h0 * pi + h1 * (1.0 - pi); }
  bool operator==(const Affine&) const = default;
};

struct CostModel {
  double c1 = 0.0;
  double c2 = 0.0;
  std::array<std::array<double, 2>, 2> J{};  // J[u][h]
  double L = 0.0;

  Affine stop_line(int u) const { return {J[u][0], J[u][1]}; }
};

double terminal_cost(int u, double pi, const CostModel& costs);
// Belief where declaring 0 and declaring 1 cost the same.
double terminal_crossing(const CostModel& costs);

struct ProblemSpec {
  double p0 = 0.5;
  ObservationChannel channel1{1, {}};
  ObservationChannel channel2{2, {}};
  CostModel costs;
  int T1 = 1;
  int T2 = 1;
  Variant variant = Variant::P1;
  int M = 2;

  bool stationary() const { return channel1.stationary() && channel2.stationary(); }
};

// Throws ValidationError naming the field path.
void validate(const ProblemSpec& spec);
void validate(const CostModel& costs, const std::string& path = "costs");
void validate(const ObservationChannel& channel, int horizon, const std::string& path);

// Fills L with max J entry when it is zero (unset).
CostModel with_derived_bound(CostModel costs);

}  // namespace decseq
