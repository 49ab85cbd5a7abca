#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "decseq/belief.hpp"
#include "decseq/model.hpp"
#include "decseq/policy.hpp"

namespace decseq {

// O1's final message as seen by O2; time 0 means only blanks so far.
struct MessageEvent {
  int time = 0;
  Symbol symbol = kBlank;
};

// Policies as functions of raw histories, so threshold policies and the oracle's
// history tables are evaluated by the same accountant.
class O1Behavior {
 public:
  virtual ~O1Behavior() = default;
  virtual int horizon() const = 0;
  // y1 holds Y^1_1..Y^1_t.
  virtual Symbol decide(int t, std::span<const int> y1) const = 0;
};

class O2Behavior {
 public:
  virtual ~O2Behavior() = default;
  virtual int horizon() const = 0;
  // P1: step k >= 0 counts O2 observations after the message. P2: step t >= 1 is the time.
  // y2 holds the observations taken so far; msg is what O2 has seen of O1's final message.
  virtual Decision decide(int step, std::span<const int> y2, MessageEvent msg) const = 0;
};

class ThresholdO1 final : public O1Behavior {
 public:
  ThresholdO1(const O1Policy& policy, const ProblemSpec& spec) : policy_(policy), spec_(spec) {}
  int horizon() const override { return policy_.horizon(); }
  Symbol decide(int t, std::span<const int> y1) const override;

 private:
  const O1Policy& policy_;
  const ProblemSpec& spec_;
};

class ThresholdO2 final : public O2Behavior {
 public:
  ThresholdO2(const O2Policy& policy, const ProblemSpec& spec) : policy_(policy), spec_(spec) {}
  int horizon() const override { return spec_.T2; }
  Decision decide(int step, std::span<const int> y2, MessageEvent msg) const override;
  double belief(int step, std::span<const int> y2, MessageEvent msg) const;

 private:
  const O2Policy& policy_;
  const ProblemSpec& spec_;
};

struct ExactEvaluation {
  double cost = 0.0;
  double path_mass = 0.0;
  std::array<double, 2> cost_given_h{};
  std::vector<double> tau1;  // tau1[t] = P(tau1 = t)
  std::vector<double> tau2;  // tau2[k] = P(tau2 = k)
  double expected_delay1 = 0.0;  // E[c1 tau1]
};

ExactEvaluation exact_evaluate(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec);
double exact_cost(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec);
double exact_cost(const O1Policy& o1, const O2Policy& o2, const ProblemSpec& spec);

// O2's expected cost from receiving `msg` on, per hypothesis (index h); for P2 this
// includes everything O2 pays over the whole episode given that message history.
std::array<double, 2> o2_cost_given_message(const O2Behavior& o2, const ProblemSpec& spec, MessageEvent msg);

struct EpisodeOutcome {
  int h = 0;
  int tau1 = 0;
  int tau2 = 0;
  int u = 0;
  double cost = 0.0;
  bool operator==(const EpisodeOutcome&) const = default;
};

// Counter-based stream: the same (seed, episode) always yields the same episode.
class EpisodeRng {
 public:
  EpisodeRng(std::uint64_t seed, std::uint64_t episode);
  double uniform();
  std::size_t sample(std::span<const double> probs);

 private:
  std::uint64_t state_;
};

EpisodeOutcome simulate_once(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec, EpisodeRng& rng);

struct CostEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  bool stderr_defined = false;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

// Parallel over episodes (bounded by DECSEQ_THREADS); aggregation order is fixed.
CostEstimate estimate_cost(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec,
                           std::uint64_t n, std::uint64_t seed);
CostEstimate estimate_cost(const O1Policy& o1, const O2Policy& o2, const ProblemSpec& spec, std::uint64_t n,
                           std::uint64_t seed);

}  // namespace decseq
