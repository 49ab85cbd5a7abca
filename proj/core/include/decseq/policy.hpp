#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decseq/belief.hpp"
#include "decseq/model.hpp"
#include "decseq/piecewise_linear.hpp"
#include "decseq/value_table.hpp"

namespace decseq {

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

// O1's rule at one time: send[m] is the region where symbol m is sent (nullopt: never).
// Regions are tested from the highest symbol down; outside all of them O1 sends the blank.
// Higher symbols sit at lower beliefs, so for M=2 send[1] = [alpha, beta] and
// send[0] = [delta, theta].
struct O1Stage {
  bool terminal = false;
  std::vector<std::optional<Interval>> send;

  Symbol classify(double pi) const;
  bool operator==(const O1Stage&) const = default;
};

struct O1Policy {
  int M = 2;
  std::vector<O1Stage> stages;  // t = 1..T1

  int horizon() const { return static_cast<int>(stages.size()); }
  const O1Stage& stage(int t) const;
  Symbol decide(int t, double pi) const { return stage(t).classify(pi); }
  // All non-terminal stages share the same regions.
  bool stationary() const;
};

// O2's policy. Message likelihoods are the ones O2 was designed against; they fix how
// O2 reads a message history, so O2 stays a function of its own information alone.
struct O2Policy {
  Variant variant = Variant::P1;
  int M = 2;
  int T1 = 1;
  int T2 = 1;
  bool bounded = true;
  std::vector<MessageLikelihoods> messages;  // t = 1..T1: P(Z_t = z | H, blanks before t)
  std::vector<StopThresholds> pre_message;   // P2, t = 1..T1-1, all-blank history
  std::vector<StopThresholds> wald;          // stage k = 0..T2

  // Likelihood used when z arrives at time t. Times past the table reuse the last entry;
  // an all-zero pair (a message O2 never expected) carries no information.
  LikelihoodPair message(int t, Symbol z) const;
  StopThresholds wald_stage(int k) const;
  StopThresholds pre_message_stage(int t) const;

  // P1: O2's belief when the final message z arrives at time t.
  double class_belief(double p0, int t, Symbol z) const;
  // P2: decision at time t with belief pi; final_time is 0 while only blanks arrived.
  Decision decide_p2(int t, double pi, int final_time) const;
  Decision decide_p1(int k, double pi) const;
};

// Bayes update that leaves the belief unchanged on a zero-probability event.
double tolerant_update(double pi, LikelihoodPair lik);

// Builds the O1 stage from labels on sorted atoms; throws StructureViolation when a
// symbol's atoms are not contiguous or, with `ordered`, symbols are not decreasing left
// to right. The order is a labeling convention the designer imposes; a best response
// to a fixed O2 follows whatever meaning O2 attaches to each symbol.
O1Stage extract_thresholds(const std::vector<double>& atoms, const std::vector<Symbol>& labels, int M,
                           bool terminal, bool ordered = true);

// O2 counterpart: decisions must follow the pattern 1* N* 0* over sorted atoms.
StopThresholds extract_stop_thresholds(const std::vector<double>& atoms, const std::vector<Decision>& labels);

// Number of finite thresholds (two per non-empty send region).
int threshold_count(const O1Stage& stage);

// Stage that sends nothing (non-terminal) or symbol 0 everywhere (terminal).
O1Stage idle_stage(int M, bool terminal);

}  // namespace decseq
