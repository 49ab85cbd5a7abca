#pragma once

#include <span>
#include <vector>

#include "decseq/belief.hpp"
#include "decseq/model.hpp"
#include "decseq/piecewise_linear.hpp"
#include "decseq/policy.hpp"
#include "decseq/value_table.hpp"
#include "decseq/wald.hpp"

namespace decseq {

// O2's expected downstream cost given the history (blanks, then final_z), per hypothesis:
// h0 is the cost under H=0 (A), h1 under H=1 (B). For P2 it covers O2's whole episode.
Affine evaluate_o2_policy(const O2Policy& o2, std::span<const Symbol> history, Symbol final_z,
                          const ProblemSpec& spec);
Affine evaluate_o2_policy(const O2Policy& o2, int final_time, Symbol final_z, const ProblemSpec& spec);

// P(Z_t = z | H, blanks before t) for t = 1..T1 under an O1 policy.
std::vector<MessageLikelihoods> o1_message_likelihoods(const O1Policy& o1, const ProblemSpec& spec);
// E[c1 * tau1].
double o1_expected_delay(const O1Policy& o1, const ProblemSpec& spec);

struct O1BestResponse {
  O1Policy policy;
  std::vector<ValueTable> tables;         // t = 1..T1
  std::vector<PiecewiseLinear> values;    // V_t
  std::vector<std::vector<Affine>> send;  // send[t-1][z]
  double cost = 0.0;
};

O1BestResponse o1_best_response(const O2Policy& o2, const ProblemSpec& spec);

struct O2BestResponse {
  O2Policy policy;
  WaldSolution wald;
  std::vector<PiecewiseLinear> pre_message_values;  // P2: t = 1..T1-1
  std::vector<ValueTable> tables;
  double cost = 0.0;
};

O2BestResponse o2_best_response(const O1Policy& o1, const ProblemSpec& spec);

struct PbpoResult {
  O1Policy o1;
  O2Policy o2;
  std::vector<double> cost_trace;  // [0]: O1 best response against init; then one entry per round
  int rounds = 0;
};

PbpoResult pbpo_iteration(const ProblemSpec& spec, const O2Policy& init, int max_rounds);

// O1 sends at t=1 with the split at the prior; O2 best-responds to it.
O1Policy default_o1_init(const ProblemSpec& spec);
O2Policy default_o2_init(const ProblemSpec& spec);

// Tie tolerance shared by the best responses: a send/stop wins unless beaten by more.
inline constexpr double kTieTolerance = 1e-12;

}  // namespace decseq
