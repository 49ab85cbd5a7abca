#pragma once

#include <vector>

#include "decseq/model.hpp"
#include "decseq/policy.hpp"
#include "decseq/seq_decomp.hpp"
#include "decseq/wald.hpp"

namespace decseq {

enum class PolicyRole { O1, O2 };

std::string to_string(PolicyRole role);

struct TruncationCertificate {
  PolicyRole role = PolicyRole::O2;
  int horizon = 0;
  double tail = 0.0;     // probability the truncation binds
  double epsilon = 0.0;  // O2: L * tail; O1: (c2 * T2 + L) * tail
};

TruncationCertificate truncation_bound(PolicyRole role, double tail, const CostModel& costs, int T2);

// O2's value-iteration limit as T2 grows. P1 has only the post-message class, which is
// the stationary Wald problem; P2 adds one all-blank class per time t = 1..T1-1.
struct O2Infinite {
  Variant variant = Variant::P1;
  WaldInfinite wald;
  std::vector<double> grid;
  std::vector<std::vector<double>> pre_message;  // limit values, t = 1..T1-1
  std::vector<StopThresholds> pre_message_thresholds;
  int iterations = 0;
  std::vector<double> deltas;  // sup change over all blank classes per iteration
  double max_increase = 0.0;   // largest pointwise increase seen in any iterate sequence
  bool converged = false;
};

O2Infinite value_iterate_o2(const O1Policy& o1, const ProblemSpec& spec, const GridOptions& options = {});

// O1's value-iteration limit as T1 grows against a fixed bounded O2 policy.
struct O1Infinite {
  std::vector<double> grid;
  std::vector<double> values;  // limit of V_1
  O1Policy policy;             // regions extracted at grid nodes for the final horizon
  int iterations = 0;          // O1 horizon reached
  std::vector<double> deltas;
  double max_increase = 0.0;
  bool converged = false;
};

O1Infinite value_iterate_o1(const O2Policy& o2, const ProblemSpec& spec, const GridOptions& options = {});

struct EpsilonPair {
  DesignerSolution solution;
  TruncationCertificate o1;
  TruncationCertificate o2;
  int horizon = 0;  // T1 = T2
  std::vector<double> bounds;  // combined bound per horizon tried
  double epsilon() const { return o1.epsilon + o2.epsilon; }
};

// Solves at T1 = T2 = 1, 2, ... until both certificates are within eps / 2.
EpsilonPair epsilon_optimal_pair(const ProblemSpec& spec, double eps, int max_horizon = 4);

// Certificates for a solved finite-horizon pair: tails are P(tau >= T) measured exactly.
std::pair<TruncationCertificate, TruncationCertificate> certify(const DesignerSolution& sol, const ProblemSpec& spec);

}  // namespace decseq
