#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "decseq/belief.hpp"
#include "decseq/model.hpp"
#include "decseq/simulate.hpp"

namespace decseq {

using History = std::vector<int>;

// O1 map from observation history to message; only histories reached while O1 is still
// sending blanks are present.
class O1Table final : public O1Behavior {
 public:
  O1Table(int horizon, std::map<History, Symbol> entries) : horizon_(horizon), entries_(std::move(entries)) {}
  int horizon() const override { return horizon_; }
  Symbol decide(int t, std::span<const int> y1) const override;
  const std::map<History, Symbol>& entries() const { return entries_; }

 private:
  int horizon_;
  std::map<History, Symbol> entries_;
};

// O2 map from (visible message, own observation history) to decision.
class O2Table final : public O2Behavior {
 public:
  using Key = std::tuple<int, Symbol, History>;  // message time, symbol, y2 history
  O2Table(int horizon, std::map<Key, Decision> entries) : horizon_(horizon), entries_(std::move(entries)) {}
  int horizon() const override { return horizon_; }
  Decision decide(int step, std::span<const int> y2, MessageEvent msg) const override;
  const std::map<Key, Decision>& entries() const { return entries_; }

 private:
  int horizon_;
  std::map<Key, Decision> entries_;
};

struct OracleOptions {
  std::uint64_t cap = 100'000'000;
  // Enumerate every (O1, O2) table pair instead of minimising O2 per O1 table.
  bool literal = false;
};

struct OracleResult {
  double cost = 0.0;
  double verified_cost = 0.0;  // exact_cost of the returned tables
  O1Table o1{1, {}};
  O2Table o2{1, {}};
  std::uint64_t o1_policies = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t pruned = 0;
  // Some optimal pair has interval-shaped regions as functions of the induced beliefs.
  bool structured_optimum = false;
};

OracleResult enumerate_policies_p1(const ProblemSpec& spec, const OracleOptions& options = {});
OracleResult enumerate_policies_p2(const ProblemSpec& spec, const OracleOptions& options = {});
OracleResult enumerate_policies(const ProblemSpec& spec, const OracleOptions& options = {});

// Fixed-partner oracles: every reduced O1 table against a fixed O2, or the exhaustive
// O2 tree minimum against a fixed O1.
OracleResult best_o1_against(const O2Behavior& o2, const ProblemSpec& spec, const OracleOptions& options = {});
OracleResult best_o2_against(const O1Behavior& o1, const ProblemSpec& spec);

// The history table an O1 behaviour induces on every history it can reach with blanks.
O1Table tabulate(const O1Behavior& o1, const ProblemSpec& spec);

// Estimated work (O1 tables times O2 work per table, or table pairs in literal mode).
std::uint64_t oracle_work_estimate(const ProblemSpec& spec, bool literal);

struct StoppingRuleOracle {
  double cost = 0.0;
  std::uint64_t rules = 0;
};

// Minimum over every deterministic history-indexed stopping rule of the Wald problem,
// by literal enumeration; rows[k] drives the (k+1)-th observation.
StoppingRuleOracle enumerate_stopping_rules(double prior, std::span<const LikelihoodRows> rows,
                                            const CostModel& costs, int T);

}  // namespace decseq
