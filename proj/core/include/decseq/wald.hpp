#pragma once

#include <span>
#include <vector>

#include "decseq/model.hpp"
#include "decseq/piecewise_linear.hpp"
#include "decseq/value_table.hpp"

namespace decseq {

struct WaldStage {
  int k = 0;  // observations already taken; the stage has T - k remaining
  StopThresholds thresholds;
  PiecewiseLinear value;         // K^{T-k}
  PiecewiseLinear continuation;  // empty at k = T
};

// Finite-horizon Wald problem: rows[k] drives the observation taken when continuing at stage k.
struct WaldSolution {
  int horizon = 0;
  CostModel costs;
  std::vector<WaldStage> stages;  // k = 0..T
  std::vector<ValueTable> tables;

  const WaldStage& stage(int k) const { return stages.at(static_cast<std::size_t>(k)); }
};

// eval_points: one list of beliefs per stage, or a single list used at every stage.
WaldSolution solve_wald_finite(std::span<const LikelihoodRows> rows, const CostModel& costs, int T,
                               const std::vector<std::vector<double>>& eval_points = {});

// Rows for stages 0..T-1 read from channel times first..first+T-1.
std::vector<LikelihoodRows> channel_rows(const ObservationChannel& channel, int first, int T);

// K^{remaining}(pi). Exact off the evaluation atoms as well.
double wald_cost(const WaldSolution& sol, double pi, int remaining);

Decision apply_thresholds(const StopThresholds& th, double pi);

struct WaldInfinite {
  StopThresholds thresholds;
  std::vector<double> grid;
  std::vector<double> values;
  int iterations = 0;
  std::vector<double> deltas;  // sup-norm change per iteration
  double max_increase = 0.0;   // largest pointwise increase between iterates
  bool converged = false;
};

struct GridOptions {
  int grid_size = 1001;
  double tol = 1e-9;
  int max_iterations = 10000;
};

WaldInfinite solve_wald_infinite(const ObservationChannel& channel2, const CostModel& costs,
                                 const GridOptions& options = {});

}  // namespace decseq
