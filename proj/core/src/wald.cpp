#include "decseq/wald.hpp"

#include <algorithm>
#include <string>

#include "decseq/error.hpp"
#include "grid.hpp"

namespace decseq {

Decision apply_thresholds(const StopThresholds& th, double pi) {
  if (pi >= th.beta) return Decision::Declare0;
  if (pi <= th.alpha) return Decision::Declare1;
  return Decision::Continue;
}

std::vector<LikelihoodRows> channel_rows(const ObservationChannel& channel, int first, int T) {
  std::vector<LikelihoodRows> rows;
  for (int k = 0; k < T; ++k) rows.push_back(channel.at(first + k));
  return rows;
}

WaldSolution solve_wald_finite(std::span<const LikelihoodRows> rows, const CostModel& costs, int T,
                               const std::vector<std::vector<double>>& eval_points) {
  if (T < 0) throw ValidationError("T", "horizon must be non-negative");
  if (static_cast<int>(rows.size()) < T) throw ValidationError("rows", "fewer likelihood rows than the horizon");
  WaldSolution sol;
  sol.horizon = T;
  sol.costs = costs;
  sol.stages.resize(static_cast<std::size_t>(T) + 1);

  const Affine stops[2] = {costs.stop_line(0), costs.stop_line(1)};
  for (int k = T; k >= 0; --k) {
    WaldStage& st = sol.stages[static_cast<std::size_t>(k)];
    st.k = k;
    if (k == T) {
      st.value = lower_envelope(stops);
      st.thresholds = stop_thresholds(stops[0], stops[1], nullptr);
      continue;
    }
    const LikelihoodRows& r = rows[static_cast<std::size_t>(k)];
    const PiecewiseLinear& next = sol.stages[static_cast<std::size_t>(k) + 1].value;
    std::vector<Branch> branches;
    for (std::size_t y = 0; y < r.size(); ++y) branches.push_back({{r.h0[y], r.h1[y]}, &next});
    st.continuation = continuation(costs.c2, branches);
    st.value = lower_envelope(st.continuation, stops);
    st.thresholds = stop_thresholds(stops[0], stops[1], &st.continuation);
  }

  for (int k = 0; k <= T && !eval_points.empty(); ++k) {
    const auto& pts = eval_points.size() == 1 ? eval_points.front() : eval_points.at(static_cast<std::size_t>(k));
    const WaldStage& st = sol.stages[static_cast<std::size_t>(k)];
    ValueTable tab;
    tab.t = k;
    tab.history = "wald";
    for (double pi : pts) {
      tab.atoms.push_back(pi);
      tab.values.push_back(st.value(pi));
      tab.actions.push_back(static_cast<int>(apply_thresholds(st.thresholds, pi)));
    }
    sol.tables.push_back(std::move(tab));
  }
  return sol;
}

double wald_cost(const WaldSolution& sol, double pi, int remaining) {
  if (remaining < 0 || remaining > sol.horizon) throw ValidationError("remaining", "outside [0, T]");
  return sol.stage(sol.horizon - remaining).value(pi);
}

WaldInfinite solve_wald_infinite(const ObservationChannel& channel2, const CostModel& costs,
                                 const GridOptions& options) {
  if (!channel2.stationary()) throw ValidationError("channel2", "solve_wald_infinite needs a stationary channel");
  if (options.grid_size < 3) throw ValidationError("grid_size", "must be at least 3");
  if (!(options.tol > 0.0)) throw ValidationError("tol", "must be positive");

  const std::size_t n = static_cast<std::size_t>(options.grid_size);
  const LikelihoodRows& r = channel2.at(1);
  const Affine stops[2] = {costs.stop_line(0), costs.stop_line(1)};

  WaldInfinite out;
  out.grid = grid::nodes(n);
  std::vector<double> value = grid::envelope(n, stops);
  std::vector<double> cont;
  std::vector<grid::Branch> branches;
  for (int it = 0; it < options.max_iterations; ++it) {
    branches.clear();
    for (std::size_t y = 0; y < r.size(); ++y) branches.push_back({{r.h0[y], r.h1[y]}, &value});
    cont = grid::continuation(n, costs.c2, branches);
    std::vector<double> next = grid::envelope(cont, stops);
    double d = grid::sup_diff(value, next, &out.max_increase);
    value = std::move(next);
    out.deltas.push_back(d);
    out.iterations = it + 1;
    if (d < options.tol) {
      out.converged = true;
      break;
    }
  }
  PiecewiseLinear c = PiecewiseLinear::from_grid(cont);
  out.thresholds = stop_thresholds(stops[0], stops[1], &c);
  out.values = std::move(value);
  return out;
}

}  // namespace decseq
