#pragma once

#include <span>
#include <vector>

#include "decseq/model.hpp"

namespace decseq {

// Continuous piecewise-linear function on [0,1], stored as sorted knots.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> xs, std::vector<double> vs);

  static PiecewiseLinear constant(double v) { return PiecewiseLinear({0.0, 1.0}, {v, v}); }
  static PiecewiseLinear from_affine(const Affine& f) { return PiecewiseLinear({0.0, 1.0}, {f.h1, f.h0}); }
  // Samples on the uniform grid 0, 1/(n-1), ..., 1.
  static PiecewiseLinear from_grid(std::span<const double> values);

  double operator()(double x) const;
  bool empty() const { return xs_.empty(); }
  std::size_t size() const { return xs_.size(); }
  std::span<const double> knots() const { return xs_; }
  std::span<const double> values() const { return vs_; }

  // Drops knots that are collinear with their neighbours.
  PiecewiseLinear simplified(double tol = 1e-15) const;
  bool concave(double tol) const;

 private:
  std::vector<double> xs_;
  std::vector<double> vs_;
};

// One observation outcome feeding a backup: its likelihood pair and the
// value function at the next stage.
struct Branch {
  LikelihoodPair lik;
  const PiecewiseLinear* next = nullptr;
};

// pi -> step_cost + sum_o P(o|pi) * next_o(T_o(pi)), exact as a piecewise-linear function.
PiecewiseLinear continuation(double step_cost, std::span<const Branch> branches);
double continuation_at(double step_cost, std::span<const Branch> branches, double pi);

// Pointwise minimum of f and the given lines.
PiecewiseLinear lower_envelope(const PiecewiseLinear& f, std::span<const Affine> lines);
PiecewiseLinear lower_envelope(std::span<const Affine> lines);

// O2-style stopping thresholds: declare 1 for pi <= alpha, declare 0 for pi >= beta
// (checked first), continue strictly between.
struct StopThresholds {
  double alpha = 0.5;
  double beta = 0.5;
};

// Exact thresholds from the stop lines and the continuation function (null: no continuation).
// Stop wins ties against continuing; when the continuation never beats stopping, both
// thresholds sit at the crossing of the stop lines.
StopThresholds stop_thresholds(const Affine& stop0, const Affine& stop1, const PiecewiseLinear* cont);

}  // namespace decseq
