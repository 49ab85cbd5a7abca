#include "decseq/piecewise_linear.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "decseq/error.hpp"

namespace decseq {

namespace {

constexpr double kKnotMerge = 1e-14;

struct Line {
  double slope;
  double intercept;
  double at(double x) const { return intercept + slope * x; }
};

Line through(double x0, double v0, double x1, double v1) {
  double s = (v1 - v0) / (x1 - x0);
  return {s, v0 - s * x0};
}

Line of(const Affine& f) { return {f.h0 - f.h1, f.h1}; }

// Preimage under the Bayes map of posterior x for an event with likelihoods lik.
double preimage(double x, LikelihoodPair lik) {
  double num = x * lik.h1;
  return num / (num + (1.0 - x) * lik.h0);
}

double branch_value(const Branch& b, double pi) {
  double p = b.lik.prob(pi);
  if (p <= 0.0) return 0.0;
  double post = std::clamp(b.lik.h0 * pi / p, 0.0, 1.0);
  return p * (*b.next)(post);
}

}  // namespace

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> vs)
    : xs_(std::move(xs)), vs_(std::move(vs)) {
  if (xs_.size() != vs_.size() || xs_.size() < 2 || xs_.front() != 0.0 || xs_.back() != 1.0)
    throw Error("piecewise-linear function must have knots spanning [0,1]");
}

PiecewiseLinear PiecewiseLinear::from_grid(std::span<const double> values) {
  std::size_t n = values.size();
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  xs.back() = 1.0;
  return PiecewiseLinear(std::move(xs), {values.begin(), values.end()});
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= 0.0) return vs_.front();
  if (x >= 1.0) return vs_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  double x0 = xs_[i - 1], x1 = xs_[i];
  double w = (x - x0) / (x1 - x0);
  return vs_[i - 1] + w * (vs_[i] - vs_[i - 1]);
}

PiecewiseLinear PiecewiseLinear::simplified(double tol) const {
  std::vector<double> xs{xs_.front()}, vs{vs_.front()};
  for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
    double x = xs_[i];
    if (x - xs.back() < kKnotMerge || xs_.back() - x < kKnotMerge) continue;
    double interp = through(xs.back(), vs.back(), xs_[i + 1], vs_[i + 1]).at(x);
    if (std::abs(vs_[i] - interp) <= tol * (1.0 + std::abs(vs_[i]))) continue;
    xs.push_back(x);
    vs.push_back(vs_[i]);
  }
  xs.push_back(xs_.back());
  vs.push_back(vs_.back());
  return PiecewiseLinear(std::move(xs), std::move(vs));
}

bool PiecewiseLinear::concave(double tol) const {
  for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
    double interp = through(xs_[i - 1], vs_[i - 1], xs_[i + 1], vs_[i + 1]).at(xs_[i]);
    if (vs_[i] < interp - tol) return false;
  }
  return true;
}

double continuation_at(double step_cost, std::span<const Branch> branches, double pi) {
  double v = step_cost;
  for (const Branch& b : branches) v += branch_value(b, pi);
  return v;
}

PiecewiseLinear continuation(double step_cost, std::span<const Branch> branches) {
  std::vector<double> xs{0.0, 1.0};
  for (const Branch& b : branches) {
    if (b.lik.h0 <= 0.0 || b.lik.h1 <= 0.0) continue;  // posterior pinned to 0 or 1: affine term
    auto inner = b.next->knots();
    for (std::size_t i = 1; i + 1 < inner.size(); ++i) xs.push_back(preimage(inner[i], b.lik));
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> kx;
  for (double x : xs)
    if (kx.empty() || x - kx.back() > kKnotMerge) kx.push_back(x);
  if (kx.back() != 1.0) {
    if (1.0 - kx.back() <= kKnotMerge) kx.back() = 1.0;
    else kx.push_back(1.0);
  }
  std::vector<double> kv(kx.size());
  for (std::size_t i = 0; i < kx.size(); ++i) kv[i] = continuation_at(step_cost, branches, kx[i]);
  return PiecewiseLinear(std::move(kx), std::move(kv)).simplified();
}

PiecewiseLinear lower_envelope(std::span<const Affine> lines) {
  assert(!lines.empty());
  double v0 = lines.front()(0.0), v1 = lines.front()(1.0);
  return lower_envelope(PiecewiseLinear({0.0, 1.0}, {v0, v1}), lines);
}

PiecewiseLinear lower_envelope(const PiecewiseLinear& f, std::span<const Affine> lines) {
  auto xs = f.knots();
  auto vs = f.values();
  std::vector<Line> stops;
  for (const Affine& a : lines) stops.push_back(of(a));

  std::vector<double> ox, ov;
  std::vector<Line> cell;
  std::vector<double> cand;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double a = xs[i], b = xs[i + 1];
    cell.assign(stops.begin(), stops.end());
    cell.push_back(through(a, vs[i], b, vs[i + 1]));
    cand = {a, b};
    for (std::size_t p = 0; p < cell.size(); ++p)
      for (std::size_t q = p + 1; q < cell.size(); ++q) {
        double ds = cell[p].slope - cell[q].slope;
        if (ds == 0.0) continue;
        double x = (cell[q].intercept - cell[p].intercept) / ds;
        if (x > a && x < b) cand.push_back(x);
      }
    std::sort(cand.begin(), cand.end());
    for (std::size_t k = 0; k < cand.size(); ++k) {
      double x = cand[k];
      if (!ox.empty() && x - ox.back() < kKnotMerge) continue;
      // Endpoints use the stored knot value rather than the re-derived line.
      double v = x == a ? vs[i] : x == b ? vs[i + 1] : cell.back().at(x);
      for (std::size_t p = 0; p + 1 < cell.size(); ++p) v = std::min(v, cell[p].at(x));
      ox.push_back(x);
      ov.push_back(v);
    }
  }
  ox.back() = 1.0;
  return PiecewiseLinear(std::move(ox), std::move(ov)).simplified();
}

StopThresholds stop_thresholds(const Affine& stop0, const Affine& stop1, const PiecewiseLinear* cont) {
  Line l0 = of(stop0), l1 = of(stop1);
  double crossing = (l1.intercept - l0.intercept) / (l0.slope - l1.slope);
  crossing = std::clamp(crossing, 0.0, 1.0);
  if (cont == nullptr) return {crossing, crossing};

  auto xs = cont->knots();
  auto vs = cont->values();
  std::size_t n = xs.size();
  // a = sup{pi : cont(pi) >= stop1(pi)}, scanning left to right.
  double a = 1.0;
  {
    double prev = vs[0] - l1.at(xs[0]);
    if (prev < 0.0) a = 0.0;
    else
      for (std::size_t i = 1; i < n; ++i) {
        double d = vs[i] - l1.at(xs[i]);
        if (d < 0.0) {
          a = xs[i - 1] + (xs[i] - xs[i - 1]) * prev / (prev - d);
          break;
        }
        prev = d;
      }
  }
  // b = inf{pi : cont(pi) >= stop0(pi)}, scanning right to left.
  double b = 0.0;
  {
    double prev = vs[n - 1] - l0.at(xs[n - 1]);
    if (prev < 0.0) b = 1.0;
    else
      for (std::size_t i = n - 1; i-- > 0;) {
        double d = vs[i] - l0.at(xs[i]);
        if (d < 0.0) {
          b = xs[i + 1] - (xs[i + 1] - xs[i]) * prev / (prev - d);
          break;
        }
        prev = d;
      }
  }
  if (a < b) return {a, b};
  return {crossing, crossing};
}

}  // namespace decseq
