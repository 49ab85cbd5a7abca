#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "decseq/model.hpp"
#include "decseq/parallel.hpp"

namespace decseq::grid {

inline double node(std::size_t i, std::size_t n) {
  return i + 1 == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
}

inline std::vector<double> nodes(std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = node(i, n);
  return xs;
}

// Linear interpolation of uniform-grid samples.
inline double interp(std::span<const double> vs, double x) {
  std::size_t n = vs.size();
  double s = std::clamp(x, 0.0, 1.0) * static_cast<double>(n - 1);
  std::size_t i = std::min(static_cast<std::size_t>(s), n - 2);
  double w = s - static_cast<double>(i);
  return vs[i] + w * (vs[i + 1] - vs[i]);
}

struct Branch {
  LikelihoodPair lik;
  const std::vector<double>* next = nullptr;
};

inline double continuation_at(double step_cost, std::span<const Branch> branches, double pi) {
  double v = step_cost;
  for (const Branch& b : branches) {
    double p = b.lik.prob(pi);
    if (p <= 0.0) continue;
    v += p * interp(*b.next, std::clamp(b.lik.h0 * pi / p, 0.0, 1.0));
  }
  return v;
}

inline std::vector<double> continuation(std::size_t n, double step_cost, std::span<const Branch> branches) {
  std::vector<double> out(n);
  parallel_chunks(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = continuation_at(step_cost, branches, node(i, n));
  });
  return out;
}

inline std::vector<double> envelope(std::span<const double> cont, std::span<const Affine> stops) {
  std::size_t n = cont.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = node(i, n);
    double v = cont[i];
    for (const Affine& a : stops) v = std::min(v, a(x));
    out[i] = v;
  }
  return out;
}

inline std::vector<double> envelope(std::size_t n, std::span<const Affine> stops) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = node(i, n);
    double v = stops.front()(x);
    for (const Affine& a : stops) v = std::min(v, a(x));
    out[i] = v;
  }
  return out;
}

inline double sup_diff(std::span<const double> a, std::span<const double> b, double* max_increase = nullptr) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    if (max_increase) *max_increase = std::max(*max_increase, b[i] - a[i]);
  }
  return d;
}

}  // namespace decseq::grid
