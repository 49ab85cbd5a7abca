#include "decseq/infinite_horizon.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "decseq/best_response.hpp"
#include "decseq/error.hpp"
#include "decseq/simulate.hpp"
#include "grid.hpp"

namespace decseq {

std::string to_string(PolicyRole role) { return role == PolicyRole::O1 ? "O1" : "O2"; }

TruncationCertificate truncation_bound(PolicyRole role, double tail, const CostModel& costs, int T2) {
  if (!(tail >= 0.0 && tail <= 1.0)) throw ValidationError("tail_prob", "must lie in [0, 1]");
  double L = with_derived_bound(costs).L;
  TruncationCertificate c;
  c.role = role;
  c.tail = tail;
  c.epsilon = role == PolicyRole::O2 ? L * tail : (costs.c2 * T2 + L) * tail;
  return c;
}

namespace {

void check_grid(const GridOptions& o) {
  if (o.grid_size < 3) throw ValidationError("grid_size", "must be at least 3");
  if (!(o.tol > 0.0)) throw ValidationError("tol", "must be positive");
  if (o.max_iterations < 1) throw ValidationError("max_iterations", "must be at least 1");
}

}  // namespace

O2Infinite value_iterate_o2(const O1Policy& o1, const ProblemSpec& spec, const GridOptions& options) {
  check_grid(options);
  validate(spec);
  if (!spec.stationary()) throw ValidationError("channels", "value iteration needs stationary channels");
  if (!o1.stationary()) throw ValidationError("o1", "value iteration needs a stationary O1 policy");
  if (o1.horizon() != spec.T1) throw ValidationError("o1", "O1 policy horizon differs from T1");

  O2Infinite out;
  out.variant = spec.variant;
  out.wald = solve_wald_infinite(spec.channel2, spec.costs, options);
  out.grid = out.wald.grid;
  if (spec.variant == Variant::P1 || spec.T1 == 1) {
    out.iterations = out.wald.iterations;
    out.deltas = out.wald.deltas;
    out.max_increase = out.wald.max_increase;
    out.converged = out.wald.converged;
    return out;
  }

  const std::size_t n = static_cast<std::size_t>(options.grid_size);
  const int T1 = spec.T1;
  const std::size_t classes = static_cast<std::size_t>(T1 - 1);
  const Affine stops[2] = {spec.costs.stop_line(0), spec.costs.stop_line(1)};
  const LikelihoodRows& r = spec.channel2.at(1);
  auto msgs = o1_message_likelihoods(o1, spec);

  // Wald iterates K^j; the blank classes at horizon T2 = T1 + m read K^{m} .. K^{m + T1 - 2}.
  std::deque<std::vector<double>> K{grid::envelope(n, stops)};
  int k_front = 0;
  auto wald_step = [&] {
    std::vector<grid::Branch> b;
    for (std::size_t y = 0; y < r.size(); ++y) b.push_back({{r.h0[y], r.h1[y]}, &K.back()});
    auto next = grid::envelope(grid::continuation(n, spec.costs.c2, b), stops);
    grid::sup_diff(K.back(), next, &out.max_increase);
    K.push_back(std::move(next));
  };
  auto iterate = [&](int top) -> const std::vector<double>& {
    return K.at(static_cast<std::size_t>(top - k_front));
  };

  // One backward pass over the blank classes given the post-message value at each time.
  auto backward = [&](const std::function<const std::vector<double>&(int)>& post,
                      std::vector<std::vector<double>>& conts) {
    std::vector<std::vector<double>> V(classes);
    conts.assign(classes, {});
    for (int t = T1 - 1; t >= 1; --t) {
      auto ti = static_cast<std::size_t>(t - 1);
      const MessageLikelihoods& m = msgs[static_cast<std::size_t>(t)];  // arrivals at t + 1
      std::vector<grid::Branch> b;
      for (std::size_t y = 0; y < r.size(); ++y) {
        for (Symbol z = 0; z < spec.M; ++z)
          b.push_back({{r.h0[y] * m.of(z).h0, r.h1[y] * m.of(z).h1}, &post(t + 1)});
        if (t + 1 <= T1 - 1) b.push_back({{r.h0[y] * m.blank.h0, r.h1[y] * m.blank.h1}, &V[ti + 1]});
      }
      conts[ti] = grid::continuation(n, spec.costs.c2, b);
      V[ti] = grid::envelope(conts[ti], stops);
    }
    return V;
  };

  std::vector<std::vector<double>> conts, prev;
  for (int m = 0; m < options.max_iterations; ++m) {
    while (k_front + static_cast<int>(K.size()) - 1 < m + T1 - 1) wald_step();
    while (k_front < m) {
      K.pop_front();
      ++k_front;
    }
    // Post-message value at time s under T2 = T1 + m is K^{T1 + m - s}.
    auto V = backward([&](int s) -> const std::vector<double>& { return iterate(T1 + m - s); }, conts);
    double kd = grid::sup_diff(K[K.size() - 2], K.back());
    if (!prev.empty()) {
      double d = kd;
      for (std::size_t c = 0; c < classes; ++c) d = std::max(d, grid::sup_diff(prev[c], V[c], &out.max_increase));
      out.deltas.push_back(d);
      out.iterations = m;
      if (d < options.tol) {
        out.converged = true;
        break;
      }
    }
    prev = std::move(V);
  }

  // Limit: the post-message branch uses the stationary Wald values.
  out.pre_message = backward([&](int) -> const std::vector<double>& { return out.wald.values; }, conts);
  for (const auto& c : conts) {
    PiecewiseLinear pc = PiecewiseLinear::from_grid(c);
    out.pre_message_thresholds.push_back(stop_thresholds(stops[0], stops[1], &pc));
  }
  return out;
}

O1Infinite value_iterate_o1(const O2Policy& o2, const ProblemSpec& spec, const GridOptions& options) {
  check_grid(options);
  validate(spec);
  if (!o2.bounded) throw ValidationError("o2", "O2 policy must have a bounded stopping time");
  if (!spec.channel1.stationary()) throw ValidationError("channel1", "value iteration needs a stationary channel");

  const std::size_t n = static_cast<std::size_t>(options.grid_size);
  const LikelihoodRows& r = spec.channel1.at(1);
  std::vector<std::vector<Affine>> lines;  // lines[t-1][z], grown on demand
  auto send = [&](int t) -> const std::vector<Affine>& {
    while (static_cast<int>(lines.size()) < t) {
      int s = static_cast<int>(lines.size()) + 1;
      std::vector<Affine> ls;
      for (Symbol z = 0; z < spec.M; ++z) ls.push_back(evaluate_o2_policy(o2, s, z, spec));
      lines.push_back(std::move(ls));
    }
    return lines[static_cast<std::size_t>(t - 1)];
  };

  O1Infinite out;
  out.grid = grid::nodes(n);
  std::vector<std::vector<double>> V, conts;
  std::vector<double> prev;
  int horizon = 0;
  for (int T = 1; T <= options.max_iterations; ++T) {
    V.assign(static_cast<std::size_t>(T), {});
    conts.assign(static_cast<std::size_t>(T), {});
    for (int t = T; t >= 1; --t) {
      auto ti = static_cast<std::size_t>(t - 1);
      const auto& ls = send(t);
      if (t == T) {
        V[ti] = grid::envelope(n, ls);
        continue;
      }
      std::vector<grid::Branch> b;
      for (std::size_t y = 0; y < r.size(); ++y) b.push_back({{r.h0[y], r.h1[y]}, &V[ti + 1]});
      conts[ti] = grid::continuation(n, spec.costs.c1, b);
      V[ti] = grid::envelope(conts[ti], ls);
    }
    horizon = T;
    if (!prev.empty()) {
      double d = grid::sup_diff(prev, V[0], &out.max_increase);
      out.deltas.push_back(d);
      if (d < options.tol) {
        out.converged = true;
        break;
      }
    }
    prev = V[0];
  }
  out.iterations = horizon;
  out.values = V[0];

  out.policy.M = spec.M;
  for (int t = 1; t <= horizon; ++t) {
    auto ti = static_cast<std::size_t>(t - 1);
    const auto& ls = send(t);
    std::vector<Symbol> labels;
    for (std::size_t i = 0; i < n; ++i) {
      double pi = out.grid[i];
      Symbol best = spec.M - 1;
      double v = ls[static_cast<std::size_t>(best)](pi);
      for (Symbol z = spec.M - 2; z >= 0; --z) {
        double s = ls[static_cast<std::size_t>(z)](pi);
        if (s < v - kTieTolerance) {
          v = s;
          best = z;
        }
      }
      if (t < horizon && conts[ti][i] < v - kTieTolerance) best = kBlank;
      labels.push_back(best);
    }
    out.policy.stages.push_back(extract_thresholds(out.grid, labels, spec.M, t == horizon, false));
  }
  return out;
}

std::pair<TruncationCertificate, TruncationCertificate> certify(const DesignerSolution& sol, const ProblemSpec& spec) {
  ThresholdO1 a(sol.o1, spec);
  ThresholdO2 b(sol.o2, spec);
  ExactEvaluation ev = exact_evaluate(a, b, spec);
  auto tail_from = [](const std::vector<double>& dist, int T) {
    double p = 0.0;
    for (std::size_t k = static_cast<std::size_t>(std::max(T, 0)); k < dist.size(); ++k) p += dist[k];
    return std::clamp(p, 0.0, 1.0);
  };
  TruncationCertificate c1 = truncation_bound(PolicyRole::O1, tail_from(ev.tau1, spec.T1), spec.costs, spec.T2);
  c1.horizon = spec.T1;
  TruncationCertificate c2 = truncation_bound(PolicyRole::O2, tail_from(ev.tau2, spec.T2), spec.costs, spec.T2);
  c2.horizon = spec.T2;
  return {c1, c2};
}

EpsilonPair epsilon_optimal_pair(const ProblemSpec& spec, double eps, int max_horizon) {
  if (!(eps > 0.0)) throw ValidationError("epsilon", "must be positive");
  if (max_horizon < 1) throw ValidationError("max_horizon", "must be at least 1");
  if (!spec.stationary()) throw ValidationError("channels", "epsilon_optimal_pair needs stationary channels");
  EpsilonPair out;
  double best = std::numeric_limits<double>::infinity();
  for (int T = 1; T <= max_horizon; ++T) {
    ProblemSpec s = spec;
    s.T1 = T;
    s.T2 = T;
    DesignerSolution sol = solve_designer(s);
    auto [c1, c2] = certify(sol, s);
    out.bounds.push_back(c1.epsilon + c2.epsilon);
    best = std::min(best, c1.epsilon + c2.epsilon);
    if (c1.epsilon <= eps / 2.0 && c2.epsilon <= eps / 2.0) {
      out.solution = std::move(sol);
      out.o1 = c1;
      out.o2 = c2;
      out.horizon = T;
      return out;
    }
  }
  throw UnattainableEpsilon(best, max_horizon);
}

}  // namespace decseq
