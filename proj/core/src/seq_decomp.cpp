#include "decseq/seq_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>

#include "decseq/error.hpp"
#include "decseq/info_state.hpp"
#include "decseq/wald.hpp"

namespace decseq {

namespace {

constexpr double kKeyScale = 1e10;
constexpr double kEdgeBelief = 1e-14;
constexpr double kImprovement = 1e-12;

using Key = std::vector<std::int64_t>;

std::int64_t rounded(double x) { return std::llround(x * kKeyScale); }

Key key_of(const InfoStateP1& s) {
  Key k{s.t};
  for (const auto& a : s.atoms) k.insert(k.end(), {a.h, rounded(a.pi1), rounded(a.mass)});
  return k;
}

Key key_of(const InfoStateP2& s, int phase) {
  Key k{s.t, phase};
  for (const auto& a : s.atoms) k.insert(k.end(), {a.h, a.d, rounded(a.pi1), rounded(a.pi2), rounded(a.mass)});
  return k;
}

// Classifier that maps each atom to its label by position in the sorted atom list.
Classifier label_classifier(const std::vector<double>& atoms, const std::vector<Symbol>& labels) {
  return [&atoms, &labels](double pi) {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), pi - kAtomTolerance);
    return labels[static_cast<std::size_t>(it - atoms.begin())];
  };
}

std::vector<double> active_pi2(const InfoStateP2& s) {
  std::vector<double> xs;
  for (const auto& a : s.atoms)
    if (a.d == 1) xs.push_back(a.pi2);
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > kAtomTolerance) out.push_back(x);
  return out;
}

O2Policy skeleton(const ProblemSpec& spec, const WaldSolution& wald) {
  O2Policy o2;
  o2.variant = spec.variant;
  o2.M = spec.M;
  o2.T1 = spec.T1;
  o2.T2 = spec.T2;
  for (const auto& st : wald.stages) o2.wald.push_back(st.thresholds);
  MessageLikelihoods none;
  none.symbol.assign(static_cast<std::size_t>(spec.M), {0.0, 0.0});
  o2.messages.assign(static_cast<std::size_t>(spec.T1), none);
  if (spec.variant == Variant::P2)
    o2.pre_message.assign(static_cast<std::size_t>(spec.T1 - 1), wald.stages.back().thresholds);
  return o2;
}

O1Policy idle_policy(const ProblemSpec& spec) {
  O1Policy o1;
  o1.M = spec.M;
  for (int t = 1; t <= spec.T1; ++t) o1.stages.push_back(idle_stage(spec.M, t == spec.T1));
  return o1;
}

struct Choice {
  double cost = 0.0;
  std::size_t index = 0;  // into the labeling list
};

class P1Designer {
 public:
  explicit P1Designer(const ProblemSpec& spec)
      : spec_(spec), wald_(solve_wald_finite(channel_rows(spec.channel2, 1, spec.T2), spec.costs, spec.T2)) {}

  DesignerSolution run() {
    DesignerSolution sol;
    sol.variant = Variant::P1;
    InfoStateP1 xi = initial_info_state_p1(spec_);
    sol.cost = value(xi);
    sol.o1 = idle_policy(spec_);
    sol.o2 = skeleton(spec_, wald_);
    // Replay the argmin path along the all-blank history.
    while (true) {
      const Choice& c = memo_.at(key_of(xi));
      auto atoms = o1_atoms(xi);
      bool terminal = xi.t == spec_.T1;
      const auto& labels = labelings(atoms.size(), terminal)[c.index];
      O1Stage st = extract_thresholds(atoms, labels, spec_.M, terminal);
      sol.o1.stages[static_cast<std::size_t>(xi.t - 1)] = st;
      Classifier cls = label_classifier(atoms, labels);
      sol.o2.messages[static_cast<std::size_t>(xi.t - 1)] = info_message_likelihood(xi, cls, spec_.M);
      if (terminal || message_probability(xi, cls, kBlank) <= 0.0) break;
      xi = q2_p1(q1_p1(xi, cls, kBlank), spec_.channel1.at(xi.t + 1));
    }
    sol.stats = stats_;
    return sol;
  }

 private:
  const std::vector<std::vector<Symbol>>& labelings(std::size_t n, bool terminal) {
    auto& slot = label_cache_[{n, terminal}];
    if (slot.empty()) slot = o1_labelings(n, spec_.M, terminal);
    return slot;
  }

  double value(const InfoStateP1& xi) {
    Key key = key_of(xi);
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second.cost;
    }
    ++stats_.nodes_expanded;
    auto atoms = o1_atoms(xi);
    bool terminal = xi.t == spec_.T1;
    const auto& all = labelings(atoms.size(), terminal);
    Choice best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < all.size(); ++i) {
      ++stats_.partitions_evaluated;
      Classifier cls = label_classifier(atoms, all[i]);
      double cost = spec_.costs.c1;
      std::vector<double> m0(static_cast<std::size_t>(spec_.M), 0.0), m1(m0);
      double blank = 0.0;
      for (const auto& a : xi.atoms) {
        Symbol z = cls(a.pi1);
        if (z == kBlank) blank += a.mass;
        else (a.h == 0 ? m0 : m1)[static_cast<std::size_t>(z)] += a.mass;
      }
      for (std::size_t z = 0; z < m0.size(); ++z) {
        double p = m0[z] + m1[z];
        if (p > 0.0) cost += p * wald_.stage(0).value(m0[z] / p);
      }
      if (blank > 0.0) cost += blank * value(q2_p1(q1_p1(xi, cls, kBlank), spec_.channel1.at(xi.t + 1)));
      if (cost < best.cost - kImprovement) best = {cost, i};
    }
    memo_[key] = best;
    return best.cost;
  }

  const ProblemSpec& spec_;
  WaldSolution wald_;
  std::map<Key, Choice> memo_;
  std::map<std::pair<std::size_t, bool>, std::vector<std::vector<Symbol>>> label_cache_;
  DesignerStats stats_;
};

class P2Designer {
 public:
  explicit P2Designer(const ProblemSpec& spec)
      : spec_(spec), wald_(solve_wald_finite(channel_rows(spec.channel2, 1, spec.T2), spec.costs, spec.T2)) {}

  DesignerSolution run() {
    DesignerSolution sol;
    sol.variant = Variant::P2;
    InfoStateP2 psi = initial_info_state_p2(spec_);
    sol.cost = value_o1(psi);
    sol.o1 = idle_policy(spec_);
    sol.o2 = skeleton(spec_, wald_);
    while (true) {
      const Choice& c = memo_.at(key_of(psi, 0));
      auto atoms = o1_atoms(psi);
      bool terminal = psi.t == spec_.T1;
      const auto& labels = labelings(atoms.size(), terminal)[c.index];
      auto ti = static_cast<std::size_t>(psi.t - 1);
      sol.o1.stages[ti] = extract_thresholds(atoms, labels, spec_.M, terminal);
      Classifier cls = label_classifier(atoms, labels);
      sol.o2.messages[ti] = info_message_likelihood(psi, cls, spec_.M);
      if (terminal || message_probability(psi, cls, kBlank) <= 0.0) break;
      InfoStateP2 phi = q1_p2(psi, cls, kBlank, spec_.channel2.at(psi.t), spec_.M);
      const Choice& g = memo_.at(key_of(phi, 1));
      auto o2atoms = active_pi2(phi);
      StopThresholds th = o2atoms.empty() ? wald_.stages.back().thresholds
                                          : extract_stop_thresholds(o2atoms, o2_labelings(o2atoms)[g.index]);
      sol.o2.pre_message[ti] = th;
      psi = q2_p2(phi, th, spec_.channel1.at(psi.t + 1));
    }
    sol.stats = stats_;
    return sol;
  }

 private:
  const std::vector<std::vector<Symbol>>& labelings(std::size_t n, bool terminal) {
    auto& slot = label_cache_[{n, terminal}];
    if (slot.empty()) slot = o1_labelings(n, spec_.M, terminal);
    return slot;
  }

  // F*_t: O1 chooses its partition at time t.
  double value_o1(const InfoStateP2& psi) {
    Key key = key_of(psi, 0);
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second.cost;
    }
    ++stats_.nodes_expanded;
    auto atoms = o1_atoms(psi);
    bool terminal = psi.t == spec_.T1;
    const auto& all = labelings(atoms.size(), terminal);
    const LikelihoodRows& r2 = spec_.channel2.at(psi.t);
    const PiecewiseLinear& K = wald_.stage(psi.t).value;
    double base = spec_.costs.c1 + spec_.costs.c2 * psi.active_mass();
    Choice best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < all.size(); ++i) {
      ++stats_.partitions_evaluated;
      Classifier cls = label_classifier(atoms, all[i]);
      double cost = base;
      for (Symbol z = 0; z < spec_.M; ++z) {
        double pz = message_probability(psi, cls, z);
        if (pz <= 0.0) continue;
        InfoStateP2 phi = q1_p2(psi, cls, z, r2, spec_.M);
        for (const auto& a : phi.atoms)
          if (a.d == 1) cost += pz * a.mass * K(a.pi2);
      }
      double pb = terminal ? 0.0 : message_probability(psi, cls, kBlank);
      if (pb > 0.0) cost += pb * value_o2(q1_p2(psi, cls, kBlank, r2, spec_.M));
      if (cost < best.cost - kImprovement) best = {cost, i};
    }
    memo_[key] = best;
    return best.cost;
  }

  // G*_t: O2 chooses its stopping interval after the blank at time t.
  double value_o2(const InfoStateP2& phi) {
    Key key = key_of(phi, 1);
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second.cost;
    }
    ++stats_.nodes_expanded;
    auto atoms = active_pi2(phi);
    const LikelihoodRows& r1 = spec_.channel1.at(phi.t + 1);
    Choice best{std::numeric_limits<double>::infinity(), 0};
    if (atoms.empty()) {
      best.cost = value_o1(q2_p2(phi, wald_.stages.back().thresholds, r1));
    } else {
      auto all = o2_labelings(atoms);
      for (std::size_t i = 0; i < all.size(); ++i) {
        ++stats_.partitions_evaluated;
        StopThresholds th = extract_stop_thresholds(atoms, all[i]);
        double cost = 0.0;
        for (const auto& a : phi.atoms) {
          if (a.d == 0) continue;
          Decision d = apply_thresholds(th, a.pi2);
          if (d != Decision::Continue) cost += a.mass * spec_.costs.J[static_cast<int>(d)][a.h];
        }
        cost += value_o1(q2_p2(phi, th, r1));
        if (cost < best.cost - kImprovement) best = {cost, i};
      }
    }
    memo_[key] = best;
    return best.cost;
  }

  const ProblemSpec& spec_;
  WaldSolution wald_;
  std::map<Key, Choice> memo_;
  std::map<std::pair<std::size_t, bool>, std::vector<std::vector<Symbol>>> label_cache_;
  DesignerStats stats_;
};

}  // namespace

std::vector<std::vector<Symbol>> o1_labelings(std::size_t n, int M, bool terminal) {
  std::vector<std::vector<Symbol>> out;
  std::vector<Symbol> cur;
  // last: lowest symbol used so far (M if none); open: the previous label is `last`.
  std::function<void(Symbol, bool)> walk = [&](Symbol last, bool open) {
    if (cur.size() == n) {
      out.push_back(cur);
      return;
    }
    if (!terminal) {
      cur.push_back(kBlank);
      walk(last, false);
      cur.pop_back();
    }
    if (open) {
      cur.push_back(last);
      walk(last, true);
      cur.pop_back();
    }
    for (Symbol s = last - 1; s >= 0; --s) {
      cur.push_back(s);
      walk(s, true);
      cur.pop_back();
    }
  };
  walk(M, false);
  return out;
}

std::vector<std::vector<Decision>> o2_labelings(const std::vector<double>& atoms) {
  std::size_t n = atoms.size();
  std::size_t zeros = 0, ones = 0;
  while (zeros < n && atoms[zeros] <= kEdgeBelief) ++zeros;
  while (ones < n - zeros && atoms[n - 1 - ones] >= 1.0 - kEdgeBelief) ++ones;
  std::vector<std::vector<Decision>> out;
  for (std::size_t a = zeros; a <= n - ones; ++a)
    for (std::size_t c = a; c <= n - ones; ++c) {
      std::vector<Decision> l(n, Decision::Declare0);
      for (std::size_t i = 0; i < a; ++i) l[i] = Decision::Declare1;
      for (std::size_t i = a; i < c; ++i) l[i] = Decision::Continue;
      out.push_back(std::move(l));
    }
  return out;
}

DesignerSolution solve_p1(const ProblemSpec& spec) {
  validate(spec);
  if (spec.variant != Variant::P1) throw ValidationError("variant", "solve_p1 needs variant P1");
  return P1Designer(spec).run();
}

DesignerSolution solve_p2(const ProblemSpec& spec) {
  validate(spec);
  if (spec.variant != Variant::P2) throw ValidationError("variant", "solve_p2 needs variant P2");
  return P2Designer(spec).run();
}

DesignerSolution solve_designer(const ProblemSpec& spec) {
  return spec.variant == Variant::P1 ? solve_p1(spec) : solve_p2(spec);
}

}  // namespace decseq
