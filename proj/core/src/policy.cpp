#include "decseq/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decseq/error.hpp"
#include "decseq/wald.hpp"

namespace decseq {

Symbol O1Stage::classify(double pi) const {
  for (int m = static_cast<int>(send.size()) - 1; m >= 0; --m)
    if (send[static_cast<std::size_t>(m)] && send[static_cast<std::size_t>(m)]->contains(pi)) return m;
  if (!terminal) return kBlank;
  // Terminal regions cover [0,1]; guard against hand-built gaps with the nearest region.
  Symbol best = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < send.size(); ++m) {
    if (!send[m]) continue;
    double d = pi < send[m]->lo ? send[m]->lo - pi : pi - send[m]->hi;
    if (d < gap) {
      gap = d;
      best = static_cast<Symbol>(m);
    }
  }
  return best;
}

const O1Stage& O1Policy::stage(int t) const {
  if (t < 1 || t > horizon()) throw ValidationError("o1", "no O1 stage at time " + std::to_string(t));
  return stages[static_cast<std::size_t>(t - 1)];
}

bool O1Policy::stationary() const {
  for (std::size_t i = 1; i + 1 < stages.size(); ++i)
    if (!(stages[i] == stages[0])) return false;
  return true;
}

double tolerant_update(double pi, LikelihoodPair lik) {
  double den = lik.prob(pi);
  if (!(den > 0.0)) return pi;
  return std::clamp(lik.h0 * pi / den, 0.0, 1.0);
}

LikelihoodPair O2Policy::message(int t, Symbol z) const {
  if (messages.empty() || t < 1) return {1.0, 1.0};
  std::size_t i = std::min(static_cast<std::size_t>(t), messages.size()) - 1;
  if (z != kBlank && z >= static_cast<int>(messages[i].symbol.size())) return {1.0, 1.0};
  LikelihoodPair lik = messages[i].of(z);
  if (lik.h0 == 0.0 && lik.h1 == 0.0) return {1.0, 1.0};
  return lik;
}

StopThresholds O2Policy::wald_stage(int k) const {
  if (wald.empty()) throw ValidationError("o2.wald", "missing Wald table");
  std::size_t i = std::min(static_cast<std::size_t>(std::max(k, 0)), wald.size() - 1);
  return wald[i];
}

StopThresholds O2Policy::pre_message_stage(int t) const {
  if (t >= 1 && t <= static_cast<int>(pre_message.size())) return pre_message[static_cast<std::size_t>(t - 1)];
  return wald.back();
}

double O2Policy::class_belief(double p0, int t, Symbol z) const {
  double pi = p0;
  for (int s = 1; s < t; ++s) pi = tolerant_update(pi, message(s, kBlank));
  return tolerant_update(pi, message(t, z));
}

Decision O2Policy::decide_p1(int k, double pi) const { return apply_thresholds(wald_stage(k), pi); }

Decision O2Policy::decide_p2(int t, double pi, int final_time) const {
  if (t >= T2) return apply_thresholds(wald_stage(T2), pi);
  if (final_time > 0 && final_time <= t) return apply_thresholds(wald_stage(t), pi);
  return apply_thresholds(pre_message_stage(t), pi);
}

namespace {

double mid(double a, double b) { return 0.5 * (a + b); }

}  // namespace

O1Stage extract_thresholds(const std::vector<double>& atoms, const std::vector<Symbol>& labels, int M,
                           bool terminal, bool ordered) {
  if (atoms.size() != labels.size()) throw ValidationError("labels", "one label per atom required");
  // Merge atoms that are numerically the same belief.
  std::vector<double> xs;
  std::vector<Symbol> ls;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0 && atoms[i] < atoms[i - 1]) throw ValidationError("atoms", "atoms must be sorted");
    if (!xs.empty() && atoms[i] - xs.back() <= kAtomTolerance) continue;
    xs.push_back(atoms[i]);
    ls.push_back(labels[i]);
  }

  O1Stage stage;
  stage.terminal = terminal;
  stage.send.assign(static_cast<std::size_t>(M), std::nullopt);
  std::vector<int> first(static_cast<std::size_t>(M), -1), last(static_cast<std::size_t>(M), -1);
  Symbol prev = M;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    Symbol z = ls[i];
    if (z == kBlank) {
      if (terminal) throw StructureViolation("structure violation: blank at the terminal time");
      continue;
    }
    if (z < 0 || z >= M) throw ValidationError("labels", "symbol outside the message alphabet");
    auto m = static_cast<std::size_t>(z);
    if (ordered && z > prev) throw StructureViolation("structure violation: symbols not decreasing in belief");
    if (last[m] >= 0 && last[m] != static_cast<int>(i) - 1)
      throw StructureViolation("structure violation: region of symbol " + std::to_string(z) + " not an interval");
    if (first[m] < 0) first[m] = static_cast<int>(i);
    last[m] = static_cast<int>(i);
    prev = z;
  }
  int n = static_cast<int>(xs.size());
  for (std::size_t m = 0; m < static_cast<std::size_t>(M); ++m) {
    if (first[m] < 0) continue;
    int i = first[m], j = last[m];
    double lo = i == 0 ? 0.0 : mid(xs[static_cast<std::size_t>(i - 1)], xs[static_cast<std::size_t>(i)]);
    double hi = j == n - 1 ? 1.0 : mid(xs[static_cast<std::size_t>(j)], xs[static_cast<std::size_t>(j + 1)]);
    stage.send[m] = Interval{lo, hi};
  }
  if (terminal && n == 0) stage.send[0] = Interval{0.0, 1.0};
  return stage;
}

StopThresholds extract_stop_thresholds(const std::vector<double>& atoms, const std::vector<Decision>& labels) {
  std::size_t n = atoms.size();
  std::size_t a = 0;
  while (a < n && labels[a] == Decision::Declare1) ++a;
  std::size_t c = a;
  while (c < n && labels[c] == Decision::Continue) ++c;
  for (std::size_t i = c; i < n; ++i)
    if (labels[i] != Decision::Declare0)
      throw StructureViolation("structure violation: O2 continuation region not an interval");
  StopThresholds th;
  th.alpha = a == 0 ? 0.0 : a == n ? 1.0 : mid(atoms[a - 1], atoms[a]);
  th.beta = c == n ? 1.0 : c == 0 ? 0.0 : mid(atoms[c - 1], atoms[c]);
  return th;
}

int threshold_count(const O1Stage& stage) {
  int k = 0;
  for (const auto& r : stage.send)
    if (r) k += 2;
  return k;
}

O1Stage idle_stage(int M, bool terminal) {
  O1Stage s;
  s.terminal = terminal;
  s.send.assign(static_cast<std::size_t>(M), std::nullopt);
  if (terminal) s.send[0] = Interval{0.0, 1.0};
  return s;
}

}  // namespace decseq
