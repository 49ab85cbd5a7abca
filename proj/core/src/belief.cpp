#include "decseq/belief.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decseq/error.hpp"

namespace decseq {

double bayes(double pi, LikelihoodPair lik) {
  double num = lik.h0 * pi;
  double den = num + lik.h1 * (1.0 - pi);
  if (!(den > 0.0)) throw ImpossibleObservation("impossible observation under current belief");
  return std::clamp(num / den, 0.0, 1.0);
}

double update_observer1(double pi, std::size_t y, const LikelihoodRows& rows) {
  if (y >= rows.size()) throw ImpossibleObservation("observation symbol outside the alphabet");
  return bayes(pi, {rows.h0[y], rows.h1[y]});
}

double update_observer2(double pi2, std::size_t y2, const LikelihoodRows& rows, LikelihoodPair msg) {
  if (y2 >= rows.size()) throw ImpossibleObservation("observation symbol outside the alphabet");
  LikelihoodPair joint{rows.h0[y2] * msg.h0, rows.h1[y2] * msg.h1};
  if (!(joint.prob(pi2) > 0.0)) throw ImpossibleObservation("impossible observation/message pair");
  return bayes(pi2, joint);
}

void merge_atoms(std::vector<Atom>& atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.belief < b.belief; });
  std::vector<Atom> out;
  for (const Atom& a : atoms) {
    if (!out.empty() && a.belief - out.back().belief <= kAtomTolerance) {
      out.back().w0 += a.w0;
      out.back().w1 += a.w1;
      out.back().histories += a.histories;
    } else {
      out.push_back(a);
    }
  }
  atoms = std::move(out);
}

std::vector<Atom> push_forward(const std::vector<Atom>& atoms, const LikelihoodRows& rows) {
  std::vector<Atom> next;
  for (const Atom& a : atoms) {
    for (std::size_t y = 0; y < rows.size(); ++y) {
      double w0 = a.w0 * rows.h0[y];
      double w1 = a.w1 * rows.h1[y];
      if (rows.prob(y, a.belief) <= 0.0 || (w0 <= 0.0 && w1 <= 0.0)) continue;
      next.push_back({update_observer1(a.belief, y, rows), w0, w1, a.histories});
    }
  }
  merge_atoms(next);
  return next;
}

AtomSet reachable_beliefs(double prior, const ObservationChannel& channel, int horizon) {
  AtomSet set;
  set.layers.push_back({{prior, 1.0, 1.0, 1}});
  for (int t = 1; t <= horizon; ++t) set.layers.push_back(push_forward(set.layers.back(), channel.at(t)));
  return set;
}

void RegionPartition::validate() const {
  if (regions.empty()) throw ValidationError("regions", "regions not a partition: empty");
  if (regions.front().lo != 0.0 || regions.back().hi != 1.0)
    throw ValidationError("regions", "regions not a partition: must span [0,1]");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].lo > regions[i].hi)
      throw ValidationError("regions[" + std::to_string(i) + "]", "regions not a partition: lo > hi");
    if (i > 0 && regions[i].lo != regions[i - 1].hi)
      throw ValidationError("regions[" + std::to_string(i) + "]", "regions not a partition: gap or overlap");
  }
}

Symbol RegionPartition::classify(double pi) const {
  for (const Region& r : regions)
    if (pi >= r.lo && pi < r.hi) return r.symbol;
  return regions.back().symbol;
}

MessageLikelihoods message_likelihood(const std::vector<Atom>& law, const RegionPartition& regions, int M) {
  regions.validate();
  return message_likelihood(law, [&](double pi) { return regions.classify(pi); }, M);
}

MessageLikelihoods message_likelihood(const std::vector<Atom>& law, const Classifier& classify, int M) {
  MessageLikelihoods out;
  out.symbol.assign(static_cast<std::size_t>(M), {0.0, 0.0});
  double total0 = 0.0, total1 = 0.0;
  for (const Atom& a : law) {
    total0 += a.w0;
    total1 += a.w1;
  }
  for (const Atom& a : law) {
    Symbol z = classify(a.belief);
    if (z != kBlank && (z < 0 || z >= M)) throw ValidationError("regions", "symbol outside the message alphabet");
    LikelihoodPair& slot = z == kBlank ? out.blank : out.symbol[static_cast<std::size_t>(z)];
    if (total0 > 0.0) slot.h0 += a.w0 / total0;
    if (total1 > 0.0) slot.h1 += a.w1 / total1;
  }
  return out;
}

}  // namespace decseq
