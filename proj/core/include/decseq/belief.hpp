#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "decseq/model.hpp"

namespace decseq {

// Message symbols are 0..M-1; the blank (no transmission) is kBlank.
using Symbol = int;
inline constexpr Symbol kBlank = -1;

// Beliefs closer than this are the same atom.
inline constexpr double kAtomTolerance = 1e-12;

double update_observer1(double pi, std::size_t y, const LikelihoodRows& rows);
double update_observer2(double pi2, std::size_t y2, const LikelihoodRows& rows, LikelihoodPair msg);
// Posterior after an event with likelihoods `lik`; throws ImpossibleObservation on zero mass.
double bayes(double pi, LikelihoodPair lik);

struct Atom {
  double belief = 0.0;
  double w0 = 0.0;  // P(atom | H=0)
  double w1 = 0.0;  // P(atom | H=1)
  std::size_t histories = 0;
};

// atoms[t] holds the sorted distinct beliefs reachable after t observations
// (atoms[0] is the prior).
struct AtomSet {
  std::vector<std::vector<Atom>> layers;

  const std::vector<Atom>& at(int t) const { return layers.at(static_cast<std::size_t>(t)); }
  int horizon() const { return static_cast<int>(layers.size()) - 1; }
};

AtomSet reachable_beliefs(double prior, const ObservationChannel& channel, int horizon);

// Sorts by belief and merges atoms within kAtomTolerance, summing weights.
void merge_atoms(std::vector<Atom>& atoms);

// One Bayes step of an atom layer through `rows`, with weights multiplied by P(y|H).
std::vector<Atom> push_forward(const std::vector<Atom>& atoms, const LikelihoodRows& rows);

// Per-symbol likelihoods P(z | H, history) for z in 0..M-1 and the blank.
struct MessageLikelihoods {
  std::vector<LikelihoodPair> symbol;
  LikelihoodPair blank{0.0, 0.0};

  const LikelihoodPair& of(Symbol z) const { return z == kBlank ? blank : symbol.at(static_cast<std::size_t>(z)); }
};

// Half-open regions [lo, hi) in order; the last region is closed at 1.
struct RegionPartition {
  struct Region {
    double lo;
    double hi;
    Symbol symbol;
  };
  std::vector<Region> regions;

  void validate() const;
  Symbol classify(double pi) const;
};

using Classifier = std::function<Symbol(double)>;

// `law` holds P(pi1 = atom, blank history | H) (any common scale per hypothesis);
// results are conditioned on the blank history.
MessageLikelihoods message_likelihood(const std::vector<Atom>& law, const RegionPartition& regions, int M);
MessageLikelihoods message_likelihood(const std::vector<Atom>& law, const Classifier& classify, int M);

}  // namespace decseq
