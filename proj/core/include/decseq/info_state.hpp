#pragma once

#include <vector>

#include "decseq/belief.hpp"
#include "decseq/model.hpp"
#include "decseq/piecewise_linear.hpp"
#include "decseq/policy.hpp"

namespace decseq {

// Joint measure over (H, O1 belief) given the all-blank history.
struct P1Atom {
  int h = 0;
  double pi1 = 0.0;
  double mass = 0.0;
};

struct InfoStateP1 {
  int t = 1;
  std::vector<P1Atom> atoms;

  double mass() const;
};

// Joint measure over (H, O1 belief, O2 belief, D) where D = 1 while O2 is still active.
struct P2Atom {
  int h = 0;
  double pi1 = 0.0;
  double pi2 = 0.0;
  int d = 1;
  double mass = 0.0;
};

struct InfoStateP2 {
  int t = 1;
  std::vector<P2Atom> atoms;

  double mass() const;
  double active_mass() const;
};

// Sort and merge atoms that agree within the atom tolerance; drops zero mass.
void canonicalize(InfoStateP1& s);
void canonicalize(InfoStateP2& s);

// Distinct O1 beliefs in the support, sorted.
std::vector<double> o1_atoms(const InfoStateP1& s);
std::vector<double> o1_atoms(const InfoStateP2& s);

// xi_1: one O1 observation taken from the prior.
InfoStateP1 initial_info_state_p1(const ProblemSpec& spec);
// psi_1: O1 has its first observation, O2 still holds the prior.
InfoStateP2 initial_info_state_p2(const ProblemSpec& spec);

// P(Z_t = z | H) induced by the O1 rule on the state (conditioned on the blank history).
MessageLikelihoods info_message_likelihood(const InfoStateP1& s, const Classifier& o1, int M);
MessageLikelihoods info_message_likelihood(const InfoStateP2& s, const Classifier& o1, int M);

// Probability of z under the state.
double message_probability(const InfoStateP1& s, const Classifier& o1, Symbol z);
double message_probability(const InfoStateP2& s, const Classifier& o1, Symbol z);

InfoStateP1 q1_p1(const InfoStateP1& xi, const Classifier& o1, Symbol z);
InfoStateP1 q1_p1(const InfoStateP1& xi, const O1Stage& o1, Symbol z);
InfoStateP1 q2_p1(const InfoStateP1& eta_b, const LikelihoodRows& channel1_next);

InfoStateP2 q1_p2(const InfoStateP2& psi, const Classifier& o1, Symbol z, const LikelihoodRows& channel2_t, int M);
InfoStateP2 q1_p2(const InfoStateP2& psi, const O1Stage& o1, Symbol z, const LikelihoodRows& channel2_t, int M);
InfoStateP2 q2_p2(const InfoStateP2& phi_b, StopThresholds o2, const LikelihoodRows& channel1_next);

}  // namespace decseq
