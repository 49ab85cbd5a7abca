#pragma once

#include <vector>

#include "decseq/model.hpp"

namespace decseq::test {

inline LikelihoodRows symmetric(double eps) { return {{1.0 - eps, eps}, {eps, 1.0 - eps}}; }
inline LikelihoodRows uninformative(std::size_t n = 2) {
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

inline CostModel zero_one(double c1, double c2) {
  CostModel c;
  c.c1 = c1;
  c.c2 = c2;
  c.J = {{{0.0, 1.0}, {1.0, 0.0}}};
  return with_derived_bound(c);
}

inline ProblemSpec binary(double p0, double eps1, double eps2, double c1, double c2, int T1, int T2,
                          Variant v = Variant::P1) {
  ProblemSpec s;
  s.p0 = p0;
  s.channel1 = {1, {symmetric(eps1)}};
  s.channel2 = {2, {symmetric(eps2)}};
  s.costs = zero_one(c1, c2);
  s.T1 = T1;
  s.T2 = T2;
  s.variant = v;
  return s;
}

// p0 = 0.5, symmetric 0.2 channels, 0-1 loss, c1 = c2 = 0.05.
inline ProblemSpec sym02(int T1 = 2, int T2 = 2, Variant v = Variant::P1) {
  return binary(0.5, 0.2, 0.2, 0.05, 0.05, T1, T2, v);
}

// Ternary O1 alphabet, asymmetric costs.
inline ProblemSpec asym_ternary(int T1, int T2, Variant v, int M = 2) {
  ProblemSpec s;
  s.p0 = 0.4;
  s.channel1 = {1, {{{0.6, 0.3, 0.1}, {0.15, 0.35, 0.5}}}};
  s.channel2 = {2, {{{0.7, 0.3}, {0.25, 0.75}}}};
  s.costs.c1 = 0.03;
  s.costs.c2 = 0.04;
  s.costs.J = {{{0.0, 1.5}, {0.8, 0.0}}};
  s.costs = with_derived_bound(s.costs);
  s.T1 = T1;
  s.T2 = T2;
  s.variant = v;
  s.M = M;
  return s;
}

// Time-varying channels.
inline ProblemSpec drift(int T1, int T2, Variant v) {
  ProblemSpec s;
  s.p0 = 0.3;
  s.channel1 = {1, {{{0.7, 0.3}, {0.3, 0.7}}, {{0.85, 0.15}, {0.2, 0.8}}, {{0.9, 0.1}, {0.1, 0.9}}}};
  s.channel2 = {2, {{{0.6, 0.4}, {0.4, 0.6}}, {{0.75, 0.25}, {0.3, 0.7}}, {{0.8, 0.2}, {0.2, 0.8}}}};
  s.costs = zero_one(0.02, 0.03);
  s.T1 = T1;
  s.T2 = T2;
  s.variant = v;
  return s;
}

// Instances small enough for the exhaustive oracle, per variant.
inline std::vector<ProblemSpec> oracle_instances(Variant v) {
  std::vector<ProblemSpec> out;
  for (int T1 = 1; T1 <= 2; ++T1)
    for (int T2 = 1; T2 <= 2; ++T2) {
      if (v == Variant::P2 && T2 < T1) continue;
      out.push_back(sym02(T1, T2, v));
      out.push_back(binary(0.3, 0.1, 0.2, 0.05, 0.05, T1, T2, v));
      out.push_back(asym_ternary(T1, T2, v));
      out.push_back(drift(T1, T2, v));
    }
  return out;
}

}  // namespace decseq::test
