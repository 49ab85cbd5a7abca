#include "decseq/info_state.hpp"

#include <algorithm>
#include <tuple>

#include "decseq/error.hpp"
#include "decseq/wald.hpp"

namespace decseq {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= kAtomTolerance; }

Classifier classifier_of(const O1Stage& st) {
  return [&st](double pi) { return st.classify(pi); };
}

template <class State>
std::vector<double> distinct_pi1(const State& s) {
  std::vector<double> xs;
  for (const auto& a : s.atoms) xs.push_back(a.pi1);
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > kAtomTolerance) out.push_back(x);
  return out;
}

template <class State>
MessageLikelihoods message_lik(const State& s, const Classifier& o1, int M) {
  MessageLikelihoods out;
  out.symbol.assign(static_cast<std::size_t>(M), {0.0, 0.0});
  double total[2] = {0.0, 0.0};
  for (const auto& a : s.atoms) total[a.h] += a.mass;
  for (const auto& a : s.atoms) {
    Symbol z = o1(a.pi1);
    LikelihoodPair& slot = z == kBlank ? out.blank : out.symbol.at(static_cast<std::size_t>(z));
    if (total[a.h] <= 0.0) continue;
    (a.h == 0 ? slot.h0 : slot.h1) += a.mass / total[a.h];
  }
  return out;
}

template <class State>
double message_prob(const State& s, const Classifier& o1, Symbol z) {
  double p = 0.0;
  for (const auto& a : s.atoms)
    if (o1(a.pi1) == z) p += a.mass;
  return p;
}

}  // namespace

double InfoStateP1::mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double InfoStateP2::mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double InfoStateP2::active_mass() const {
  double m = 0.0;
  for (const auto& a : atoms)
    if (a.d == 1) m += a.mass;
  return m;
}

void canonicalize(InfoStateP1& s) {
  auto& v = s.atoms;
  std::sort(v.begin(), v.end(), [](const P1Atom& a, const P1Atom& b) { return std::tie(a.h, a.pi1) < std::tie(b.h, b.pi1); });
  std::vector<P1Atom> out;
  for (const auto& a : v) {
    if (a.mass <= 0.0) continue;
    if (!out.empty() && out.back().h == a.h && near(out.back().pi1, a.pi1)) out.back().mass += a.mass;
    else out.push_back(a);
  }
  v = std::move(out);
}

void canonicalize(InfoStateP2& s) {
  auto& v = s.atoms;
  std::sort(v.begin(), v.end(), [](const P2Atom& a, const P2Atom& b) {
    return std::tie(a.h, a.d, a.pi1, a.pi2) < std::tie(b.h, b.d, b.pi1, b.pi2);
  });
  std::vector<P2Atom> out;
  for (const auto& a : v) {
    if (a.mass <= 0.0) continue;
    if (!out.empty()) {
      P2Atom& b = out.back();
      if (b.h == a.h && b.d == a.d && near(b.pi1, a.pi1) && near(b.pi2, a.pi2)) {
        b.mass += a.mass;
        continue;
      }
    }
    out.push_back(a);
  }
  v = std::move(out);
}

std::vector<double> o1_atoms(const InfoStateP1& s) { return distinct_pi1(s); }
std::vector<double> o1_atoms(const InfoStateP2& s) { return distinct_pi1(s); }

InfoStateP1 initial_info_state_p1(const ProblemSpec& spec) {
  InfoStateP1 s;
  s.t = 0;
  s.atoms = {{0, spec.p0, spec.p0}, {1, spec.p0, 1.0 - spec.p0}};
  canonicalize(s);
  return q2_p1(s, spec.channel1.at(1));
}

InfoStateP2 initial_info_state_p2(const ProblemSpec& spec) {
  InfoStateP2 s;
  s.t = 1;
  const LikelihoodRows& r = spec.channel1.at(1);
  for (int h = 0; h < 2; ++h) {
    double ph = h == 0 ? spec.p0 : 1.0 - spec.p0;
    for (std::size_t y = 0; y < r.size(); ++y) {
      double q = ph * (h == 0 ? r.h0[y] : r.h1[y]);
      if (q <= 0.0) continue;
      s.atoms.push_back({h, update_observer1(spec.p0, y, r), spec.p0, 1, q});
    }
  }
  canonicalize(s);
  return s;
}

MessageLikelihoods info_message_likelihood(const InfoStateP1& s, const Classifier& o1, int M) {
  return message_lik(s, o1, M);
}
MessageLikelihoods info_message_likelihood(const InfoStateP2& s, const Classifier& o1, int M) {
  return message_lik(s, o1, M);
}
double message_probability(const InfoStateP1& s, const Classifier& o1, Symbol z) { return message_prob(s, o1, z); }
double message_probability(const InfoStateP2& s, const Classifier& o1, Symbol z) { return message_prob(s, o1, z); }

InfoStateP1 q1_p1(const InfoStateP1& xi, const Classifier& o1, Symbol z) {
  InfoStateP1 out;
  out.t = xi.t;
  double m = 0.0;
  for (const auto& a : xi.atoms)
    if (o1(a.pi1) == z) {
      out.atoms.push_back(a);
      m += a.mass;
    }
  if (!(m > 0.0)) throw UnreachableMessage("unreachable message");
  for (auto& a : out.atoms) a.mass /= m;
  return out;
}

InfoStateP1 q1_p1(const InfoStateP1& xi, const O1Stage& o1, Symbol z) { return q1_p1(xi, classifier_of(o1), z); }

InfoStateP1 q2_p1(const InfoStateP1& eta_b, const LikelihoodRows& next) {
  InfoStateP1 out;
  out.t = eta_b.t + 1;
  for (const auto& a : eta_b.atoms)
    for (std::size_t y = 0; y < next.size(); ++y) {
      double q = a.mass * (a.h == 0 ? next.h0[y] : next.h1[y]);
      if (q <= 0.0) continue;
      out.atoms.push_back({a.h, update_observer1(a.pi1, y, next), q});
    }
  canonicalize(out);
  return out;
}

InfoStateP2 q1_p2(const InfoStateP2& psi, const Classifier& o1, Symbol z, const LikelihoodRows& channel2_t, int M) {
  MessageLikelihoods ml = message_lik(psi, o1, M);
  LikelihoodPair lik = ml.of(z);
  InfoStateP2 out;
  out.t = psi.t;
  double m = 0.0;
  for (const auto& a : psi.atoms) {
    if (o1(a.pi1) != z) continue;
    m += a.mass;
    if (a.d == 0) {
      out.atoms.push_back(a);
      continue;
    }
    for (std::size_t y = 0; y < channel2_t.size(); ++y) {
      double q = a.mass * (a.h == 0 ? channel2_t.h0[y] : channel2_t.h1[y]);
      if (q <= 0.0) continue;
      LikelihoodPair joint{channel2_t.h0[y] * lik.h0, channel2_t.h1[y] * lik.h1};
      out.atoms.push_back({a.h, a.pi1, tolerant_update(a.pi2, joint), 1, q});
    }
  }
  if (!(m > 0.0)) throw UnreachableMessage("unreachable message");
  for (auto& a : out.atoms) a.mass /= m;
  canonicalize(out);
  return out;
}

InfoStateP2 q1_p2(const InfoStateP2& psi, const O1Stage& o1, Symbol z, const LikelihoodRows& channel2_t, int M) {
  return q1_p2(psi, classifier_of(o1), z, channel2_t, M);
}

InfoStateP2 q2_p2(const InfoStateP2& phi_b, StopThresholds o2, const LikelihoodRows& next) {
  InfoStateP2 out;
  out.t = phi_b.t + 1;
  for (const auto& a : phi_b.atoms) {
    int d = a.d == 1 && apply_thresholds(o2, a.pi2) == Decision::Continue ? 1 : 0;
    for (std::size_t y = 0; y < next.size(); ++y) {
      double q = a.mass * (a.h == 0 ? next.h0[y] : next.h1[y]);
      if (q <= 0.0) continue;
      out.atoms.push_back({a.h, update_observer1(a.pi1, y, next), a.pi2, d, q});
    }
  }
  canonicalize(out);
  return out;
}

}  // namespace decseq
