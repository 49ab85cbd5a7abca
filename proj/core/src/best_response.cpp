#include "decseq/best_response.hpp"

#include <algorithm>
#include <map>

#include "decseq/error.hpp"
#include "decseq/simulate.hpp"

namespace decseq {

namespace {

// Belief -> probability under one hypothesis, merged within the atom tolerance.
using BeliefMass = std::vector<std::pair<double, double>>;

void merge(BeliefMass& m) {
  std::sort(m.begin(), m.end());
  BeliefMass out;
  for (const auto& [pi, p] : m) {
    if (!out.empty() && pi - out.back().first <= kAtomTolerance) out.back().second += p;
    else out.emplace_back(pi, p);
  }
  m = std::move(out);
}

double hyp(const LikelihoodPair& l, int h) { return h == 0 ? l.h0 : l.h1; }

double o2_cost_p1(const O2Policy& o2, const ProblemSpec& spec, int final_time, Symbol z, int h) {
  BeliefMass dist{{o2.class_belief(spec.p0, final_time, z), 1.0}};
  double cost = 0.0;
  for (int k = 0; !dist.empty(); ++k) {
    BeliefMass next;
    const LikelihoodRows* r = k < spec.T2 ? &spec.channel2.at(k + 1) : nullptr;
    for (const auto& [pi, p] : dist) {
      Decision d = k >= spec.T2 ? apply_thresholds(o2.wald_stage(spec.T2), pi) : o2.decide_p1(k, pi);
      if (d != Decision::Continue) {
        cost += p * spec.costs.J[static_cast<int>(d)][h];
        continue;
      }
      cost += p * spec.costs.c2;
      for (std::size_t y = 0; y < r->size(); ++y) {
        LikelihoodPair lik{r->h0[y], r->h1[y]};
        double q = p * hyp(lik, h);
        if (q > 0.0) next.emplace_back(tolerant_update(pi, lik), q);
      }
    }
    merge(next);
    dist = std::move(next);
  }
  return cost;
}

double o2_cost_p2(const O2Policy& o2, const ProblemSpec& spec, int final_time, Symbol z, int h) {
  BeliefMass dist{{spec.p0, 1.0}};
  double cost = 0.0;
  for (int t = 1; !dist.empty(); ++t) {
    const LikelihoodRows& r = spec.channel2.at(t);
    LikelihoodPair msg{1.0, 1.0};
    if (t < final_time) msg = o2.message(t, kBlank);
    else if (t == final_time) msg = o2.message(t, z);
    int seen = t >= final_time ? final_time : 0;
    BeliefMass next;
    for (const auto& [pi, p] : dist) {
      cost += p * spec.costs.c2;
      for (std::size_t y = 0; y < r.size(); ++y) {
        LikelihoodPair obs{r.h0[y], r.h1[y]};
        double q = p * hyp(obs, h);
        if (q <= 0.0) continue;
        double post = tolerant_update(pi, {obs.h0 * msg.h0, obs.h1 * msg.h1});
        Decision d = o2.decide_p2(t, post, seen);
        if (d != Decision::Continue) cost += q * spec.costs.J[static_cast<int>(d)][h];
        else next.emplace_back(post, q);
      }
    }
    merge(next);
    dist = std::move(next);
  }
  return cost;
}

std::vector<Affine> send_lines(const O2Policy& o2, const ProblemSpec& spec, int t) {
  std::vector<Affine> lines;
  for (Symbol z = 0; z < spec.M; ++z) lines.push_back(evaluate_o2_policy(o2, t, z, spec));
  return lines;
}

std::vector<Branch> observation_branches(const LikelihoodRows& r, const PiecewiseLinear* next) {
  std::vector<Branch> b;
  for (std::size_t y = 0; y < r.size(); ++y) b.push_back({{r.h0[y], r.h1[y]}, next});
  return b;
}

}  // namespace

Affine evaluate_o2_policy(const O2Policy& o2, std::span<const Symbol> history, Symbol final_z,
                          const ProblemSpec& spec) {
  for (Symbol s : history)
    if (s != kBlank) throw ValidationError("history", "message history must be blanks before the final symbol");
  if (final_z < 0 || final_z >= spec.M) throw ValidationError("final_z", "symbol outside the message alphabet");
  return evaluate_o2_policy(o2, static_cast<int>(history.size()) + 1, final_z, spec);
}

Affine evaluate_o2_policy(const O2Policy& o2, int final_time, Symbol final_z, const ProblemSpec& spec) {
  if (final_time < 1) throw ValidationError("history", "final message time must be at least 1");
  Affine out;
  if (spec.variant == Variant::P1) {
    out.h0 = o2_cost_p1(o2, spec, final_time, final_z, 0);
    out.h1 = o2_cost_p1(o2, spec, final_time, final_z, 1);
  } else {
    out.h0 = o2_cost_p2(o2, spec, final_time, final_z, 0);
    out.h1 = o2_cost_p2(o2, spec, final_time, final_z, 1);
  }
  return out;
}

std::vector<MessageLikelihoods> o1_message_likelihoods(const O1Policy& o1, const ProblemSpec& spec) {
  std::vector<MessageLikelihoods> out;
  std::vector<Atom> law = push_forward({{spec.p0, 1.0, 1.0, 1}}, spec.channel1.at(1));
  for (int t = 1; t <= o1.horizon(); ++t) {
    const O1Stage& st = o1.stage(t);
    out.push_back(message_likelihood(law, [&](double pi) { return st.classify(pi); }, o1.M));
    if (t == o1.horizon()) break;
    std::vector<Atom> blank;
    for (const Atom& a : law)
      if (st.classify(a.belief) == kBlank) blank.push_back(a);
    law = push_forward(blank, spec.channel1.at(t + 1));
  }
  return out;
}

double o1_expected_delay(const O1Policy& o1, const ProblemSpec& spec) {
  auto msgs = o1_message_likelihoods(o1, spec);
  double reach0 = 1.0, reach1 = 1.0, delay = 0.0;
  for (std::size_t t = 0; t < msgs.size(); ++t) {
    delay += spec.costs.c1 * (spec.p0 * reach0 + (1.0 - spec.p0) * reach1);
    reach0 *= msgs[t].blank.h0;
    reach1 *= msgs[t].blank.h1;
  }
  return delay;
}

O1BestResponse o1_best_response(const O2Policy& o2, const ProblemSpec& spec) {
  const int T1 = spec.T1;
  O1BestResponse br;
  br.policy.M = spec.M;
  br.policy.stages.resize(static_cast<std::size_t>(T1));
  br.values.resize(static_cast<std::size_t>(T1));
  br.tables.resize(static_cast<std::size_t>(T1));
  br.send.resize(static_cast<std::size_t>(T1));
  AtomSet atoms = reachable_beliefs(spec.p0, spec.channel1, T1);

  for (int t = T1; t >= 1; --t) {
    auto ti = static_cast<std::size_t>(t - 1);
    br.send[ti] = send_lines(o2, spec, t);
    const auto& lines = br.send[ti];
    std::vector<Branch> branches;
    PiecewiseLinear cont;
    if (t < T1) {
      branches = observation_branches(spec.channel1.at(t + 1), &br.values[ti + 1]);
      cont = continuation(spec.costs.c1, branches);
      br.values[ti] = lower_envelope(cont, lines);
    } else {
      br.values[ti] = lower_envelope(lines);
    }

    ValueTable& tab = br.tables[ti];
    tab.t = t;
    tab.history = "o1";
    std::vector<Symbol> labels;
    for (const Atom& a : atoms.at(t)) {
      double pi = a.belief;
      Symbol best = spec.M - 1;
      double v = lines[static_cast<std::size_t>(best)](pi);
      for (Symbol z = spec.M - 2; z >= 0; --z) {
        double s = lines[static_cast<std::size_t>(z)](pi);
        if (s < v - kTieTolerance) {
          v = s;
          best = z;
        }
      }
      if (t < T1) {
        double c = continuation_at(spec.costs.c1, branches, pi);
        if (c < v - kTieTolerance) {
          v = c;
          best = kBlank;
        }
      }
      tab.atoms.push_back(pi);
      tab.values.push_back(v);
      tab.actions.push_back(best);
      labels.push_back(best);
    }
    br.policy.stages[ti] = extract_thresholds(tab.atoms, labels, spec.M, t == T1, false);
  }
  auto first = observation_branches(spec.channel1.at(1), &br.values[0]);
  br.cost = continuation_at(spec.costs.c1, first, spec.p0);
  return br;
}

O2BestResponse o2_best_response(const O1Policy& o1, const ProblemSpec& spec) {
  if (o1.horizon() != spec.T1) throw ValidationError("o1", "O1 policy horizon differs from T1");
  const int T1 = spec.T1, T2 = spec.T2;
  O2BestResponse br;
  O2Policy& pol = br.policy;
  pol.variant = spec.variant;
  pol.M = spec.M;
  pol.T1 = T1;
  pol.T2 = T2;
  pol.messages = o1_message_likelihoods(o1, spec);

  auto rows = channel_rows(spec.channel2, 1, T2);
  br.wald = solve_wald_finite(rows, spec.costs, T2);
  for (const WaldStage& st : br.wald.stages) pol.wald.push_back(st.thresholds);
  const Affine stops[2] = {spec.costs.stop_line(0), spec.costs.stop_line(1)};
  double delay = o1_expected_delay(o1, spec);

  auto msg = [&](int t, Symbol z) {
    const MessageLikelihoods& m = pol.messages[static_cast<std::size_t>(t - 1)];
    return m.of(z);
  };

  if (spec.variant == Variant::P1) {
    // Each final-message class starts the Wald problem at its own posterior.
    double reach0 = 1.0, reach1 = 1.0, total = delay;
    std::vector<double> class_atoms;
    for (int t = 1; t <= T1; ++t) {
      for (Symbol z = 0; z < spec.M; ++z) {
        LikelihoodPair l = msg(t, z);
        double p0 = spec.p0 * reach0 * l.h0, p1 = (1.0 - spec.p0) * reach1 * l.h1;
        if (p0 + p1 <= 0.0) continue;
        double pi = p0 / (p0 + p1);
        total += (p0 + p1) * br.wald.stage(0).value(pi);
        class_atoms.push_back(pi);
      }
      reach0 *= msg(t, kBlank).h0;
      reach1 *= msg(t, kBlank).h1;
    }
    br.cost = total;
    std::vector<Atom> layer;
    for (double pi : class_atoms) layer.push_back({pi, 1.0, 1.0, 1});
    merge_atoms(layer);
    for (int k = 0; k <= T2; ++k) {
      const WaldStage& st = br.wald.stage(k);
      ValueTable tab;
      tab.t = k;
      tab.history = "post-message";
      for (const Atom& a : layer) {
        tab.atoms.push_back(a.belief);
        tab.values.push_back(st.value(a.belief));
        tab.actions.push_back(static_cast<int>(apply_thresholds(st.thresholds, a.belief)));
      }
      br.tables.push_back(std::move(tab));
      if (k < T2) layer = push_forward(layer, spec.channel2.at(k + 1));
    }
    return br;
  }

  // P2: backward over the all-blank classes t = T1-1..1; after a final message at t+1
  // O2 continues with the Wald stage t+1.
  br.pre_message_values.resize(static_cast<std::size_t>(std::max(T1 - 1, 0)));
  pol.pre_message.resize(br.pre_message_values.size());
  auto branches_at = [&](int t) {  // outcomes observed at time t
    std::vector<Branch> b;
    const LikelihoodRows& r = spec.channel2.at(t);
    for (std::size_t y = 0; y < r.size(); ++y) {
      for (Symbol z = 0; z < spec.M; ++z) {
        LikelihoodPair l = msg(t, z);
        b.push_back({{r.h0[y] * l.h0, r.h1[y] * l.h1}, &br.wald.stage(t).value});
      }
      if (t <= T1 - 1) {
        LikelihoodPair l = msg(t, kBlank);
        b.push_back({{r.h0[y] * l.h0, r.h1[y] * l.h1}, &br.pre_message_values[static_cast<std::size_t>(t - 1)]});
      }
    }
    return b;
  };
  std::vector<PiecewiseLinear> conts(br.pre_message_values.size());
  for (int t = T1 - 1; t >= 1; --t) {
    auto ti = static_cast<std::size_t>(t - 1);
    auto b = branches_at(t + 1);
    conts[ti] = continuation(spec.costs.c2, b);
    br.pre_message_values[ti] = lower_envelope(conts[ti], stops);
    pol.pre_message[ti] = stop_thresholds(stops[0], stops[1], &conts[ti]);
  }
  auto first = branches_at(1);
  br.cost = delay + continuation_at(spec.costs.c2, first, spec.p0);

  // Tables on the O2 atoms reachable under the all-blank history.
  std::vector<Atom> layer{{spec.p0, 1.0, 1.0, 1}};
  for (int t = 1; t <= T1 - 1; ++t) {
    const LikelihoodRows& r = spec.channel2.at(t);
    LikelihoodPair l = msg(t, kBlank);
    LikelihoodRows joint = r;
    for (std::size_t y = 0; y < r.size(); ++y) {
      joint.h0[y] *= l.h0;
      joint.h1[y] *= l.h1;
    }
    layer = push_forward(layer, joint);
    auto ti = static_cast<std::size_t>(t - 1);
    ValueTable tab;
    tab.t = t;
    tab.history = "blank";
    for (const Atom& a : layer) {
      tab.atoms.push_back(a.belief);
      tab.values.push_back(br.pre_message_values[ti](a.belief));
      tab.actions.push_back(static_cast<int>(apply_thresholds(pol.pre_message[ti], a.belief)));
    }
    br.tables.push_back(std::move(tab));
    std::vector<Atom> cont_atoms;
    for (const Atom& a : layer)
      if (apply_thresholds(pol.pre_message[ti], a.belief) == Decision::Continue) cont_atoms.push_back(a);
    layer = std::move(cont_atoms);
  }
  return br;
}

O1Policy default_o1_init(const ProblemSpec& spec) {
  O1Policy o1;
  o1.M = spec.M;
  for (int t = 1; t <= spec.T1; ++t) {
    O1Stage st = idle_stage(spec.M, t == spec.T1);
    if (t == 1) {
      st.send.assign(static_cast<std::size_t>(spec.M), std::nullopt);
      st.send[1] = Interval{0.0, spec.p0};
      st.send[0] = Interval{spec.p0, 1.0};
    }
    o1.stages.push_back(st);
  }
  return o1;
}

O2Policy default_o2_init(const ProblemSpec& spec) { return o2_best_response(default_o1_init(spec), spec).policy; }

PbpoResult pbpo_iteration(const ProblemSpec& spec, const O2Policy& init, int max_rounds) {
  if (max_rounds < 1) throw ValidationError("max_rounds", "must be at least 1");
  PbpoResult res;
  res.o2 = init;
  res.o1 = o1_best_response(res.o2, spec).policy;
  res.cost_trace.push_back(exact_cost(res.o1, res.o2, spec));
  for (int round = 1; round <= max_rounds; ++round) {
    if (round > 1) res.o1 = o1_best_response(res.o2, spec).policy;
    res.o2 = o2_best_response(res.o1, spec).policy;
    double cost = exact_cost(res.o1, res.o2, spec);
    double prev = res.cost_trace.back();
    res.cost_trace.push_back(cost);
    res.rounds = round;
    if (prev - cost < 1e-12) break;
  }
  return res;
}

}  // namespace decseq
