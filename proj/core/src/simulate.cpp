#include "decseq/simulate.hpp"

#include <cmath>
#include <functional>

#include "decseq/error.hpp"
#include "decseq/parallel.hpp"

namespace decseq {

namespace {

double row_prob(const LikelihoodRows& r, int y, int h) {
  return h == 0 ? r.h0[static_cast<std::size_t>(y)] : r.h1[static_cast<std::size_t>(y)];
}

double prior_of(const ProblemSpec& spec, int h) { return h == 0 ? spec.p0 : 1.0 - spec.p0; }

MessageEvent visible(MessageEvent e, int t) { return e.time > 0 && e.time <= t ? e : MessageEvent{}; }

struct EventMass {
  MessageEvent event;
  double prob;
};

// P(tau1 = t, Z = z | h) for every final event.
std::vector<EventMass> o1_events(const O1Behavior& o1, const ProblemSpec& spec, int h) {
  std::vector<EventMass> out;
  std::vector<int> hist;
  const int T1 = o1.horizon();
  std::function<void(int, double)> walk = [&](int t, double p) {
    const LikelihoodRows& r = spec.channel1.at(t);
    for (std::size_t y = 0; y < r.size(); ++y) {
      double q = p * row_prob(r, static_cast<int>(y), h);
      if (q <= 0.0) continue;
      hist.push_back(static_cast<int>(y));
      Symbol z = o1.decide(t, hist);
      if (z != kBlank) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const EventMass& e) { return e.event.time == t && e.event.symbol == z; });
        if (it == out.end()) out.push_back({{t, z}, q});
        else it->prob += q;
      } else if (t == T1) {
        throw ValidationError("o1", "O1 sent a blank at its terminal time");
      } else {
        walk(t + 1, q);
      }
      hist.pop_back();
    }
  };
  walk(1, 1.0);
  return out;
}

struct O2Accumulator {
  double cost = 0.0;
  std::vector<double> tau2;
};

// O2's expected cost given h and the (eventual) final message, accumulated with weight w.
void o2_paths(const O2Behavior& o2, const ProblemSpec& spec, int h, MessageEvent event, double w, O2Accumulator& acc) {
  const int T2 = o2.horizon();
  std::vector<int> hist;
  const auto& J = spec.costs.J;
  auto stop = [&](int step, Decision d, double p) {
    int u = static_cast<int>(d);
    acc.cost += p * (spec.costs.c2 * step + J[u][h]);
    if (acc.tau2.size() <= static_cast<std::size_t>(step)) acc.tau2.resize(static_cast<std::size_t>(step) + 1, 0.0);
    acc.tau2[static_cast<std::size_t>(step)] += p;
  };
  if (spec.variant == Variant::P1) {
    std::function<void(int, double)> walk = [&](int k, double p) {
      Decision d = o2.decide(k, hist, event);
      if (d != Decision::Continue) return stop(k, d, p);
      if (k >= T2) throw ValidationError("o2", "O2 continued past its horizon");
      const LikelihoodRows& r = spec.channel2.at(k + 1);
      for (std::size_t y = 0; y < r.size(); ++y) {
        double q = p * row_prob(r, static_cast<int>(y), h);
        if (q <= 0.0) continue;
        hist.push_back(static_cast<int>(y));
        walk(k + 1, q);
        hist.pop_back();
      }
    };
    walk(0, w);
  } else {
    std::function<void(int, double)> walk = [&](int t, double p) {
      const LikelihoodRows& r = spec.channel2.at(t);
      for (std::size_t y = 0; y < r.size(); ++y) {
        double q = p * row_prob(r, static_cast<int>(y), h);
        if (q <= 0.0) continue;
        hist.push_back(static_cast<int>(y));
        Decision d = o2.decide(t, hist, visible(event, t));
        if (d != Decision::Continue) stop(t, d, q);
        else if (t >= T2) throw ValidationError("o2", "O2 continued past its horizon");
        else walk(t + 1, q);
        hist.pop_back();
      }
    };
    walk(1, w);
  }
}

}  // namespace

Symbol ThresholdO1::decide(int t, std::span<const int> y1) const {
  double pi = spec_.p0;
  for (int s = 1; s <= t; ++s) pi = update_observer1(pi, static_cast<std::size_t>(y1[s - 1]), spec_.channel1.at(s));
  return policy_.decide(t, pi);
}

double ThresholdO2::belief(int step, std::span<const int> y2, MessageEvent msg) const {
  if (spec_.variant == Variant::P1) {
    double pi = policy_.class_belief(spec_.p0, msg.time, msg.symbol);
    for (int k = 1; k <= step; ++k) {
      const LikelihoodRows& r = spec_.channel2.at(k);
      std::size_t y = static_cast<std::size_t>(y2[k - 1]);
      pi = tolerant_update(pi, {r.h0[y], r.h1[y]});
    }
    return pi;
  }
  double pi = spec_.p0;
  for (int s = 1; s <= step; ++s) {
    const LikelihoodRows& r = spec_.channel2.at(s);
    std::size_t y = static_cast<std::size_t>(y2[s - 1]);
    LikelihoodPair m{1.0, 1.0};
    if (msg.time == 0 || s < msg.time) m = policy_.message(s, kBlank);
    else if (s == msg.time) m = policy_.message(s, msg.symbol);
    pi = tolerant_update(pi, {r.h0[y] * m.h0, r.h1[y] * m.h1});
  }
  return pi;
}

Decision ThresholdO2::decide(int step, std::span<const int> y2, MessageEvent msg) const {
  double pi = belief(step, y2, msg);
  if (spec_.variant == Variant::P1) return policy_.decide_p1(step, pi);
  return policy_.decide_p2(step, pi, msg.time);
}

ExactEvaluation exact_evaluate(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec) {
  ExactEvaluation ev;
  ev.tau1.assign(static_cast<std::size_t>(o1.horizon()) + 1, 0.0);
  for (int h = 0; h < 2; ++h) {
    double ph = prior_of(spec, h);
    O2Accumulator acc;
    double delay = 0.0;
    for (const EventMass& e : o1_events(o1, spec, h)) {
      delay += e.prob * spec.costs.c1 * e.event.time;
      ev.tau1[static_cast<std::size_t>(e.event.time)] += ph * e.prob;
      ev.path_mass += ph * e.prob;
      o2_paths(o2, spec, h, e.event, e.prob, acc);
    }
    ev.cost_given_h[static_cast<std::size_t>(h)] = delay + acc.cost;
    ev.expected_delay1 += ph * delay;
    ev.cost += ph * (delay + acc.cost);
    if (ev.tau2.size() < acc.tau2.size()) ev.tau2.resize(acc.tau2.size(), 0.0);
    for (std::size_t k = 0; k < acc.tau2.size(); ++k) ev.tau2[k] += ph * acc.tau2[k];
  }
  return ev;
}

double exact_cost(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec) {
  return exact_evaluate(o1, o2, spec).cost;
}

double exact_cost(const O1Policy& o1, const O2Policy& o2, const ProblemSpec& spec) {
  return exact_cost(ThresholdO1(o1, spec), ThresholdO2(o2, spec), spec);
}

std::array<double, 2> o2_cost_given_message(const O2Behavior& o2, const ProblemSpec& spec, MessageEvent msg) {
  std::array<double, 2> out{};
  for (int h = 0; h < 2; ++h) {
    O2Accumulator acc;
    o2_paths(o2, spec, h, msg, 1.0, acc);
    out[static_cast<std::size_t>(h)] = acc.cost;
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

EpisodeRng::EpisodeRng(std::uint64_t seed, std::uint64_t episode) {
  std::uint64_t s = seed;
  state_ = splitmix64(s) ^ (episode * 0xd1342543de82ef95ULL);
  splitmix64(state_);
}

double EpisodeRng::uniform() { return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53; }

std::size_t EpisodeRng::sample(std::span<const double> probs) {
  double u = uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last;
}

EpisodeOutcome simulate_once(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec, EpisodeRng& rng) {
  EpisodeOutcome out;
  out.h = rng.uniform() < spec.p0 ? 0 : 1;
  auto draw = [&](const LikelihoodRows& r) {
    return static_cast<int>(rng.sample(out.h == 0 ? std::span<const double>(r.h0) : std::span<const double>(r.h1)));
  };
  std::vector<int> y1, y2;
  MessageEvent event;
  auto o1_step = [&](int t) {
    y1.push_back(draw(spec.channel1.at(t)));
    Symbol z = o1.decide(t, y1);
    if (z == kBlank && t == o1.horizon()) throw ValidationError("o1", "O1 sent a blank at its terminal time");
    if (z != kBlank) event = {t, z};
  };

  if (spec.variant == Variant::P1) {
    for (int t = 1; event.time == 0; ++t) o1_step(t);
    for (int k = 0;; ++k) {
      Decision d = o2.decide(k, y2, event);
      if (d != Decision::Continue) {
        out.tau2 = k;
        out.u = static_cast<int>(d);
        break;
      }
      if (k >= o2.horizon()) throw ValidationError("o2", "O2 continued past its horizon");
      y2.push_back(draw(spec.channel2.at(k + 1)));
    }
  } else {
    bool stopped = false;
    for (int t = 1; event.time == 0 || !stopped; ++t) {
      if (event.time == 0) o1_step(t);
      if (stopped) continue;
      y2.push_back(draw(spec.channel2.at(t)));
      Decision d = o2.decide(t, y2, visible(event, t));
      if (d != Decision::Continue) {
        stopped = true;
        out.tau2 = t;
        out.u = static_cast<int>(d);
      } else if (t >= o2.horizon()) {
        throw ValidationError("o2", "O2 continued past its horizon");
      }
    }
  }
  out.tau1 = event.time;
  out.cost = spec.costs.c1 * out.tau1 + spec.costs.c2 * out.tau2 + spec.costs.J[out.u][out.h];
  return out;
}

CostEstimate estimate_cost(const O1Behavior& o1, const O2Behavior& o2, const ProblemSpec& spec, std::uint64_t n,
                           std::uint64_t seed) {
  if (n < 1) throw ValidationError("n", "need at least one sample");
  std::vector<double> costs(n);
  parallel_chunks(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      EpisodeRng rng(seed, i);
      costs[i] = simulate_once(o1, o2, spec, rng).cost;
    }
  });
  CostEstimate est;
  est.n = n;
  est.seed = seed;
  double sum = 0.0;
  for (double c : costs) sum += c;
  est.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double c : costs) ss += (c - est.mean) * (c - est.mean);
    est.standard_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    est.stderr_defined = true;
  }
  return est;
}

CostEstimate estimate_cost(const O1Policy& o1, const O2Policy& o2, const ProblemSpec& spec, std::uint64_t n,
                           std::uint64_t seed) {
  return estimate_cost(ThresholdO1(o1, spec), ThresholdO2(o2, spec), spec, n, seed);
}

}  // namespace decseq
