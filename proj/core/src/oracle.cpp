#include "decseq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "decseq/error.hpp"
#include "decseq/policy.hpp"

namespace decseq {

namespace {

constexpr double kTie = 1e-12;
constexpr std::size_t kMaxCandidates = 4096;

double hp(const LikelihoodRows& r, std::size_t y, int h) { return h == 0 ? r.h0[y] : r.h1[y]; }
bool possible(const LikelihoodRows& r, std::size_t y) { return r.h0[y] > 0.0 || r.h1[y] > 0.0; }

// Generic enumeration of reduced decision tables: every pending node gets each of its
// labels; labels that continue add the node's children to the pending list.
template <class Node, class Label>
class TableEnumerator {
 public:
  using LabelsFn = std::function<std::vector<Label>(const Node&)>;
  using ChildrenFn = std::function<std::vector<Node>(const Node&, const Label&)>;
  using Visit = std::function<void(const std::map<Node, Label>&)>;

  TableEnumerator(LabelsFn labels, ChildrenFn children) : labels_(std::move(labels)), children_(std::move(children)) {}

  void run(std::vector<Node> roots, const Visit& visit) {
    std::reverse(roots.begin(), roots.end());
    std::map<Node, Label> table;
    walk(roots, table, visit);
  }

  // Number of tables, saturating at the double range.
  double count(const std::vector<Node>& roots) {
    double n = 1.0;
    for (const Node& r : roots) n *= count_node(r);
    return n;
  }

 private:
  void walk(const std::vector<Node>& pending, std::map<Node, Label>& table, const Visit& visit) {
    if (pending.empty()) {
      visit(table);
      return;
    }
    Node node = pending.back();
    for (const Label& l : labels_(node)) {
      std::vector<Node> next(pending.begin(), pending.end() - 1);
      auto kids = children_(node, l);
      next.insert(next.end(), kids.rbegin(), kids.rend());
      table[node] = l;
      walk(next, table, visit);
    }
    table.erase(node);
  }

  double count_node(const Node& node) {
    double n = 0.0;
    for (const Label& l : labels_(node)) {
      double prod = 1.0;
      for (const Node& c : children_(node, l)) prod *= count_node(c);
      n += prod;
    }
    return n;
  }

  LabelsFn labels_;
  ChildrenFn children_;
};

using O1Enumerator = TableEnumerator<History, Symbol>;

O1Enumerator o1_enumerator(const ProblemSpec& spec) {
  auto labels = [&spec](const History& h) {
    std::vector<Symbol> ls;
    if (static_cast<int>(h.size()) < spec.T1) ls.push_back(kBlank);
    for (Symbol z = spec.M - 1; z >= 0; --z) ls.push_back(z);
    return ls;
  };
  auto children = [&spec](const History& h, const Symbol& z) {
    std::vector<History> kids;
    if (z != kBlank) return kids;
    const LikelihoodRows& r = spec.channel1.at(static_cast<int>(h.size()) + 1);
    for (std::size_t y = 0; y < r.size(); ++y)
      if (possible(r, y)) {
        History c = h;
        c.push_back(static_cast<int>(y));
        kids.push_back(std::move(c));
      }
    return kids;
  };
  return O1Enumerator(labels, children);
}

std::vector<History> o1_roots(const ProblemSpec& spec) {
  std::vector<History> roots;
  const LikelihoodRows& r = spec.channel1.at(1);
  for (std::size_t y = 0; y < r.size(); ++y)
    if (possible(r, y)) roots.push_back({static_cast<int>(y)});
  return roots;
}

// Per-hypothesis law of O1's final message under a table, and the blank-survival curve.
struct O1Law {
  std::array<std::map<std::pair<int, Symbol>, double>, 2> event;
  std::array<std::vector<double>, 2> survive;  // survive[h][t] = P(tau1 > t | h)
  double delay = 0.0;                          // E[c1 tau1]
};

O1Law o1_law(const std::map<History, Symbol>& table, const ProblemSpec& spec) {
  O1Law law;
  for (int h = 0; h < 2; ++h) {
    law.survive[static_cast<std::size_t>(h)].assign(static_cast<std::size_t>(spec.T1) + 1, 0.0);
    law.survive[static_cast<std::size_t>(h)][0] = 1.0;
    double ph = h == 0 ? spec.p0 : 1.0 - spec.p0;
    std::function<void(History&, double)> walk = [&](History& hist, double p) {
      int t = static_cast<int>(hist.size());
      Symbol z = table.at(hist);
      if (z != kBlank) {
        law.event[static_cast<std::size_t>(h)][{t, z}] += p;
        law.delay += ph * p * spec.costs.c1 * t;
        return;
      }
      law.survive[static_cast<std::size_t>(h)][static_cast<std::size_t>(t)] += p;
      const LikelihoodRows& r = spec.channel1.at(t + 1);
      for (std::size_t y = 0; y < r.size(); ++y) {
        if (!possible(r, y)) continue;
        hist.push_back(static_cast<int>(y));
        walk(hist, p * hp(r, y, h));
        hist.pop_back();
      }
    };
    const LikelihoodRows& r = spec.channel1.at(1);
    for (std::size_t y = 0; y < r.size(); ++y) {
      if (!possible(r, y)) continue;
      History hist{static_cast<int>(y)};
      walk(hist, hp(r, y, h));
    }
  }
  return law;
}

double event_prob(const O1Law& law, int h, MessageEvent m, int t) {
  const auto& hs = static_cast<std::size_t>(h);
  if (m.time == 0) return law.survive[hs][static_cast<std::size_t>(t)];
  auto it = law.event[hs].find({m.time, m.symbol});
  return it == law.event[hs].end() ? 0.0 : it->second;
}

// Belief-labelled decisions gathered on positive-probability nodes, per class.
struct StructureLog {
  std::map<std::vector<int>, std::vector<std::pair<double, Decision>>> o2;
};

// Exhaustive minimisation of O2's decision tree against a fixed O1 law.
class O2TreeMin {
 public:
  O2TreeMin(const ProblemSpec& spec, const O1Law& law) : spec_(spec), law_(law) {}

  double solve(std::map<O2Table::Key, Decision>* record, StructureLog* log) {
    record_ = record;
    log_ = log;
    double total = 0.0;
    if (spec_.variant == Variant::P1) {
      for (int t = 1; t <= spec_.T1; ++t)
        for (Symbol z = 0; z < spec_.M; ++z) {
          double w0 = spec_.p0 * event_prob(law_, 0, {t, z}, t);
          double w1 = (1.0 - spec_.p0) * event_prob(law_, 1, {t, z}, t);
          History hist;
          total += node_p1({t, z}, hist, w0, w1, record != nullptr);
        }
    } else {
      const LikelihoodRows& r = spec_.channel2.at(1);
      for (std::size_t y = 0; y < r.size(); ++y) {
        if (!possible(r, y)) continue;
        History hist{static_cast<int>(y)};
        for (MessageEvent m : successors(MessageEvent{}, 1))
          total += node_p2(m, hist, spec_.p0 * r.h0[y], (1.0 - spec_.p0) * r.h1[y], record != nullptr);
      }
    }
    return total;
  }

 private:
  // Stop values first so ties go to stopping, and to declaring 0 on a double tie.
  Decision pick(double w0, double w1, double cont, bool can_continue, double& best) const {
    const auto& J = spec_.costs.J;
    best = w0 * J[0][0] + w1 * J[0][1];
    Decision d = Decision::Declare0;
    double v1 = w0 * J[1][0] + w1 * J[1][1];
    if (v1 < best - kTie) {
      best = v1;
      d = Decision::Declare1;
    }
    if (can_continue && cont < best - kTie) {
      best = cont;
      d = Decision::Continue;
    }
    return d;
  }

  void note(std::vector<int> cls, double w0, double w1, Decision d) {
    if (log_ && w0 + w1 > 0.0) log_->o2[cls].emplace_back(w0 / (w0 + w1), d);
  }

  double node_p1(MessageEvent e, History& hist, double w0, double w1, bool rec) {
    if (w0 + w1 <= 0.0 && !rec) return 0.0;
    int k = static_cast<int>(hist.size());
    double cont = std::numeric_limits<double>::infinity();
    const bool can = k < spec_.T2;
    if (can && w0 + w1 > 0.0) {
      const LikelihoodRows& r = spec_.channel2.at(k + 1);
      cont = (w0 + w1) * spec_.costs.c2;
      for (std::size_t y = 0; y < r.size(); ++y) {
        if (!possible(r, y)) continue;
        hist.push_back(static_cast<int>(y));
        cont += node_p1(e, hist, w0 * r.h0[y], w1 * r.h1[y], false);
        hist.pop_back();
      }
    }
    double best;
    Decision d = pick(w0, w1, cont, can, best);
    if (rec) {
      (*record_)[{e.time, e.symbol, hist}] = d;
      note({e.time, e.symbol, k}, w0, w1, d);
      if (d == Decision::Continue) {
        const LikelihoodRows& r = spec_.channel2.at(k + 1);
        for (std::size_t y = 0; y < r.size(); ++y) {
          if (!possible(r, y)) continue;
          hist.push_back(static_cast<int>(y));
          node_p1(e, hist, w0 * r.h0[y], w1 * r.h1[y], true);
          hist.pop_back();
        }
      }
    }
    return best;
  }

  std::vector<MessageEvent> successors(MessageEvent m, int t) const {
    if (m.time > 0) return {m};
    std::vector<MessageEvent> out;
    if (t < spec_.T1) out.push_back({});
    if (t <= spec_.T1)
      for (Symbol z = 0; z < spec_.M; ++z) out.push_back({t, z});
    return out;
  }

  // y0/y1: prior times own-observation likelihood; message weight applied here.
  double node_p2(MessageEvent m, History& hist, double y0, double y1, bool rec) {
    int t = static_cast<int>(hist.size());
    double w0 = y0 * event_prob(law_, 0, m, t), w1 = y1 * event_prob(law_, 1, m, t);
    if (w0 + w1 <= 0.0 && !rec) return 0.0;
    const bool can = t < spec_.T2;
    double cont = std::numeric_limits<double>::infinity();
    auto children = [&](bool r_flag) {
      double acc = 0.0;
      const LikelihoodRows& r = spec_.channel2.at(t + 1);
      for (std::size_t y = 0; y < r.size(); ++y) {
        if (!possible(r, y)) continue;
        hist.push_back(static_cast<int>(y));
        for (MessageEvent next : successors(m, t + 1)) acc += node_p2(next, hist, y0 * r.h0[y], y1 * r.h1[y], r_flag);
        hist.pop_back();
      }
      return acc;
    };
    if (can && w0 + w1 > 0.0) cont = children(false);
    double best;
    Decision d = pick(w0, w1, cont, can, best);
    best += (w0 + w1) * spec_.costs.c2;
    if (rec) {
      (*record_)[{m.time, m.symbol, hist}] = d;
      note({t, m.time, m.symbol}, w0, w1, d);
      if (d == Decision::Continue) children(true);
    }
    return best;
  }

  const ProblemSpec& spec_;
  const O1Law& law_;
  std::map<O2Table::Key, Decision>* record_ = nullptr;
  StructureLog* log_ = nullptr;
};

bool o1_structured(const std::map<History, Symbol>& table, const ProblemSpec& spec) {
  std::map<int, std::vector<std::pair<double, Symbol>>> by_time;
  for (const auto& [hist, z] : table) {
    double w0 = spec.p0, w1 = 1.0 - spec.p0;
    for (std::size_t s = 0; s < hist.size(); ++s) {
      const LikelihoodRows& r = spec.channel1.at(static_cast<int>(s) + 1);
      w0 *= r.h0[static_cast<std::size_t>(hist[s])];
      w1 *= r.h1[static_cast<std::size_t>(hist[s])];
    }
    if (w0 + w1 <= 0.0) continue;
    by_time[static_cast<int>(hist.size())].emplace_back(w0 / (w0 + w1), z);
  }
  for (auto& [t, pts] : by_time) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> atoms;
    std::vector<Symbol> labels;
    for (const auto& [pi, z] : pts) {
      if (!atoms.empty() && pi - atoms.back() <= kAtomTolerance) {
        if (labels.back() != z) return false;
        continue;
      }
      atoms.push_back(pi);
      labels.push_back(z);
    }
    try {
      extract_thresholds(atoms, labels, spec.M, t == spec.T1);
    } catch (const StructureViolation&) {
      return false;
    }
  }
  return true;
}

bool o2_structured(const StructureLog& log) {
  for (auto pts : log.o2) {
    auto& v = pts.second;
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> atoms;
    std::vector<Decision> labels;
    for (const auto& [pi, d] : v) {
      if (!atoms.empty() && pi - atoms.back() <= kAtomTolerance) {
        if (labels.back() != d) return false;
        continue;
      }
      atoms.push_back(pi);
      labels.push_back(d);
    }
    try {
      extract_stop_thresholds(atoms, labels);
    } catch (const StructureViolation&) {
      return false;
    }
  }
  return true;
}

// Literal O2 table enumeration: nodes are (message time, symbol, y2 history).
using O2Enumerator = TableEnumerator<O2Table::Key, Decision>;

O2Enumerator o2_enumerator(const ProblemSpec& spec) {
  auto labels = [&spec](const O2Table::Key& k) {
    int step = static_cast<int>(std::get<2>(k).size());
    std::vector<Decision> ls{Decision::Declare0, Decision::Declare1};
    if (step < spec.T2) ls.push_back(Decision::Continue);
    return ls;
  };
  auto children = [&spec](const O2Table::Key& k, const Decision& d) {
    std::vector<O2Table::Key> kids;
    if (d != Decision::Continue) return kids;
    const auto& [time, sym, hist] = k;
    int step = static_cast<int>(hist.size());
    const LikelihoodRows& r = spec.channel2.at(step + 1);
    for (std::size_t y = 0; y < r.size(); ++y) {
      if (!possible(r, y)) continue;
      History c = hist;
      c.push_back(static_cast<int>(y));
      if (spec.variant == Variant::P1 || time > 0) {
        kids.emplace_back(time, sym, c);
        continue;
      }
      int t = step + 1;
      if (t < spec.T1) kids.emplace_back(0, kBlank, c);
      if (t <= spec.T1)
        for (Symbol z = 0; z < spec.M; ++z) kids.emplace_back(t, z, c);
    }
    return kids;
  };
  return O2Enumerator(labels, children);
}

std::vector<O2Table::Key> o2_roots(const ProblemSpec& spec) {
  std::vector<O2Table::Key> roots;
  if (spec.variant == Variant::P1) {
    for (int t = 1; t <= spec.T1; ++t)
      for (Symbol z = 0; z < spec.M; ++z) roots.emplace_back(t, z, History{});
    return roots;
  }
  const LikelihoodRows& r = spec.channel2.at(1);
  for (std::size_t y = 0; y < r.size(); ++y) {
    if (!possible(r, y)) continue;
    History c{static_cast<int>(y)};
    if (spec.T1 > 1) roots.emplace_back(0, kBlank, c);
    for (Symbol z = 0; z < spec.M; ++z) roots.emplace_back(1, z, c);
  }
  return roots;
}

std::uint64_t saturate(double x) {
  return x >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(x);
}

double o2_tree_nodes(const ProblemSpec& spec) {
  double nodes = 0.0;
  if (spec.variant == Variant::P1) {
    double layer = 1.0;
    for (int k = 0; k <= spec.T2; ++k) {
      nodes += layer;
      if (k < spec.T2) layer *= static_cast<double>(spec.channel2.at(k + 1).size());
    }
    return nodes * spec.T1 * spec.M;
  }
  double layer = 1.0;
  for (int t = 1; t <= spec.T2; ++t) {
    layer *= static_cast<double>(spec.channel2.at(t).size());
    double states = (t < spec.T1 ? 1.0 : 0.0) + spec.M * std::min(t, spec.T1);
    nodes += layer * states;
  }
  return nodes;
}

OracleResult run_oracle(const ProblemSpec& spec, const OracleOptions& options) {
  validate(spec);
  std::uint64_t estimate = oracle_work_estimate(spec, options.literal);
  if (estimate > options.cap) throw CapExceeded(estimate, options.cap);

  OracleResult res;
  double best = std::numeric_limits<double>::infinity();
  std::map<History, Symbol> best_o1;
  std::map<O2Table::Key, Decision> best_o2;
  std::vector<std::pair<double, std::map<History, Symbol>>> ties;

  auto o1e = o1_enumerator(spec);
  auto roots1 = o1_roots(spec);

  if (options.literal) {
    std::vector<std::map<O2Table::Key, Decision>> o2_tables;
    auto o2e = o2_enumerator(spec);
    o2e.run(o2_roots(spec), [&](const auto& t) { o2_tables.push_back(t); });
    o1e.run(roots1, [&](const std::map<History, Symbol>& t1) {
      ++res.o1_policies;
      O1Table a(spec.T1, t1);
      for (const auto& t2 : o2_tables) {
        ++res.evaluations;
        double c = exact_cost(a, O2Table(spec.T2, t2), spec);
        if (c < best - kTie) {
          best = c;
          best_o1 = t1;
          best_o2 = t2;
        }
      }
    });
    res.structured_optimum = false;
  } else {
    o1e.run(roots1, [&](const std::map<History, Symbol>& t1) {
      ++res.o1_policies;
      O1Law law = o1_law(t1, spec);
      if (law.delay > best + 1e-9) {  // sunk delay alone already loses
        ++res.pruned;
        return;
      }
      ++res.evaluations;
      double c = law.delay + O2TreeMin(spec, law).solve(nullptr, nullptr);
      if (c < best - kTie) {
        best = c;
        best_o1 = t1;
        std::erase_if(ties, [&](const auto& e) { return e.first > best + 1e-9; });
      }
      if (c <= best + 1e-9 && ties.size() < kMaxCandidates) ties.emplace_back(c, t1);
    });
    O1Law law = o1_law(best_o1, spec);
    O2TreeMin(spec, law).solve(&best_o2, nullptr);
    for (const auto& [c, t1] : ties) {
      if (c > best + 1e-9 || !o1_structured(t1, spec)) continue;
      StructureLog log;
      std::map<O2Table::Key, Decision> rec;
      O1Law l = o1_law(t1, spec);
      O2TreeMin(spec, l).solve(&rec, &log);
      if (o2_structured(log)) {
        res.structured_optimum = true;
        break;
      }
    }
  }
  res.cost = best;
  res.o1 = O1Table(spec.T1, best_o1);
  res.o2 = O2Table(spec.T2, best_o2);
  res.verified_cost = exact_cost(res.o1, res.o2, spec);
  return res;
}

}  // namespace

Symbol O1Table::decide(int t, std::span<const int> y1) const {
  History h(y1.begin(), y1.begin() + t);
  auto it = entries_.find(h);
  if (it == entries_.end()) throw ValidationError("o1 table", "history not covered by the table");
  return it->second;
}

Decision O2Table::decide(int step, std::span<const int> y2, MessageEvent msg) const {
  (void)step;
  auto it = entries_.find({msg.time, msg.symbol, History(y2.begin(), y2.end())});
  if (it == entries_.end()) throw ValidationError("o2 table", "history not covered by the table");
  return it->second;
}

std::uint64_t oracle_work_estimate(const ProblemSpec& spec, bool literal) {
  auto o1e = o1_enumerator(spec);
  double n1 = o1e.count(o1_roots(spec));
  if (!literal) return saturate(n1 * o2_tree_nodes(spec));
  auto o2e = o2_enumerator(spec);
  return saturate(n1 * o2e.count(o2_roots(spec)));
}

OracleResult enumerate_policies_p1(const ProblemSpec& spec, const OracleOptions& options) {
  if (spec.variant != Variant::P1) throw ValidationError("variant", "enumerate_policies_p1 needs variant P1");
  return run_oracle(spec, options);
}

OracleResult enumerate_policies_p2(const ProblemSpec& spec, const OracleOptions& options) {
  if (spec.variant != Variant::P2) throw ValidationError("variant", "enumerate_policies_p2 needs variant P2");
  return run_oracle(spec, options);
}

OracleResult enumerate_policies(const ProblemSpec& spec, const OracleOptions& options) {
  return run_oracle(spec, options);
}

O1Table tabulate(const O1Behavior& o1, const ProblemSpec& spec) {
  std::map<History, Symbol> table;
  std::function<void(History&)> walk = [&](History& hist) {
    int t = static_cast<int>(hist.size());
    Symbol z = o1.decide(t, hist);
    if (t == spec.T1 && z == kBlank) throw ValidationError("o1", "blank at the terminal time");
    table[hist] = z;
    if (z != kBlank) return;
    const LikelihoodRows& r = spec.channel1.at(t + 1);
    for (std::size_t y = 0; y < r.size(); ++y) {
      if (!possible(r, y)) continue;
      hist.push_back(static_cast<int>(y));
      walk(hist);
      hist.pop_back();
    }
  };
  for (History root : o1_roots(spec)) walk(root);
  return O1Table(spec.T1, std::move(table));
}

OracleResult best_o1_against(const O2Behavior& o2, const ProblemSpec& spec, const OracleOptions& options) {
  validate(spec);
  auto o1e = o1_enumerator(spec);
  auto roots = o1_roots(spec);
  double count = o1e.count(roots);
  if (count > static_cast<double>(options.cap)) throw CapExceeded(saturate(count), options.cap);
  OracleResult res;
  double best = std::numeric_limits<double>::infinity();
  std::map<History, Symbol> winner;
  o1e.run(roots, [&](const std::map<History, Symbol>& t1) {
    ++res.o1_policies;
    ++res.evaluations;
    double c = exact_cost(O1Table(spec.T1, t1), o2, spec);
    if (c < best - kTie) {
      best = c;
      winner = t1;
    }
  });
  res.cost = best;
  res.o1 = O1Table(spec.T1, winner);
  res.verified_cost = exact_cost(res.o1, o2, spec);
  return res;
}

OracleResult best_o2_against(const O1Behavior& o1, const ProblemSpec& spec) {
  validate(spec);
  OracleResult res;
  res.o1 = tabulate(o1, spec);
  O1Law law = o1_law(res.o1.entries(), spec);
  std::map<O2Table::Key, Decision> rec;
  res.cost = law.delay + O2TreeMin(spec, law).solve(&rec, nullptr);
  res.o2 = O2Table(spec.T2, std::move(rec));
  res.o1_policies = 1;
  res.evaluations = 1;
  res.verified_cost = exact_cost(res.o1, res.o2, spec);
  return res;
}

StoppingRuleOracle enumerate_stopping_rules(double prior, std::span<const LikelihoodRows> rows,
                                            const CostModel& costs, int T) {
  using Rule = std::map<History, Decision>;
  auto labels = [T](const History& h) {
    std::vector<Decision> ls{Decision::Declare0, Decision::Declare1};
    if (static_cast<int>(h.size()) < T) ls.push_back(Decision::Continue);
    return ls;
  };
  auto children = [&rows](const History& h, const Decision& d) {
    std::vector<History> kids;
    if (d != Decision::Continue) return kids;
    const LikelihoodRows& r = rows[h.size()];
    for (std::size_t y = 0; y < r.size(); ++y)
      if (possible(r, y)) {
        History c = h;
        c.push_back(static_cast<int>(y));
        kids.push_back(std::move(c));
      }
    return kids;
  };
  TableEnumerator<History, Decision> e(labels, children);
  StoppingRuleOracle out;
  out.cost = std::numeric_limits<double>::infinity();
  e.run({History{}}, [&](const Rule& rule) {
    ++out.rules;
    double cost = 0.0;
    for (int h = 0; h < 2; ++h) {
      double ph = h == 0 ? prior : 1.0 - prior;
      std::function<void(History&, double)> walk = [&](History& hist, double p) {
        Decision d = rule.at(hist);
        int k = static_cast<int>(hist.size());
        if (d != Decision::Continue) {
          cost += ph * p * (costs.c2 * k + costs.J[static_cast<int>(d)][h]);
          return;
        }
        const LikelihoodRows& r = rows[static_cast<std::size_t>(k)];
        for (std::size_t y = 0; y < r.size(); ++y) {
          if (!possible(r, y)) continue;
          hist.push_back(static_cast<int>(y));
          walk(hist, p * hp(r, y, h));
          hist.pop_back();
        }
      };
      History root;
      walk(root, 1.0);
    }
    out.cost = std::min(out.cost, cost);
  });
  return out;
}

}  // namespace decseq
