#include "decseq/model.hpp"

#include <algorithm>
#include <cmath>

#include "decseq/error.hpp"

namespace decseq {

namespace {
constexpr double kRowTolerance = 1e-12;
}

std::string to_string(Variant v) { return v == Variant::P1 ? "P1" : "P2"; }

const LikelihoodRows& ObservationChannel::at(int t) const {
  if (tables.empty()) throw ValidationError("channel", "no likelihood tables");
  if (tables.size() == 1) return tables.front();
  if (t < 1 || t > static_cast<int>(tables.size()))
    throw ValidationError("channel", "time " + std::to_string(t) + " outside channel horizon");
  return tables[static_cast<std::size_t>(t - 1)];
}

bool ObservationChannel::stationary() const {
  return std::all_of(tables.begin(), tables.end(),
                     [&](const LikelihoodRows& r) { return r == tables.front(); });
}

double terminal_cost(int u, double pi, const CostModel& costs) {
  return costs.J[u][0] * pi + costs.J[u][1] * (1.0 - pi);
}

double terminal_crossing(const CostModel& costs) {
  const auto& J = costs.J;
  return (J[0][1] - J[1][1]) / ((J[1][0] - J[1][1]) - (J[0][0] - J[0][1]));
}

CostModel with_derived_bound(CostModel costs) {
  if (costs.L == 0.0) {
    for (const auto& row : costs.J)
      for (double v : row) costs.L = std::max(costs.L, v);
  }
  return costs;
}

void validate(const CostModel& costs, const std::string& path) {
  auto positive = [&](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError(path + "." + name, "must be finite and positive");
  };
  positive(costs.c1, "c1");
  positive(costs.c2, "c2");
  for (int u = 0; u < 2; ++u)
    for (int h = 0; h < 2; ++h) {
      double v = costs.J[u][h];
      std::string p = path + ".J[" + std::to_string(u) + "][" + std::to_string(h) + "]";
      if (!std::isfinite(v) || v < 0.0) throw ValidationError(p, "must be finite and non-negative");
      if (v > costs.L) throw ValidationError(path + ".L", "bound L does not dominate " + p);
    }
  if (!(costs.J[0][1] > costs.J[1][1]) || !(costs.J[1][0] > costs.J[0][0]))
    throw ValidationError(path + ".J", "cost ordering violated");
}

void validate(const ObservationChannel& channel, int horizon, const std::string& path) {
  if (channel.tables.empty()) throw ValidationError(path + ".tables", "no likelihood tables");
  if (!channel.covers(horizon))
    throw ValidationError(path + ".tables", "channel covers " + std::to_string(channel.tables.size()) +
                                                " steps, horizon needs " + std::to_string(horizon));
  for (std::size_t t = 0; t < channel.tables.size(); ++t) {
    const auto& rows = channel.tables[t];
    std::string tp = path + ".tables[" + std::to_string(t) + "]";
    if (rows.h0.size() < 2) throw ValidationError(tp, "alphabet must have at least 2 symbols");
    if (rows.h0.size() != rows.h1.size()) throw ValidationError(tp, "rows have different alphabets");
    for (int h = 0; h < 2; ++h) {
      const auto& row = h == 0 ? rows.h0 : rows.h1;
      std::string rp = tp + "[" + std::to_string(h) + "]";
      double sum = 0.0;
      for (double v : row) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError(rp, "negative or non-finite probability");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowTolerance)
        throw ValidationError(rp, "row not normalized (sum=" + std::to_string(sum) + ")");
    }
  }
}

void validate(const ProblemSpec& spec) {
  if (!std::isfinite(spec.p0) || spec.p0 < 0.0 || spec.p0 > 1.0)
    throw ValidationError("prior", "p0 must lie in [0,1]");
  if (spec.T1 < 1) throw ValidationError("horizons.T1", "must be a positive integer");
  if (spec.T2 < 1) throw ValidationError("horizons.T2", "must be a positive integer");
  if (spec.variant == Variant::P2 && spec.T2 < spec.T1)
    throw ValidationError("horizons", "variant P2 requires T2 >= T1");
  if (spec.M < 2) throw ValidationError("M", "message alphabet size must be at least 2");
  if (spec.channel1.observer != 1) throw ValidationError("channels", "observer 1 channel missing");
  if (spec.channel2.observer != 2) throw ValidationError("channels", "observer 2 channel missing");
  validate(spec.channel1, spec.T1, "channels[observer=1]");
  validate(spec.channel2, spec.T2, "channels[observer=2]");
  validate(spec.costs, "costs");
}

}  // namespace decseq
