#include "decseq/value_table.hpp"

namespace decseq {

bool midpoint_concave(const std::vector<double>& xs, const std::vector<double>& vs, double tol) {
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    double span = xs[i + 1] - xs[i - 1];
    if (span <= 0.0) continue;
    double w = (xs[i] - xs[i - 1]) / span;
    double interp = vs[i - 1] + w * (vs[i + 1] - vs[i - 1]);
    if (vs[i] < interp - tol) return false;
  }
  return true;
}

bool midpoint_concave(const ValueTable& table, double tol) {
  return midpoint_concave(table.atoms, table.values, tol);
}

}  // namespace decseq
