#pragma once

#include <string>
#include <vector>

namespace decseq {

// O2 decisions share the integer encoding of the table actions: 0/1 declare, -1 continue.
enum class Decision : int { Declare0 = 0, Declare1 = 1, Continue = -1 };

// A value function on sorted belief atoms (or grid nodes) with the chosen action per atom.
// Actions are message symbols / kBlank for O1 and Decision values for O2.
struct ValueTable {
  int t = 0;
  std::string history;
  std::vector<double> atoms;
  std::vector<double> values;
  std::vector<int> actions;
};

// Every adjacent triple (a, b, c) satisfies V(b) >= interpolation of V(a), V(c) minus tol.
bool midpoint_concave(const ValueTable& table, double tol);
bool midpoint_concave(const std::vector<double>& xs, const std::vector<double>& vs, double tol);

}  // namespace decseq
