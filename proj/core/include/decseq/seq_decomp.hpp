#pragma once

#include <cstddef>
#include <vector>

#include "decseq/belief.hpp"
#include "decseq/model.hpp"
#include "decseq/policy.hpp"
#include "decseq/value_table.hpp"

namespace decseq {

struct DesignerStats {
  std::size_t nodes_expanded = 0;
  std::size_t memo_hits = 0;
  std::size_t partitions_evaluated = 0;
};

struct DesignerSolution {
  Variant variant = Variant::P1;
  O1Policy o1;
  O2Policy o2;
  double cost = 0.0;
  DesignerStats stats;
};

DesignerSolution solve_p1(const ProblemSpec& spec);
DesignerSolution solve_p2(const ProblemSpec& spec);
DesignerSolution solve_designer(const ProblemSpec& spec);

// Every labeling of n sorted O1 atoms whose symbol regions are intervals ordered with
// higher symbols at lower beliefs; blanks only when not terminal. Enumeration order
// (blank first, then the open symbol, then new symbols from high to low) defines the
// lexicographic tie-break.
std::vector<std::vector<Symbol>> o1_labelings(std::size_t n, int M, bool terminal);

// Labelings of sorted O2 atoms of the form 1* N* 0*; atoms at belief 0 must declare 1
// and atoms at belief 1 must declare 0.
std::vector<std::vector<Decision>> o2_labelings(const std::vector<double>& atoms);

}  // namespace decseq
