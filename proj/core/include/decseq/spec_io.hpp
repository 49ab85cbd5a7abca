#pragma once

#include <string>
#include <string_view>

#include "decseq/model.hpp"

namespace decseq {

// Parses and validates a problem-spec JSON document.
//
//   {"prior": 0.5,
//    "channels": [{"observer": 1, "tables": [[[0.8, 0.2], [0.2, 0.8]]]},
//                 {"observer": 2, "tables": [[0.8, 0.2], [0.2, 0.8]]}],
//    "costs": {"c1": 0.05, "c2": 0.05, "J": [[0, 1], [1, 0]]},
//    "horizons": {"T1": 2, "T2": 2}, "variant": "P1", "M": 2}
//
// `tables` is either a list of per-time [row_H0, row_H1] pairs or a single pair
// (replicated across time). J is indexed J[u][h]. "L" in costs is optional.
ProblemSpec load_problem_spec(std::string_view text);
ProblemSpec load_problem_spec_file(const std::string& path);

std::string problem_spec_to_json(const ProblemSpec& spec, int indent = 2);

// Stable 64-bit FNV-1a digest of the canonical JSON form, as 16 hex digits.
std::string spec_digest(const ProblemSpec& spec);

}  // namespace decseq
