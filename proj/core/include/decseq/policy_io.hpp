#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "decseq/infinite_horizon.hpp"
#include "decseq/oracle.hpp"
#include "decseq/policy.hpp"
#include "decseq/seq_decomp.hpp"
#include "decseq/simulate.hpp"
#include "decseq/wald.hpp"

namespace decseq {

struct PolicyPair {
  O1Policy o1;
  O2Policy o2;
};

// {"o1": {"M", "stages": [{"t", "terminal", "send": [[lo, hi] | null, ...]}]},
//  "o2": {"variant", "M", "T1", "T2", "bounded",
//         "messages": [{"t", "symbols": [[h0, h1], ...], "blank": [h0, h1]}],
//         "pre_message": [{"t", "w1", "w2"}], "wald": [{"k", "w1", "w2"}]}}
// w1 is the declare-1 threshold (pi <= w1) and w2 the declare-0 threshold (pi >= w2).
std::string policies_to_json(const O1Policy& o1, const O2Policy& o2, int indent = 2);
// Accepts the document above or a designer solution document.
PolicyPair load_policies(std::string_view text);
PolicyPair load_policies_file(const std::string& path);

std::string designer_solution_to_json(const DesignerSolution& sol, int indent = 2);
std::string certificate_to_json(const TruncationCertificate& c, int indent = 2);
std::string oracle_result_to_json(const OracleResult& r, int indent = 2);

// CSV "k,w1_k,w2_k" rows for each Wald stage.
std::string wald_thresholds_csv(const std::vector<StopThresholds>& stages);
// CSV "t,symbol,lo,hi" rows for O1's send regions.
std::string o1_thresholds_csv(const O1Policy& o1);

}  // namespace decseq
