#pragma once

#include <map>
#include <string>
#include <vector>

#include "rq/surface.hpp"

namespace rq {

/// Result of sort resolution over a surface formula. Every free variable gets
/// exactly one sort; variables constrained to both sorts, or constants used
/// at the wrong sort, are reported as clashes.
struct SortReport {
  bool ok = true;
  std::map<std::string, Sort> free_sorts;  // keyed by var_key
  std::map<std::string, UVar> vars;        // key -> variable
  std::vector<std::string> clashes;
};

SortReport infer_sorts(const SurFormulaPtr& f);

/// Conjoins one sort atom (set(v) or isx(v)) per free variable that does not
/// already carry one. Idempotent.
SurFormulaPtr sort_infer(const SurFormulaPtr& f);

/// Returns f unchanged when the sort constraints are satisfiable, false
/// otherwise.
SurFormulaPtr sort_check(const SurFormulaPtr& f);

}  // namespace rq
