#pragma once

#include <optional>

#include "rq/formula.hpp"
#include "rq/sorts.hpp"
#include "rq/surface.hpp"
#include "rq/theory.hpp"

namespace rq {

// ---------------------------------------------------------------------------
// Surface transformations
// ---------------------------------------------------------------------------

/// Macro-expands defined-predicate calls (non-recursive; the parser already
/// rejected cycles). Body variables that are not parameters are renamed fresh
/// per call site. Throws InputError on arity mismatches.
SurFormulaPtr expand_calls(const SurFormulaPtr& f, const std::vector<Definition>& defs);

/// Pushes one negation through f: de Morgan over conjunction/disjunction,
/// quantifier duals for foreach/exists (extended forms keep the functional
/// predicates and negate only the filter), literal complements from the
/// theory. Throws InputError on set equality under negation and other
/// non-negatable forms.
SurFormulaPtr negate(const SurFormulaPtr& f, const Theory& th);

/// Removes every neg and implies node (implies(p,q) becomes neg(p) or q).
SurFormulaPtr eliminate_neg(const SurFormulaPtr& f, const Theory& th);

// ---------------------------------------------------------------------------
// Lowering to the two-sorted core
// ---------------------------------------------------------------------------

struct Lowered {
  FormulaPtr goal;  // RQ constraints are kept symbolic (CRq nodes)
  std::map<std::string, Var> query_vars;  // var_key -> resolved core variable
  bool sort_false = false;
  std::vector<std::string> sort_clashes;
};

/// Resolves sorts and builds the core formula. Binder variables that would
/// capture a free variable of the same name are renamed. Validates control
/// terms (distinct variables) and functional-predicate sections (§6 shape:
/// every conjunct a registered functional predicate whose result is a local,
/// every local the result of exactly one conjunct).
Lowered lower(const SurFormulaPtr& f, const Theory& th);

/// Definitional expansion of every conjunction-level RQ node (foreach to the
/// RUQ subset form, exists to fresh-witness membership); RIS filters keep
/// their nested quantifiers symbolic.
FormulaPtr desugar(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Termination-fragment classification
// ---------------------------------------------------------------------------

enum class Fragment { PhiForall, PhiExists, PhiExistsForall, PhiForallExists, Outside };
const char* fragment_name(Fragment f);

struct DomainNode {
  int conjunct = 0;  // 1-based conjunct index
  int index = 0;     // 1-based position of the RQ within the conjunct
  Quant quant = Quant::Forall;
  Var domain_var;  // the variable of the variable domain
};
bool operator==(const DomainNode& a, const DomainNode& b);

struct DomainGraph {
  std::vector<DomainNode> nodes;
  std::vector<std::pair<size_t, size_t>> edges;  // indices into nodes
};

struct ClassifyReport {
  Fragment fragment = Fragment::PhiForall;
  DomainGraph graph;             // of the weakest disjunct
  std::vector<DomainNode> loop;  // forall-exists loop witness when Outside
  std::vector<std::string> warnings;
  std::string text() const;
};

/// Classifies into the most specific decidable fragment; formulas containing
/// disjunction are classified per disjunct and the weakest verdict is
/// reported. Outside verdicts carry a concrete forall-exists loop.
ClassifyReport classify(const FormulaPtr& f);

/// Domain graph of one conjunction of (nested) RQ constraints.
DomainGraph build_domain_graph(const std::vector<FormulaPtr>& conjuncts);

/// A path through the graph alternating forall/exists whose first and last
/// domain variables coincide, with pairwise distinct conjunct indices.
std::optional<std::vector<DomainNode>> find_ae_loop(const DomainGraph& g);

}  // namespace rq
