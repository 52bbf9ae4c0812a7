#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rq/var.hpp"

namespace rq {

/// Source position for error reporting (1-based).
struct Pos {
  int line = 0;
  int col = 0;
};

struct SurTerm;
struct SurFormula;
using SurTermPtr = std::shared_ptr<const SurTerm>;
using SurFormulaPtr = std::shared_ptr<const SurFormula>;

// ---------------------------------------------------------------------------
// Surface terms are untyped; sorts are resolved from positions before
// lowering to the two-sorted core.
// ---------------------------------------------------------------------------

struct UVar {
  std::string name;
  std::optional<std::uint64_t> fresh_id;  // set when printing generated vars
};
struct UAtom {
  std::string name;
};
struct UInt {
  long long value;
};
struct UPair {
  SurTermPtr first, second;
};
struct UArith {
  std::string op;  // "+", "-" (binary or unary), "*"
  std::vector<SurTermPtr> args;
};
struct UEmpty {};
struct UExt {
  std::vector<SurTermPtr> elems;  // nonempty
  SurTermPtr tail;                // may be null ({a,b} ends in empty)
};
/// ris(Ctrl, Dom, Filter) / ris(Ctrl, Dom, [Locals], Filter, FPreds); mainly
/// the answer syntax for irreducible RUQ constraints.
struct URis {
  SurTermPtr ctrl;
  SurTermPtr dom;
  std::vector<std::string> locals;
  SurFormulaPtr filter;
  SurFormulaPtr fpreds;  // may be null
};

struct SurTerm {
  std::variant<UVar, UAtom, UInt, UPair, UArith, UEmpty, UExt, URis> node;
  Pos pos;
};

// ---------------------------------------------------------------------------
// Surface formulas: core connectives plus negation, implication, restricted
// quantifiers, defined-predicate calls and sort atoms.
// ---------------------------------------------------------------------------

struct UTrue {};
struct UFalse {};
struct UAnd {
  SurFormulaPtr lhs, rhs;
};
struct UOr {
  SurFormulaPtr lhs, rhs;
};
struct UNeg {
  SurFormulaPtr body;
};
struct UImplies {
  SurFormulaPtr lhs, rhs;
};
/// t1 op t2 with op in {=, neq, in, nin, =<, <, >=, >}.
struct URel {
  std::string op;
  SurTermPtr lhs, rhs;
};
struct USubset {
  SurTermPtr lhs;
  SurTermPtr ris;  // must be a URis over lhs
};
struct Binder {
  SurTermPtr ctrl;
  SurTermPtr dom;
};
/// Single-binder restricted quantifier; multi-binder sugar is expanded
/// outermost-first at parse time. Extended form carries locals and a
/// functional-predicate conjunction.
struct URq {
  Quant quant;
  Binder binder;
  std::vector<std::string> locals;
  SurFormulaPtr filter;
  SurFormulaPtr fpreds;  // null for the plain 2-argument form
};
struct UCall {
  std::string name;
  std::vector<SurTermPtr> args;
};
struct USort {
  bool is_set;
  SurTermPtr term;
};

struct SurFormula {
  std::variant<UTrue, UFalse, UAnd, UOr, UNeg, UImplies, URel, USubset, URq, UCall, USort>
      node;
  Pos pos;
};

struct Definition {
  std::string name;
  std::vector<std::string> params;
  SurFormulaPtr body;
  Pos pos;
};

struct Program {
  std::vector<Definition> defs;
  SurFormulaPtr query;
};

SurTermPtr mk_sur_term(SurTerm t);
SurFormulaPtr mk_sur_formula(SurFormula f);

/// Stable key identifying a surface variable (name plus rename stamp).
inline std::string var_key(const UVar& v) {
  return v.fresh_id ? v.name + "#" + std::to_string(*v.fresh_id) : v.name;
}

bool equal(const SurTermPtr& a, const SurTermPtr& b);
bool equal(const SurFormulaPtr& a, const SurFormulaPtr& b);
bool equal(const Program& a, const Program& b);

}  // namespace rq
