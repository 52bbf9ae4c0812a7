#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rq/term.hpp"

namespace rq {

/// Restricted intensional set {ctrl : dom | filter}. Extended form carries
/// locals existentially quantified per element and a conjunction of
/// functional-predicate atoms binding them. Plain RIS has empty locals and
/// fpreds == true.
struct RisTerm {
  CtrlTerm ctrl;
  SetTermPtr dom;  // empty, a set variable, or an ext chain; never a RIS
  std::vector<Var> locals;
  FormulaPtr filter;
  FormulaPtr fpreds;
};

// ---------------------------------------------------------------------------
// Constraints. Negation and implication do not exist at this level; they are
// eliminated on the surface representation before lowering.
// ---------------------------------------------------------------------------

struct CEqSet {
  SetTermPtr lhs, rhs;
};
struct CIn {
  XTermPtr elem;
  SetTermPtr set;
};
struct CNin {
  XTermPtr elem;
  SetTermPtr set;
};
/// lhs ⊆ {ctrl : lhs | filter}; the RIS domain is structurally identical to
/// lhs at construction and both are substituted in lockstep.
struct CSubsetRuq {
  SetTermPtr lhs;
  RisTerm ris;
};
/// Theory literal or functional-predicate atom, interpreted by the plugin.
struct CTheory {
  std::string pred;
  std::vector<XTermPtr> args;
};
/// foreach / exists constraint, kept symbolic inside RIS filters and
/// desugared when it reaches conjunction level.
struct CRq {
  Quant quant;
  CtrlTerm ctrl;
  SetTermPtr dom;
  std::vector<Var> locals;
  FormulaPtr filter;
  FormulaPtr fpreds;
};

using Constraint = std::variant<CEqSet, CIn, CNin, CSubsetRuq, CTheory, CRq>;

struct FTrue {};
struct FFalse {};
struct FAnd {
  FormulaPtr lhs, rhs;
};
struct FOr {
  FormulaPtr lhs, rhs;
};
struct FAtom {
  Constraint c;
};

struct Formula {
  std::variant<FTrue, FFalse, FAnd, FOr, FAtom> node;
};

FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_atom(Constraint c);
/// Conjunction of a list; empty list is true.
FormulaPtr mk_conj(const std::vector<FormulaPtr>& fs);

bool is_true(const FormulaPtr& f);
bool is_false(const FormulaPtr& f);

bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const Constraint& a, const Constraint& b);
bool equal(const RisTerm& a, const RisTerm& b);

/// Free variables; control variables and locals of RIS / RQ nodes are bound.
void collect_free_vars(const FormulaPtr& f, std::set<Var>& out);
void collect_free_vars(const Constraint& c, std::set<Var>& out);
std::set<Var> free_vars(const FormulaPtr& f);
std::set<Var> free_vars(const Constraint& c);

/// Flattens nested conjunctions into a list (no ors crossed).
void flatten_and(const FormulaPtr& f, std::vector<FormulaPtr>& out);

}  // namespace rq
