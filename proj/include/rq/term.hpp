#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rq/var.hpp"

namespace rq {

struct XTerm;
struct SetTerm;
struct Formula;
using XTermPtr = std::shared_ptr<const XTerm>;
using SetTermPtr = std::shared_ptr<const SetTerm>;
using FormulaPtr = std::shared_ptr<const Formula>;

// ---------------------------------------------------------------------------
// Element (X-sort) terms: variables, constants, ordered pairs and theory
// function applications (linear arithmetic expressions).
// ---------------------------------------------------------------------------

struct XVar {
  Var var;  // var.sort == Sort::X
};
struct XAtom {
  std::string name;  // lowercase-initial identifier
};
struct XInt {
  long long value;
};
struct XPair {
  XTermPtr first, second;
};
struct XApply {
  std::string fn;  // "+", "-", "*"
  std::vector<XTermPtr> args;
};

struct XTerm {
  std::variant<XVar, XAtom, XInt, XPair, XApply> node;
};

XTermPtr mk_xvar(Var v);
XTermPtr mk_atom(std::string name);
XTermPtr mk_int(long long value);
XTermPtr mk_pair(XTermPtr a, XTermPtr b);
XTermPtr mk_apply(std::string fn, std::vector<XTermPtr> args);

// ---------------------------------------------------------------------------
// Set (extensional) terms: empty, variable, or element-cons. Restricted
// intensional sets are not set terms here: they occur only on the right-hand
// side of RUQ subset constraints (see RisTerm in formula.hpp), which makes
// the shape restrictions on membership/equality/RIS-domain arguments hold by
// construction.
// ---------------------------------------------------------------------------

struct SEmpty {};
struct SVar {
  Var var;  // var.sort == Sort::Set
};
struct SCons {
  XTermPtr elem;
  SetTermPtr rest;
};

struct SetTerm {
  std::variant<SEmpty, SVar, SCons> node;
};

SetTermPtr mk_empty();
SetTermPtr mk_svar(Var v);
SetTermPtr mk_cons(XTermPtr elem, SetTermPtr rest);
/// {e1,...,en / tail}
SetTermPtr mk_ext(const std::vector<XTermPtr>& elems, SetTermPtr tail);

// ---------------------------------------------------------------------------
// Control terms: a variable or a nested pair of control terms, with all
// variables pairwise distinct.
// ---------------------------------------------------------------------------

struct CtrlPair;
struct CtrlTerm {
  std::variant<Var, std::shared_ptr<const CtrlPair>> node;
};
struct CtrlPair {
  CtrlTerm first, second;
};

CtrlTerm mk_ctrl(Var v);
CtrlTerm mk_ctrl(CtrlTerm a, CtrlTerm b);
std::vector<Var> ctrl_vars(const CtrlTerm& c);
/// The X-term spelled by a control term (variables stay variables).
XTermPtr ctrl_to_xterm(const CtrlTerm& c);

// ---------------------------------------------------------------------------
// Structural equality and queries.
// ---------------------------------------------------------------------------

bool equal(const XTermPtr& a, const XTermPtr& b);
bool equal(const SetTermPtr& a, const SetTermPtr& b);
bool equal(const CtrlTerm& a, const CtrlTerm& b);

bool is_empty(const SetTermPtr& s);
const SVar* as_svar(const SetTermPtr& s);
const SCons* as_scons(const SetTermPtr& s);
const XVar* as_xvar(const XTermPtr& t);

/// True iff t is an ext_cons chain whose terminal variable is v.
bool occurs_in_tail(const Var& v, const SetTermPtr& t);

/// Elements and tail of an extensional chain. The tail is either empty or a
/// set variable.
struct ExtParts {
  std::vector<XTermPtr> elems;
  SetTermPtr tail;
};
ExtParts ext_parts(const SetTermPtr& s);

void collect_free_vars(const XTermPtr& t, std::set<Var>& out);
void collect_free_vars(const SetTermPtr& t, std::set<Var>& out);
std::set<Var> free_vars(const XTermPtr& t);
std::set<Var> free_vars(const SetTermPtr& t);

}  // namespace rq
