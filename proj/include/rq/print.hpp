#pragma once

#include <string>

#include "rq/formula.hpp"
#include "rq/surface.hpp"

namespace rq {

// Concrete syntax output. For every program P, parse_program(print(P)) is
// structurally equal to P. Core formulas print in the same syntax; generated
// variables print with the reserved "_N" prefix.

std::string print(const Var& v);
std::string print(const SurTermPtr& t);
std::string print(const SurFormulaPtr& f);
std::string print(const Program& p);

std::string print(const XTermPtr& t);
std::string print(const SetTermPtr& t);
std::string print(const CtrlTerm& c);
std::string print(const Constraint& c);
std::string print(const FormulaPtr& f);

}  // namespace rq
