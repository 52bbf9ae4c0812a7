#pragma once

#include <string_view>

#include "rq/errors.hpp"
#include "rq/surface.hpp"

namespace rq {

/// Parses a whole program: zero or more definitions followed by exactly one
/// query, each terminated by '.'. Throws ParseError with line/column on
/// malformed input, recursive definitions, or ill-shaped subset constraints.
Program parse_program(std::string_view text);

/// Parses a single formula (no trailing '.'); used by tests and bindings.
SurFormulaPtr parse_formula(std::string_view text);

/// Parses a single ground term; used to read valuation values back.
SurTermPtr parse_term(std::string_view text);

}  // namespace rq
