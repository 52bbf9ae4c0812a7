#pragma once

#include <stdexcept>
#include <string>

#include "rq/surface.hpp"

namespace rq {

/// Any problem with the input: syntax, sorts, recursive definitions,
/// non-negatable formulas, unknown theory symbols. Maps to exit status 3.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg, Pos pos = {})
      : std::runtime_error(pos.line > 0 ? std::to_string(pos.line) + ":" +
                                              std::to_string(pos.col) + ": " + msg
                                        : msg),
        pos(pos) {}
  Pos pos;
};

struct ParseError : InputError {
  using InputError::InputError;
};

/// Theory plugin misuse (unknown literal symbol, non-linear term, ...).
struct TheoryError : InputError {
  using InputError::InputError;
};

/// Oracle evaluation over an ill-formed valuation or oversized universe.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rq
