#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace rq {

/// The two sorts of the language: finite sets and theory elements.
enum class Sort { Set, X };

enum class Quant { Forall, Exists };

inline const char* sort_name(Sort s) { return s == Sort::Set ? "set" : "isX"; }

/// A variable. User variables carry no fresh_id; generated variables are
/// identified by a monotone counter and print with the reserved "_N" prefix,
/// which the parser rejects in user input.
struct Var {
  std::string name;
  std::optional<std::uint64_t> fresh_id;
  Sort sort = Sort::X;

  bool is_fresh() const { return fresh_id.has_value(); }

  friend bool operator==(const Var& a, const Var& b) {
    return a.name == b.name && a.fresh_id == b.fresh_id && a.sort == b.sort;
  }
  friend bool operator!=(const Var& a, const Var& b) { return !(a == b); }
  friend bool operator<(const Var& a, const Var& b) {
    if (a.name != b.name) return a.name < b.name;
    if (a.fresh_id != b.fresh_id) return a.fresh_id < b.fresh_id;
    return static_cast<int>(a.sort) < static_cast<int>(b.sort);
  }
};

/// Session-wide supply of fresh variables. A single atomic counter backs the
/// whole process; every issued variable is distinct from all user variables
/// by the reserved name prefix.
Var fresh_var(Sort sort);

/// Resets the counter. Only meant for tests and one-shot CLI runs that want
/// reproducible generated names.
void reset_fresh_counter(std::uint64_t next = 1);

}  // namespace rq
