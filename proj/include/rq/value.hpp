#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rq/var.hpp"

namespace rq {

/// A concrete value: atom, integer, ordered pair, or finite set. Sets are
/// duplicate-free and kept sorted, so equality is plain structural equality.
class Value {
 public:
  struct AtomV {
    std::string name;
  };
  struct IntV {
    long long v;
  };
  struct PairV {
    std::shared_ptr<const Value> first, second;
  };
  struct SetV {
    std::vector<Value> elems;  // canonical: sorted, no duplicates
  };

  Value() : node_(IntV{0}) {}
  static Value atom(std::string name) { return Value(AtomV{std::move(name)}); }
  static Value integer(long long v) { return Value(IntV{v}); }
  static Value pair(Value a, Value b);
  static Value set(std::vector<Value> elems);  // canonicalizes

  bool is_atom() const { return std::holds_alternative<AtomV>(node_); }
  bool is_int() const { return std::holds_alternative<IntV>(node_); }
  bool is_pair() const { return std::holds_alternative<PairV>(node_); }
  bool is_set() const { return std::holds_alternative<SetV>(node_); }

  const std::string& atom_name() const { return std::get<AtomV>(node_).name; }
  long long int_value() const { return std::get<IntV>(node_).v; }
  const Value& pair_first() const { return *std::get<PairV>(node_).first; }
  const Value& pair_second() const { return *std::get<PairV>(node_).second; }
  const std::vector<Value>& set_elems() const { return std::get<SetV>(node_).elems; }

  bool set_contains(const Value& v) const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b);

  std::string str() const;  // concrete syntax (parseable for ground terms)

 private:
  using Node = std::variant<AtomV, IntV, PairV, SetV>;
  explicit Value(Node n) : node_(std::move(n)) {}
  Node node_;
};

/// Assignment of concrete values to variables.
using Valuation = std::map<Var, Value>;

}  // namespace rq
