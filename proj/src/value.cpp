#include "rq/value.hpp"

#include <algorithm>
#include <sstream>

namespace rq {

Value Value::pair(Value a, Value b) {
  return Value(PairV{std::make_shared<const Value>(std::move(a)),
                     std::make_shared<const Value>(std::move(b))});
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return Value(SetV{std::move(elems)});
}

bool Value::set_contains(const Value& v) const {
  const auto& es = set_elems();
  return std::binary_search(es.begin(), es.end(), v);
}

bool operator==(const Value& a, const Value& b) {
  if (a.node_.index() != b.node_.index()) return false;
  if (a.is_atom()) return a.atom_name() == b.atom_name();
  if (a.is_int()) return a.int_value() == b.int_value();
  if (a.is_pair())
    return a.pair_first() == b.pair_first() && a.pair_second() == b.pair_second();
  return a.set_elems() == b.set_elems();
}

bool operator<(const Value& a, const Value& b) {
  if (a.node_.index() != b.node_.index()) return a.node_.index() < b.node_.index();
  if (a.is_atom()) return a.atom_name() < b.atom_name();
  if (a.is_int()) return a.int_value() < b.int_value();
  if (a.is_pair()) {
    if (a.pair_first() != b.pair_first()) return a.pair_first() < b.pair_first();
    return a.pair_second() < b.pair_second();
  }
  return a.set_elems() < b.set_elems();
}

std::string Value::str() const {
  std::ostringstream os;
  if (is_atom()) {
    os << atom_name();
  } else if (is_int()) {
    os << int_value();
  } else if (is_pair()) {
    os << "[" << pair_first().str() << "," << pair_second().str() << "]";
  } else {
    os << "{";
    const auto& es = set_elems();
    for (size_t i = 0; i < es.size(); ++i) {
      if (i) os << ",";
      os << es[i].str();
    }
    os << "}";
  }
  return os.str();
}

}  // namespace rq
