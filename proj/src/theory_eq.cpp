#include "rq/print.hpp"
#include "rq/subst.hpp"
#include "rq/theory.hpp"

namespace rq {

Value eval_xterm(const XTermPtr& t, const Valuation& val) {
  if (const auto* v = std::get_if<XVar>(&t->node)) {
    auto it = val.find(v->var);
    if (it == val.end())
      throw EvalError("unbound variable in evaluation: " + print(v->var));
    return it->second;
  }
  if (const auto* a = std::get_if<XAtom>(&t->node)) return Value::atom(a->name);
  if (const auto* i = std::get_if<XInt>(&t->node)) return Value::integer(i->value);
  if (const auto* p = std::get_if<XPair>(&t->node))
    return Value::pair(eval_xterm(p->first, val), eval_xterm(p->second, val));
  const auto& ap = std::get<XApply>(t->node);
  std::vector<long long> args;
  for (const auto& arg : ap.args) {
    Value v = eval_xterm(arg, val);
    if (!v.is_int())
      throw EvalError("arithmetic over a non-integer value: " + v.str());
    args.push_back(v.int_value());
  }
  if (ap.fn == "+" && args.size() == 2) return Value::integer(args[0] + args[1]);
  if (ap.fn == "-" && args.size() == 2) return Value::integer(args[0] - args[1]);
  if (ap.fn == "-" && args.size() == 1) return Value::integer(-args[0]);
  if (ap.fn == "*" && args.size() == 2) return Value::integer(args[0] * args[1]);
  throw EvalError("unknown function symbol: " + ap.fn);
}

namespace {

// Equality over uninterpreted atoms (and integers treated as distinct
// constants), with free pairing. Decision by syntactic unification: merge all
// equalities, then check each disequality across classes. Models assign a
// distinct fresh atom to every class not forced equal to a constant.
class EqTheory final : public Theory {
 public:
  std::string name() const override { return "eq"; }

  bool knows(const std::string& pred, size_t arity) const override {
    return arity == 2 && (pred == "=" || pred == "neq");
  }

  TheoryVerdict sat(const std::vector<CTheory>& lits,
                    const std::set<std::string>& avoid_atoms) const override {
    Subst sigma;
    std::vector<std::pair<XTermPtr, XTermPtr>> neqs;
    for (const auto& lit : lits) {
      if (!knows(lit.pred, lit.args.size()))
        throw TheoryError("theory eq cannot interpret literal '" + print(Constraint{lit}) +
                          "'");
      XTermPtr a = sigma.apply(lit.args[0]);
      XTermPtr b = sigma.apply(lit.args[1]);
      if (lit.pred == "=") {
        if (!unify(a, b, sigma)) return {false, {}};
      } else {
        neqs.emplace_back(a, b);
      }
    }
    for (auto& [a, b] : neqs) {
      if (equal(sigma.apply(a), sigma.apply(b))) return {false, {}};
    }

    // Model: leaves of the solved forms get values; unbound variables get
    // distinct fresh atoms, skipping every atom name in sight.
    std::set<Var> vars;
    for (const auto& lit : lits)
      for (const auto& arg : lit.args) collect_free_vars(arg, vars);
    std::set<std::string> avoid = avoid_atoms;
    for (const auto& lit : lits)
      for (const auto& arg : lit.args) collect_atoms(arg, avoid);
    TheoryVerdict out{true, {}};
    std::map<Var, Value> leaf_values;
    size_t counter = 0;
    for (const Var& v : vars)
      out.model[v] = value_of(sigma.apply(mk_xvar(v)), leaf_values, avoid, counter);
    return out;
  }

  CTheory negate(const CTheory& lit) const override {
    if (lit.pred == "=") return CTheory{"neq", lit.args};
    if (lit.pred == "neq") return CTheory{"=", lit.args};
    throw TheoryError("no complement registered for literal '" +
                      print(Constraint{lit}) + "' in theory eq");
  }

  const FunctionalPredicate& fp_lookup(const std::string& fname) const override {
    throw TheoryError("unknown functional predicate '" + fname +
                      "'; theory eq registers none");
  }
  std::vector<std::string> fp_names() const override { return {}; }

  bool eval_lit(const CTheory& lit, const Valuation& v) const override {
    if (!knows(lit.pred, lit.args.size()))
      throw TheoryError("theory eq cannot interpret literal '" + print(Constraint{lit}) +
                        "'");
    bool eq = eval_xterm(lit.args[0], v) == eval_xterm(lit.args[1], v);
    return lit.pred == "=" ? eq : !eq;
  }

  bool pair_disequality_trivial() const override { return false; }

  Value canonical_value(size_t index) const override {
    return Value::atom("a" + std::to_string(index));
  }

 private:
  static void collect_atoms(const XTermPtr& t, std::set<std::string>& out) {
    if (const auto* a = std::get_if<XAtom>(&t->node)) {
      out.insert(a->name);
    } else if (const auto* p = std::get_if<XPair>(&t->node)) {
      collect_atoms(p->first, out);
      collect_atoms(p->second, out);
    } else if (const auto* ap = std::get_if<XApply>(&t->node)) {
      for (const auto& arg : ap->args) collect_atoms(arg, out);
    }
  }

  static bool occurs(const Var& v, const XTermPtr& t) {
    return free_vars(t).count(v) > 0;
  }

  static bool unify(const XTermPtr& a, const XTermPtr& b, Subst& sigma) {
    XTermPtr s = sigma.apply(a), t = sigma.apply(b);
    if (equal(s, t)) return true;
    if (const auto* v = std::get_if<XVar>(&s->node)) {
      if (occurs(v->var, t)) return false;
      sigma.bind(v->var, t);
      return true;
    }
    if (std::get_if<XVar>(&t->node)) return unify(t, s, sigma);
    const auto* p = std::get_if<XPair>(&s->node);
    const auto* q = std::get_if<XPair>(&t->node);
    if (p && q) return unify(p->first, q->first, sigma) && unify(p->second, q->second, sigma);
    if (std::get_if<XApply>(&s->node) || std::get_if<XApply>(&t->node))
      throw TheoryError("theory eq cannot interpret arithmetic term '" + print(s) +
                        "' / '" + print(t) + "'");
    return false;  // distinct constants or constant vs pair
  }

  static Value value_of(const XTermPtr& t, std::map<Var, Value>& leaves,
                        const std::set<std::string>& avoid, size_t& counter) {
    if (const auto* v = std::get_if<XVar>(&t->node)) {
      auto it = leaves.find(v->var);
      if (it != leaves.end()) return it->second;
      std::string name;
      do {
        name = "a" + std::to_string(++counter);
      } while (avoid.count(name));
      Value val = Value::atom(name);
      leaves.emplace(v->var, val);
      return val;
    }
    if (const auto* a = std::get_if<XAtom>(&t->node)) return Value::atom(a->name);
    if (const auto* i = std::get_if<XInt>(&t->node)) return Value::integer(i->value);
    const auto& p = std::get<XPair>(t->node);
    return Value::pair(value_of(p.first, leaves, avoid, counter),
                       value_of(p.second, leaves, avoid, counter));
  }
};

}  // namespace

TheoryPtr make_eq_theory() { return std::make_shared<EqTheory>(); }

}  // namespace rq
