#include <algorithm>
#include <numeric>

#include "rq/print.hpp"
#include "rq/theory.hpp"

namespace rq {

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

/// Σ coeff·var + k over integer variables.
struct Lin {
  std::map<Var, long long> c;
  long long k = 0;

  void add(const Lin& o, long long mult = 1) {
    for (const auto& [v, a] : o.c) {
      long long& slot = c[v];
      slot += mult * a;
      if (slot == 0) c.erase(v);
    }
    k += mult * o.k;
  }
  void scale(long long m) {
    for (auto& [v, a] : c) a *= m;
    k *= m;
  }
  bool ground() const { return c.empty(); }
  long long eval(const Valuation& val) const {
    long long out = k;
    for (const auto& [v, a] : c) out += a * val.at(v).int_value();
    return out;
  }
};

// A row is the constraint lin ≤ 0; an equation is lin = 0.
struct System {
  std::vector<Lin> eqs;
  std::vector<Lin> rows;
};

long long coeff_gcd(const Lin& l) {
  long long g = 0;
  for (const auto& [v, a] : l.c) g = std::gcd(g, std::llabs(a));
  return g;
}

// Divides a row by the gcd of its variable coefficients, flooring the
// constant; exact for integer solutions.
Lin tighten(Lin row) {
  long long g = coeff_gcd(row);
  if (g > 1) {
    for (auto& [v, a] : row.c) a /= g;
    row.k = -floor_div(-row.k, g);
  }
  return row;
}

// Extended gcd: returns g and coefficients with u*a + w*b == g.
long long ext_gcd(long long a, long long b, long long& u, long long& w) {
  if (b == 0) {
    u = a >= 0 ? 1 : -1;
    w = 0;
    return std::llabs(a);
  }
  long long u1, w1;
  long long g = ext_gcd(b, a % b, u1, w1);
  u = w1;
  w = u1 - (a / b) * w1;
  return g;
}

class LiaSolver {
 public:
  // Decides the system; on success fills `model` for every variable of the
  // system (callers add defaults for untouched variables).
  bool solve(System sys, Valuation& model) {
    // Definitions produced by equality elimination, in elimination order;
    // values are reconstructed in reverse.
    std::vector<std::pair<Var, Lin>> defs;
    if (!eliminate_eqs(sys, defs)) return false;
    Valuation m;
    if (!solve_rows(std::move(sys.rows), m)) return false;
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
      for (const auto& [v, a] : it->second.c)
        if (!m.count(v)) m[v] = Value::integer(0);
      m[it->first] = Value::integer(it->second.eval(m));
    }
    model = std::move(m);
    return true;
  }

 private:
  bool eliminate_eqs(System& sys, std::vector<std::pair<Var, Lin>>& defs) {
    while (!sys.eqs.empty()) {
      Lin eq = std::move(sys.eqs.back());
      sys.eqs.pop_back();
      if (eq.ground()) {
        if (eq.k != 0) return false;
        continue;
      }
      long long g = coeff_gcd(eq);
      if (eq.k % g != 0) return false;
      if (g > 1) {
        for (auto& [v, a] : eq.c) a /= g;
        eq.k /= g;
      }
      // Prefer a unit-coefficient variable: solve and substitute directly.
      auto unit = std::find_if(eq.c.begin(), eq.c.end(),
                               [](const auto& p) { return std::llabs(p.second) == 1; });
      if (unit != eq.c.end()) {
        Var v = unit->first;
        long long a = unit->second;  // a*v + rest = 0  =>  v = -rest/a
        Lin rest = eq;
        rest.c.erase(v);
        rest.scale(a == 1 ? -1 : 1);
        substitute(sys, v, rest);
        substitute_defs(defs, v, rest);
        defs.emplace_back(v, rest);
        continue;
      }
      // No unit coefficient: peel two variables off with a Bezout step,
      // introducing fresh parameters; all integer solutions are preserved.
      auto it = eq.c.begin();
      Var v1 = it->first;
      long long a1 = it->second;
      ++it;
      Var v2 = it->first;
      long long a2 = it->second;
      long long u, w;
      long long g2 = ext_gcd(a1, a2, u, w);
      Var t = fresh_var(Sort::X), s = fresh_var(Sort::X);
      Lin def1;  // v1 = u*t + (a2/g2)*s
      def1.c[t] = u;
      def1.c[s] = a2 / g2;
      Lin def2;  // v2 = w*t - (a1/g2)*s
      def2.c[t] = w;
      def2.c[s] = -(a1 / g2);
      Lin rest = eq;  // g2*t + rest(v3..) + k = 0
      rest.c.erase(v1);
      rest.c.erase(v2);
      rest.c[t] = g2;
      substitute(sys, v1, def1);
      substitute(sys, v2, def2);
      substitute_defs(defs, v1, def1);
      substitute_defs(defs, v2, def2);
      defs.emplace_back(v1, def1);
      defs.emplace_back(v2, def2);
      sys.eqs.push_back(std::move(rest));
    }
    return true;
  }

  static void substitute_lin(Lin& l, const Var& v, const Lin& def) {
    auto it = l.c.find(v);
    if (it == l.c.end()) return;
    long long a = it->second;
    l.c.erase(it);
    l.add(def, a);
  }
  static void substitute(System& sys, const Var& v, const Lin& def) {
    for (auto& e : sys.eqs) substitute_lin(e, v, def);
    for (auto& r : sys.rows) substitute_lin(r, v, def);
  }
  static void substitute_defs(std::vector<std::pair<Var, Lin>>& defs, const Var& v,
                              const Lin& def) {
    for (auto& [w, l] : defs) substitute_lin(l, v, def);
  }

  bool solve_rows(std::vector<Lin> rows, Valuation& model) {
    std::vector<Lin> live;
    std::set<Var> vars;
    for (Lin& r : rows) {
      r = tighten(std::move(r));
      if (r.ground()) {
        if (r.k > 0) return false;
        continue;
      }
      for (const auto& [v, a] : r.c) vars.insert(v);
      live.push_back(std::move(r));
    }
    if (vars.empty()) {
      model.clear();
      return true;
    }

    Var v = pick_var(live, vars);
    std::vector<Lin> uppers, lowers, rest;  // uppers: a*v ≤ -rest, a>0
    for (const Lin& r : live) {
      auto it = r.c.find(v);
      if (it == r.c.end())
        rest.push_back(r);
      else if (it->second > 0)
        uppers.push_back(r);
      else
        lowers.push_back(r);
    }

    if (uppers.empty() || lowers.empty()) {
      // v is bounded on one side only: always an integer choice.
      if (!solve_rows(rest, model)) return false;
      assign_in_bounds(v, uppers, lowers, model);
      return true;
    }

    bool exact = true;
    long long amax = 0;
    for (const Lin& u : uppers) amax = std::max(amax, u.c.at(v));
    if (amax > 1) {
      exact = false;
      for (const Lin& l : lowers)
        if (-l.c.at(v) > 1) goto not_exact;
      exact = true;  // all lower coefficients are 1
    }
  not_exact:

    if (exact) {
      std::vector<Lin> proj = rest;
      combine(uppers, lowers, v, 0, proj);
      if (!solve_rows(std::move(proj), model)) return false;
      assign_in_bounds(v, uppers, lowers, model);
      return true;
    }

    // Dark shadow: sufficient for an integer witness.
    {
      std::vector<Lin> dark = rest;
      combine(uppers, lowers, v, /*dark=*/1, dark);
      Valuation m;
      if (solve_rows(std::move(dark), m)) {
        model = std::move(m);
        assign_in_bounds(v, uppers, lowers, model);
        return true;
      }
    }
    // Splinters: any integer solution missed by the dark shadow pins b*v
    // close to some lower bound.
    for (const Lin& l : lowers) {
      long long b = -l.c.at(v);
      long long limit = floor_div(amax * b - amax - b, amax);
      for (long long i = 0; i <= limit; ++i) {
        // b*v = rest_L + i  where rest_L = b*v - row  (row = -b*v + rest_L' ≤ 0)
        Lin eq = l;  // l = -b*v + (l without v) ≤ 0; equality form: l + (-i) == 0
        eq.k -= i;
        System sub;
        sub.eqs.push_back(std::move(eq));
        sub.rows = live;
        Valuation m;
        LiaSolver inner;
        if (inner.solve(std::move(sub), m)) {
          model = std::move(m);
          return true;
        }
      }
    }
    return false;
  }

  static void combine(const std::vector<Lin>& uppers, const std::vector<Lin>& lowers,
                      const Var& v, int dark, std::vector<Lin>& out) {
    for (const Lin& u : uppers) {
      long long a = u.c.at(v);
      for (const Lin& l : lowers) {
        long long b = -l.c.at(v);
        // b*(u - a*v) + a*(l + b*v) ≤ 0, i.e. b*u + a*l with v cancelled.
        Lin comb;
        comb.add(u, b);
        comb.add(l, a);
        comb.c.erase(v);
        if (dark) comb.k += (a - 1) * (b - 1);
        comb = tighten(std::move(comb));
        if (!comb.ground() || comb.k > 0) out.push_back(std::move(comb));
      }
    }
  }

  static void assign_in_bounds(const Var& v, const std::vector<Lin>& uppers,
                               const std::vector<Lin>& lowers, Valuation& model) {
    for (const Lin& r : uppers)
      for (const auto& [w, a] : r.c)
        if (!(w == v) && !model.count(w)) model[w] = Value::integer(0);
    for (const Lin& r : lowers)
      for (const auto& [w, a] : r.c)
        if (!(w == v) && !model.count(w)) model[w] = Value::integer(0);
    bool has_lo = false, has_hi = false;
    long long lo = 0, hi = 0;
    for (const Lin& r : lowers) {  // -b*v + rest ≤ 0  =>  v ≥ rest/b
      long long b = -r.c.at(v);
      Lin rest = r;
      rest.c.erase(v);
      long long bound = ceil_div(rest.eval(model), b);
      lo = has_lo ? std::max(lo, bound) : bound;
      has_lo = true;
    }
    for (const Lin& r : uppers) {  // a*v + rest ≤ 0  =>  v ≤ -rest/a
      long long a = r.c.at(v);
      Lin rest = r;
      rest.c.erase(v);
      long long bound = floor_div(-rest.eval(model), a);
      hi = has_hi ? std::min(hi, bound) : bound;
      has_hi = true;
    }
    long long value = 0;
    if (has_lo && has_hi) {
      if (lo > hi)
        throw std::logic_error("lia: empty integer interval after projection");
      value = std::clamp<long long>(0, lo, hi);
    } else if (has_lo) {
      value = std::max<long long>(0, lo);
    } else if (has_hi) {
      value = std::min<long long>(0, hi);
    }
    model[v] = Value::integer(value);
  }

  static Var pick_var(const std::vector<Lin>& rows, const std::set<Var>& vars) {
    // Cheapest elimination first: one-sided, then exact, then least fill-in.
    Var best = *vars.begin();
    long long best_score = -1;
    for (const Var& v : vars) {
      long long ups = 0, los = 0;
      bool exact = true;
      for (const Lin& r : rows) {
        auto it = r.c.find(v);
        if (it == r.c.end()) continue;
        if (it->second > 0) {
          ++ups;
          if (it->second > 1) exact = false;
        } else {
          ++los;
          if (-it->second > 1) exact = false;
        }
      }
      long long score;
      if (ups == 0 || los == 0)
        score = 0;
      else if (exact)
        score = ups * los;
      else
        score = 1000 + ups * los;
      if (best_score < 0 || score < best_score) {
        best_score = score;
        best = v;
      }
    }
    return best;
  }
};

class LiaTheory final : public Theory {
 public:
  LiaTheory() {
    fps_.push_back({"sum", 2, [](const std::vector<Value>& in) {
                      require_int(in[0]);
                      require_int(in[1]);
                      return Value::integer(in[0].int_value() + in[1].int_value());
                    }});
    fps_.push_back({"times", 2, [](const std::vector<Value>& in) {
                      require_int(in[0]);
                      require_int(in[1]);
                      return Value::integer(in[0].int_value() * in[1].int_value());
                    }});
  }

  std::string name() const override { return "lia"; }

  bool knows(const std::string& pred, size_t arity) const override {
    if (arity == 2)
      return pred == "=" || pred == "neq" || pred == "=<" || pred == "<" ||
             pred == ">=" || pred == ">";
    if (arity == 3) return pred == "sum" || pred == "times";
    return false;
  }

  TheoryVerdict sat(const std::vector<CTheory>& lits,
                    const std::set<std::string>& avoid_atoms) const override {
    (void)avoid_atoms;
    System base;
    std::vector<std::pair<Lin, Lin>> neqs;  // a != b as (a-b, b-a)
    std::set<Var> vars;
    for (const auto& lit : lits) {
      if (!knows(lit.pred, lit.args.size()))
        throw TheoryError("theory lia cannot interpret literal '" +
                          print(Constraint{lit}) + "'");
      for (const auto& a : lit.args) collect_free_vars(a, vars);
      if (!add_lit(lit, base, neqs)) return {false, {}};
    }
    // The base system bounds every disequality branch; an unsatisfiable base
    // prunes the whole case split.
    {
      LiaSolver probe;
      Valuation scratch;
      System copy = base;
      if (!neqs.empty() && !probe.solve(std::move(copy), scratch)) return {false, {}};
    }
    Valuation model;
    if (!solve_split(base, neqs, 0, model)) return {false, {}};
    for (const Var& v : vars)
      if (!model.count(v)) model[v] = Value::integer(0);
    // Keep only the literal variables; parameters from equality elimination
    // are internal.
    Valuation out_model;
    for (const Var& v : vars) out_model[v] = model[v];
    for (const auto& lit : lits) {
      if (!eval_lit(lit, out_model))
        throw std::logic_error("lia: model fails literal " + print(Constraint{lit}));
    }
    return {true, std::move(out_model)};
  }

  CTheory negate(const CTheory& lit) const override {
    static const std::map<std::string, std::string> comp = {
        {"=", "neq"}, {"neq", "="}, {"=<", ">"}, {">", "=<"}, {"<", ">="}, {">=", "<"}};
    auto it = comp.find(lit.pred);
    if (it == comp.end() || lit.args.size() != 2)
      throw TheoryError("no complement registered for literal '" +
                        print(Constraint{lit}) + "' in theory lia");
    return CTheory{it->second, lit.args};
  }

  const FunctionalPredicate& fp_lookup(const std::string& fname) const override {
    for (const auto& fp : fps_)
      if (fp.name == fname) return fp;
    std::string all;
    for (const auto& fp : fps_) all += (all.empty() ? "" : ", ") + fp.name;
    throw TheoryError("unknown functional predicate '" + fname +
                      "'; theory lia registers: " + all);
  }
  std::vector<std::string> fp_names() const override { return {"sum", "times"}; }

  bool eval_lit(const CTheory& lit, const Valuation& v) const override {
    if (!knows(lit.pred, lit.args.size()))
      throw TheoryError("theory lia cannot interpret literal '" +
                        print(Constraint{lit}) + "'");
    if (lit.args.size() == 3) {
      const FunctionalPredicate& fp = fp_lookup(lit.pred);
      std::vector<Value> in{eval_xterm(lit.args[0], v), eval_xterm(lit.args[1], v)};
      return fp.eval(in) == eval_xterm(lit.args[2], v);
    }
    Value a = eval_xterm(lit.args[0], v), b = eval_xterm(lit.args[1], v);
    if (lit.pred == "=") return a == b;
    if (lit.pred == "neq") return !(a == b);
    require_int(a);
    require_int(b);
    long long x = a.int_value(), y = b.int_value();
    if (lit.pred == "=<") return x <= y;
    if (lit.pred == "<") return x < y;
    if (lit.pred == ">=") return x >= y;
    return x > y;
  }

  bool pair_disequality_trivial() const override { return true; }

  Value canonical_value(size_t index) const override {
    (void)index;
    return Value::integer(0);
  }

 private:
  std::vector<FunctionalPredicate> fps_;

  static void require_int(const Value& v) {
    if (!v.is_int())
      throw EvalError("theory lia applied to a non-integer value: " + v.str());
  }

  static Lin linearize(const XTermPtr& t) {
    Lin out;
    if (const auto* v = std::get_if<XVar>(&t->node)) {
      out.c[v->var] = 1;
      return out;
    }
    if (const auto* i = std::get_if<XInt>(&t->node)) {
      out.k = i->value;
      return out;
    }
    if (const auto* ap = std::get_if<XApply>(&t->node)) {
      if (ap->fn == "+" && ap->args.size() == 2) {
        out = linearize(ap->args[0]);
        out.add(linearize(ap->args[1]));
        return out;
      }
      if (ap->fn == "-" && ap->args.size() == 2) {
        out = linearize(ap->args[0]);
        out.add(linearize(ap->args[1]), -1);
        return out;
      }
      if (ap->fn == "-" && ap->args.size() == 1) {
        out = linearize(ap->args[0]);
        out.scale(-1);
        return out;
      }
      if (ap->fn == "*" && ap->args.size() == 2) {
        Lin a = linearize(ap->args[0]);
        Lin b = linearize(ap->args[1]);
        if (!a.ground() && !b.ground())
          throw TheoryError("non-linear term: " + print(t));
        if (a.ground()) std::swap(a, b);
        a.scale(b.k);
        return a;
      }
    }
    throw TheoryError("theory lia cannot interpret term '" + print(t) + "'");
  }

  // Returns false when the literal is ground and already violated.
  bool add_lit(const CTheory& lit, System& sys,
               std::vector<std::pair<Lin, Lin>>& neqs) const {
    if (lit.args.size() == 3) {
      // sum(x,y,n): x+y-n = 0; times(k,x,n): k*x-n = 0 with k constant.
      Lin l;
      if (lit.pred == "sum") {
        l = linearize(lit.args[0]);
        l.add(linearize(lit.args[1]));
        l.add(linearize(lit.args[2]), -1);
      } else {
        Lin k = linearize(lit.args[0]);
        if (!k.ground())
          throw TheoryError("times/3 requires a constant first argument: " +
                            print(Constraint{lit}));
        l = linearize(lit.args[1]);
        l.scale(k.k);
        l.add(linearize(lit.args[2]), -1);
      }
      if (l.ground()) return l.k == 0;
      sys.eqs.push_back(std::move(l));
      return true;
    }
    Lin a = linearize(lit.args[0]);
    Lin b = linearize(lit.args[1]);
    Lin d = a;  // a - b
    d.add(b, -1);
    if (lit.pred == "=") {
      if (d.ground()) return d.k == 0;
      sys.eqs.push_back(std::move(d));
    } else if (lit.pred == "neq") {
      if (d.ground()) return d.k != 0;
      Lin e = b;
      e.add(a, -1);
      neqs.emplace_back(std::move(d), std::move(e));
    } else if (lit.pred == "=<") {
      if (d.ground()) return d.k <= 0;
      sys.rows.push_back(std::move(d));  // a-b ≤ 0
    } else if (lit.pred == "<") {
      d.k += 1;
      if (d.ground()) return d.k <= 0;
      sys.rows.push_back(std::move(d));
    } else if (lit.pred == ">=") {
      Lin e = b;
      e.add(a, -1);
      if (e.ground()) return e.k <= 0;
      sys.rows.push_back(std::move(e));
    } else {  // >
      Lin e = b;
      e.add(a, -1);
      e.k += 1;
      if (e.ground()) return e.k <= 0;
      sys.rows.push_back(std::move(e));
    }
    return true;
  }

  // Case-split on disequalities: a != b becomes a < b or a > b.
  bool solve_split(const System& sys, const std::vector<std::pair<Lin, Lin>>& neqs,
                   size_t idx, Valuation& model) const {
    if (idx == neqs.size()) {
      LiaSolver solver;
      System copy = sys;
      return solver.solve(std::move(copy), model);
    }
    for (int side = 0; side < 2; ++side) {
      System narrowed = sys;
      Lin row = side == 0 ? neqs[idx].first : neqs[idx].second;
      row.k += 1;  // strict
      narrowed.rows.push_back(std::move(row));
      if (neqs.size() - idx >= 3) {
        // Deep splits: prune subtrees whose partial system is already
        // infeasible before recursing.
        LiaSolver probe;
        Valuation scratch;
        System copy = narrowed;
        if (!probe.solve(std::move(copy), scratch)) continue;
      }
      if (solve_split(narrowed, neqs, idx + 1, model)) return true;
    }
    return false;
  }
};

}  // namespace

TheoryPtr make_eq_theory();
TheoryPtr make_lia_theory() { return std::make_shared<LiaTheory>(); }

TheoryPtr make_theory(const std::string& name) {
  if (name == "eq") return make_eq_theory();
  if (name == "lia") return make_lia_theory();
  throw InputError("unknown theory '" + name + "' (available: eq, lia)");
}

std::vector<std::string> theory_names() { return {"eq", "lia"}; }

}  // namespace rq
