// Randomized soak harness for long differential runs beyond the acceptance
// suite's pinned corpora. Not wired into ctest; run manually:
//   soak diff    <count> <seed>   in-fragment differential vs the oracle
//   soak outside <count> <seed>   budget safety on arbitrary mixed formulas
//   soak enum    <count> <seed>   exhaustive enumeration vs the oracle
//   soak pairs   <count> <seed>   pair control terms and extended forms

#include <iostream>
#include <random>
#include <sstream>

#include "rq/driver.hpp"
#include "rq/oracle.hpp"
#include "rq/parse.hpp"
#include "rq/print.hpp"
#include "rq/rewrite.hpp"

using namespace rq;

namespace {

struct Gen {
  std::mt19937 rng;
  bool lia = true;
  bool pairs = false;
  int ctrl_counter = 0;
  std::vector<std::string> set_vars_used;

  explicit Gen(unsigned seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  SurTermPtr var(const std::string& n) { return mk_sur_term({UVar{n, std::nullopt}, {}}); }
  SurTermPtr constant() {
    if (lia) return mk_sur_term({UInt{pick(5) - 2}, {}});
    return mk_sur_term({UAtom{std::string(1, 'a' + pick(3))}, {}});
  }
  SurTermPtr pair_const() {
    return mk_sur_term({UPair{constant(), constant()}, {}});
  }

  std::string set_var() {
    if (!set_vars_used.empty() && (set_vars_used.size() >= 2 || pick(2)))
      return set_vars_used[pick(static_cast<int>(set_vars_used.size()))];
    std::string name = set_vars_used.empty() ? "S1" : "S2";
    if (std::find(set_vars_used.begin(), set_vars_used.end(), name) ==
        set_vars_used.end())
      set_vars_used.push_back(name);
    return name;
  }

  SurTermPtr domain() {
    switch (pick(4)) {
      case 0: {
        UExt e;
        int n = 1 + pick(3);
        for (int i = 0; i < n; ++i)
          e.elems.push_back(pairs ? pair_const() : constant());
        return mk_sur_term({std::move(e), {}});
      }
      case 1: {
        UExt e;
        int n = 1 + pick(2);
        for (int i = 0; i < n; ++i)
          e.elems.push_back(pairs ? pair_const() : constant());
        e.tail = var(set_var());
        return mk_sur_term({std::move(e), {}});
      }
      case 2: return var(set_var());
      default: return mk_sur_term({UEmpty{}, {}});
    }
  }

  SurTermPtr operand(const std::vector<std::string>& scope) {
    int c = pick(10);
    if (c < 5 && !scope.empty()) return var(scope[pick(static_cast<int>(scope.size()))]);
    if (c < 7) return var("U");
    return constant();
  }

  SurFormulaPtr literal(const std::vector<std::string>& scope) {
    const char* ops_eq[] = {"=", "neq"};
    const char* ops_lia[] = {"=", "neq", "=<", "<", ">=", ">"};
    std::string op = lia ? ops_lia[pick(6)] : ops_eq[pick(2)];
    SurTermPtr lhs = scope.empty() ? operand(scope) : var(scope.back());
    SurTermPtr rhs = operand(scope);
    return mk_sur_formula({URel{op, lhs, rhs}, {}});
  }

  // A filter that may branch into further quantifiers under and/or.
  SurFormulaPtr filter(std::vector<std::string> scope, int depth,
                       const std::vector<Quant>& allowed) {
    int c = pick(depth > 0 ? 6 : 3);
    if (c < 3) return literal(scope);
    if (c == 3) {
      SurFormulaPtr a = filter(scope, depth - 1, allowed);
      SurFormulaPtr b = filter(scope, depth - 1, allowed);
      return mk_sur_formula({pick(2) ? SurFormula{UAnd{a, b}, {}}
                                     : SurFormula{UOr{a, b}, {}}});
    }
    // nested quantifier
    URq rq;
    rq.quant = allowed[pick(static_cast<int>(allowed.size()))];
    std::string cname = "C" + std::to_string(++ctrl_counter);
    rq.binder = {var(cname), domain()};
    scope.push_back(cname);
    rq.filter = filter(scope, depth - 1, allowed);
    return mk_sur_formula({std::move(rq), {}});
  }

  SurFormulaPtr rq_formula(const std::vector<Quant>& allowed, int depth) {
    URq rq;
    rq.quant = allowed[pick(static_cast<int>(allowed.size()))];
    std::string cname = "C" + std::to_string(++ctrl_counter);
    rq.binder = {var(cname), domain()};
    rq.filter = filter({cname}, depth, allowed);
    return mk_sur_formula({std::move(rq), {}});
  }

  // Plain set constraints alongside the quantifiers: memberships,
  // non-memberships and extensional equalities exercise the whole rule set.
  SurFormulaPtr set_constraint() {
    switch (pick(4)) {
      case 0: return mk_sur_formula({URel{"in", operand({}), domain()}, {}});
      case 1: return mk_sur_formula({URel{"nin", operand({}), domain()}, {}});
      case 2: return mk_sur_formula({URel{"=", var(set_var()), domain()}, {}});
      default: return mk_sur_formula({URel{"=", domain(), domain()}, {}});
    }
  }

  SurFormulaPtr formula(const std::vector<Quant>& allowed, int depth) {
    set_vars_used.clear();
    ctrl_counter = 0;
    lia = pick(2) == 0;
    SurFormulaPtr out;
    int conjuncts = 1 + pick(2);
    for (int i = 0; i < conjuncts; ++i) {
      SurFormulaPtr part = rq_formula(allowed, depth);
      if (pick(5) == 0) part = mk_sur_formula({UOr{part, literal({})}, {}});
      out = out ? mk_sur_formula({UAnd{out, part}, {}}) : part;
    }
    int extras = pick(3);
    for (int i = 0; i < extras; ++i)
      out = mk_sur_formula({UAnd{out, set_constraint()}, {}});
    return out;
  }

  // Extended pair-control formulas over ground relations.
  SurFormulaPtr pair_formula() {
    lia = true;
    std::ostringstream r;
    r << "{";
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) {
      if (i) r << ",";
      r << "[" << pick(5) - 2 << "," << pick(5) - 2 << "]";
    }
    r << "}";
    const char* cmps[] = {"<", "=<", ">=", ">", "=", "neq"};
    const char* quant = pick(2) ? "foreach" : "exists";
    std::string dom = pick(3) ? r.str() : std::string("R");
    std::string text;
    if (pick(2)) {
      text = std::string(quant) + "([X,Y] in " + dom + ", [N], Z " + cmps[pick(6)] +
             " N, sum(X,Y,N)).";
    } else {
      text = std::string(quant) + "([X,Y] in " + dom + ", X " + cmps[pick(6)] + " Y).";
    }
    return parse_program(text).query;
  }
};

int fail(const std::string& what, const SurFormulaPtr& f) {
  std::cout << "SOAK FAILURE: " << what << "\n  formula: " << print(f) << std::endl;
  return 1;
}

int run_diff(int count, unsigned seed, bool pairs) {
  Gen gen(seed);
  gen.pairs = pairs;
  std::vector<Quant> all = {Quant::Forall, Quant::Exists};
  int done = 0, sat = 0, unsat = 0;
  while (done < count) {
    SurFormulaPtr f =
        pairs ? gen.pair_formula() : gen.formula(all, 2);
    Program prog{{}, f};
    SolveOptions o;
    o.theory = gen.lia ? "lia" : "eq";
    PreparedQuery q;
    try {
      q = prepare(prog, o);
    } catch (const InputError&) {
      continue;
    }
    if (q.sort_false) continue;
    if (q.classification.fragment == Fragment::Outside) continue;
    ++done;
    if (std::getenv("RQSOLVE_SOAK_VERBOSE"))
      std::cout << done << ": [" << o.theory << "] " << print(f) << std::endl;
    Verdict v = sat_rq(q, o, 1);
    if (v.status == Status::Unknown || v.budget_branches > 0)
      return fail("budget hit in-fragment", f);
    Universe u;
    u.include_pairs = pairs;
    if (pairs) u.max_set_card = 2;
    std::vector<Valuation> models;
    try {
      models = enumerate_models(q.goal, u, *q.theory);
    } catch (const EvalError&) {
      --done;
      continue;  // universe too large for this shape
    }
    if (v.status == Status::Sat) {
      ++sat;
      if (!eval(q.goal, v.answers[0].valuation, *q.theory))
        return fail("sat valuation does not evaluate true", f);
      SolverState residue;
      residue.set_cs = v.answers[0].irreducible_s;
      if (!is_irreducible(residue))
        return fail("answer residue is not in irreducible form", f);
    } else {
      ++unsat;
      if (!models.empty()) return fail("unsat but the oracle found a model", f);
    }
  }
  std::cout << "diff ok: " << done << " instances (" << sat << " sat, " << unsat
            << " unsat)" << std::endl;
  return 0;
}

int run_outside(int count, unsigned seed) {
  Gen gen(seed);
  std::vector<Quant> all = {Quant::Forall, Quant::Exists};
  int done = 0, unknown = 0;
  while (done < count) {
    SurFormulaPtr f = gen.formula(all, 2);
    Program prog{{}, f};
    SolveOptions o;
    o.theory = gen.lia ? "lia" : "eq";
    o.max_steps = 300;
    PreparedQuery q;
    try {
      q = prepare(prog, o);
    } catch (const InputError&) {
      continue;
    }
    if (q.sort_false) continue;
    if (q.classification.fragment != Fragment::Outside) continue;
    ++done;
    Verdict v = sat_rq(q, o, 1);
    Universe u;
    std::vector<Valuation> models;
    try {
      models = enumerate_models(q.goal, u, *q.theory);
    } catch (const EvalError&) {
      --done;
      continue;
    }
    if (v.status == Status::Sat) {
      if (!eval(q.goal, v.answers[0].valuation, *q.theory))
        return fail("outside: sat valuation does not evaluate true", f);
    } else if (v.status == Status::Unsat) {
      if (!models.empty())
        return fail("outside: unsat but the oracle found a model", f);
    } else {
      ++unknown;
    }
  }
  std::cout << "outside ok: " << done << " instances (" << unknown << " unknown)"
            << std::endl;
  return 0;
}

int run_enum(int count, unsigned seed) {
  std::mt19937 rng(seed);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  TheoryPtr lia = make_theory("lia");
  for (int iter = 0; iter < count; ++iter) {
    std::ostringstream text;
    int nvars = 1 + pick(2);
    for (int v = 0; v < nvars; ++v) {
      if (v) text << " & ";
      char name = static_cast<char>('X' + v);
      int k = 1 + pick(3);
      text << name << " in {";
      for (int i = 0; i < k; ++i) {
        if (i) text << ",";
        text << pick(7) - 3;
      }
      text << "}";
    }
    const char* ops[] = {"=", "neq", "=<", "<"};
    if (nvars == 2 && pick(2)) text << " & X " << ops[pick(4)] << " Y";
    // ground quantifier over a ground domain keeps the query finite-solution
    if (pick(3) == 0) text << " & foreach(C in {0,1}, C < X + 3)";
    text << ".";
    SolveOptions opts;
    PreparedQuery q = prepare(parse_program(text.str()), opts);
    Verdict v = sat_rq(q, opts, 100000);
    Universe u;
    std::vector<Valuation> models = enumerate_models(q.goal, u, *lia);
    std::set<std::string> got, want;
    for (const Answer& a : v.answers) {
      std::string key;
      for (const auto& [var, val] : a.valuation) key += val.str() + ";";
      got.insert(key);
    }
    for (const Valuation& m : models) {
      std::string key;
      for (const auto& [var, val] : m) key += val.str() + ";";
      want.insert(key);
    }
    if (got != want) {
      std::cout << "SOAK FAILURE: enumeration mismatch on " << text.str() << "\n  got "
                << got.size() << " want " << want.size() << std::endl;
      return 1;
    }
  }
  std::cout << "enum ok: " << count << " instances" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: soak diff|outside|enum|pairs <count> <seed>" << std::endl;
    return 2;
  }
  std::string kind = argv[1];
  int count = std::atoi(argv[2]);
  unsigned seed = static_cast<unsigned>(std::strtoul(argv[3], nullptr, 10));
  if (kind == "diff") return run_diff(count, seed, false);
  if (kind == "pairs") return run_diff(count, seed, true);
  if (kind == "outside") return run_outside(count, seed);
  if (kind == "enum") return run_enum(count, seed);
  std::cerr << "unknown soak kind " << kind << std::endl;
  return 2;
}
