#include "rq/driver.hpp"

#include <algorithm>
#include <deque>

#include "rq/oracle.hpp"
#include "rq/print.hpp"

namespace rq {

namespace {

long long budget_for(const ClassifyReport& report, const SolveOptions& opts) {
  if (opts.max_steps >= 0) return opts.max_steps;
  // In-fragment formulas terminate (Theorems on the decidable fragments);
  // outside, a budget turns potential divergence into Unknown.
  return report.fragment == Fragment::Outside ? 100000 : 0;
}

// Folds syntactic theory equalities into a substitution for display:
// representatives prefer constants, then user variables, then generated
// ones, so a binding like Adm = {n2 / N} with n2 = X shows as {X / N}.
Subst display_subst(const std::vector<CTheory>& lits) {
  std::map<Var, XTermPtr> repr;
  auto find = [&](XTermPtr t) {
    while (const XVar* v = as_xvar(t)) {
      auto it = repr.find(v->var);
      if (it == repr.end()) break;
      t = it->second;
    }
    return t;
  };
  auto rank = [](const XTermPtr& t) {
    if (!as_xvar(t)) return 0;          // constant or structured term
    return as_xvar(t)->var.is_fresh() ? 2 : 1;
  };
  for (const auto& lit : lits) {
    if (lit.pred != "=" || lit.args.size() != 2) continue;
    XTermPtr a = find(lit.args[0]);
    XTermPtr b = find(lit.args[1]);
    if (equal(a, b)) continue;
    if (!as_xvar(a) && !as_xvar(b)) continue;
    if (rank(a) < rank(b)) std::swap(a, b);
    if (const XVar* v = as_xvar(a)) {
      if (!free_vars(b).count(v->var)) repr[v->var] = b;
    }
  }
  Subst out;
  for (const auto& [v, t] : repr) out.bind(v, find(t));
  return out;
}

}  // namespace

PreparedQuery prepare(const Program& program, const SolveOptions& opts) {
  PreparedQuery q;
  q.program = program;
  q.theory = make_theory(opts.theory);
  SurFormulaPtr expanded = expand_calls(program.query, program.defs);
  q.expanded = eliminate_neg(expanded, *q.theory);
  Lowered low = lower(q.expanded, *q.theory);
  q.goal = low.goal;
  q.query_vars = low.query_vars;
  q.sort_false = low.sort_false;
  q.sort_clashes = low.sort_clashes;
  if (!q.sort_false) q.classification = classify(q.goal);
  return q;
}

struct SolutionStream::Impl {
  PreparedQuery query;
  Engine engine;
  std::deque<SolverState> stack;
  std::set<std::string> seen_valuations;
  std::set<std::string> avoid_atoms;
  long long budget_branches = 0;
  // The per-branch budget bounds each branch, but a diverging search can
  // still fork faster than branches die; a total-work cap keeps the whole
  // exploration finite. Both zero means unlimited (in-fragment formulas).
  long long total_budget = 0;
  long long total_steps = 0;

  Impl(const PreparedQuery& q, const SolveOptions& opts)
      : query(q),
        engine(EngineConfig{q.theory, budget_for(q.classification, opts), opts.trace}) {
    // Diverging branches grow their states with every step, so the total
    // cap also bounds memory, not just time.
    long long per_branch = budget_for(q.classification, opts);
    if (per_branch > 0)
      total_budget = std::max<long long>(4 * per_branch, 200000);
    if (!q.sort_false) {
      collect_atoms(q.goal);
      stack.push_back(make_state(q.goal));
    }
  }

  void collect_atoms(const FormulaPtr& f) {
    // Atom names already present anywhere in the query; fresh witness atoms
    // must avoid them.
    std::function<void(const XTermPtr&)> walk_x = [&](const XTermPtr& t) {
      if (const auto* a = std::get_if<XAtom>(&t->node)) avoid_atoms.insert(a->name);
      if (const auto* p = std::get_if<XPair>(&t->node)) {
        walk_x(p->first);
        walk_x(p->second);
      }
      if (const auto* ap = std::get_if<XApply>(&t->node))
        for (const auto& arg : ap->args) walk_x(arg);
    };
    std::function<void(const SetTermPtr&)> walk_s = [&](const SetTermPtr& t) {
      if (const auto* c = std::get_if<SCons>(&t->node)) {
        walk_x(c->elem);
        walk_s(c->rest);
      }
    };
    std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
      if (const auto* x = std::get_if<FAnd>(&g->node)) {
        walk(x->lhs);
        walk(x->rhs);
      } else if (const auto* x = std::get_if<FOr>(&g->node)) {
        walk(x->lhs);
        walk(x->rhs);
      } else if (const auto* x = std::get_if<FAtom>(&g->node)) {
        const Constraint& c = x->c;
        if (const auto* e = std::get_if<CEqSet>(&c)) {
          walk_s(e->lhs);
          walk_s(e->rhs);
        } else if (const auto* e = std::get_if<CIn>(&c)) {
          walk_x(e->elem);
          walk_s(e->set);
        } else if (const auto* e = std::get_if<CNin>(&c)) {
          walk_x(e->elem);
          walk_s(e->set);
        } else if (const auto* e = std::get_if<CSubsetRuq>(&c)) {
          walk_s(e->lhs);
          walk_s(e->ris.dom);
          walk(e->ris.filter);
          walk(e->ris.fpreds);
        } else if (const auto* e = std::get_if<CTheory>(&c)) {
          for (const auto& a : e->args) walk_x(a);
        } else if (const auto* e = std::get_if<CRq>(&c)) {
          walk_s(e->dom);
          walk(e->filter);
          walk(e->fpreds);
        }
      }
    };
    walk(f);
  }

  // --- valuation construction ------------------------------------------------

  struct AnswerCtx {
    const SolverState& st;
    const Valuation& model;
    std::map<Var, SetTermPtr> residual_eqs;  // irreducible A = t equations
    Valuation memo;
    size_t canon = 0;
  };

  Value value_of_x(const XTermPtr& t, AnswerCtx& ctx);
  Value value_of_set_var(const Var& v, AnswerCtx& ctx);

  Value value_of_set(const SetTermPtr& t, AnswerCtx& ctx) {
    if (std::holds_alternative<SEmpty>(t->node)) return Value::set({});
    if (const auto* v = std::get_if<SVar>(&t->node)) return value_of_set_var(v->var, ctx);
    const auto& c = std::get<SCons>(t->node);
    Value rest = value_of_set(c.rest, ctx);
    std::vector<Value> elems = rest.set_elems();
    elems.push_back(value_of_x(c.elem, ctx));
    return Value::set(std::move(elems));
  }

  Answer build_answer(const SolverState& st, const Valuation& model) {
    Answer ans;
    ans.bindings = st.bindings;
    ans.theory_model = model;

    // Display form: map generated element variables to their theory-equal
    // representatives before printing.
    Subst disp = display_subst(st.x_lits);
    for (const auto& lit : st.x_lits) {
      CTheory shown = std::get<CTheory>(disp.apply(Constraint{lit}));
      if (shown.pred == "=" && shown.args.size() == 2 &&
          equal(shown.args[0], shown.args[1]))
        continue;  // folded into the displayed bindings
      ans.x_residue.push_back(std::move(shown));
    }
    ans.irreducible_s.clear();
    for (const auto& [v, t] : st.bindings.set_bindings())
      ans.irreducible_s.push_back(disp.apply(Constraint{CEqSet{mk_svar(v), t}}));
    for (const auto& c : st.set_cs) ans.irreducible_s.push_back(disp.apply(c));

    AnswerCtx ctx{st, model, {}, model, 0};
    for (const auto& c : st.set_cs) {
      const auto* eq = std::get_if<CEqSet>(&c);
      if (!eq) continue;
      if (const SVar* v = as_svar(eq->lhs)) ctx.residual_eqs.emplace(v->var, eq->rhs);
    }

    // Concrete valuation for the query variables.
    for (const auto& [key, var] : query.query_vars) {
      if (var.sort == Sort::Set) {
        ans.valuation[var] = value_of_set_var(var, ctx);
      } else {
        ans.valuation[var] = value_of_x(mk_xvar(var), ctx);
      }
    }

    // Query-variable display bindings (solved substitution plus residual
    // solved equations).
    for (const auto& [key, var] : query.query_vars) {
      if (var.sort == Sort::Set) {
        const SetTermPtr* b = st.bindings.lookup_set(var);
        if (!b) {
          auto it = ctx.residual_eqs.find(var);
          if (it != ctx.residual_eqs.end())
            ans.display_bindings.emplace_back(var,
                                              print(disp.apply(SetTermPtr{it->second})));
          continue;
        }
        ans.display_bindings.emplace_back(var, print(disp.apply(*b)));
      } else {
        XTermPtr x = mk_xvar(var);
        XTermPtr shown = disp.apply(st.bindings.apply(x));
        if (!equal(shown, x)) ans.display_bindings.emplace_back(var, print(shown));
      }
    }
    return ans;
  }

  std::optional<Answer> next() {
    while (!stack.empty()) {
      if (total_budget > 0 && total_steps > total_budget) {
        budget_branches += static_cast<long long>(stack.size());
        stack.clear();
        break;
      }
      SolverState st = std::move(stack.back());
      stack.pop_back();
      long long before = st.steps;
      std::vector<SolverState> alts;
      engine.quiesce(st, alts);
      total_steps += st.steps - before;
      // Alternatives are explored left to right: push them in reverse.
      for (auto it = alts.rbegin(); it != alts.rend(); ++it)
        stack.push_back(std::move(*it));
      // A diverging search can fork faster than branches die; shedding the
      // oldest alternatives bounds the live frontier (they count as budget
      // casualties, so the verdict can only degrade to unknown).
      if (total_budget > 0) {
        while (stack.size() > 10000) {
          stack.pop_front();
          ++budget_branches;
        }
      }
      if (st.budget_hit) {
        ++budget_branches;
        continue;
      }
      if (st.failed) continue;
      TheoryVerdict tv = query.theory->sat(st.x_lits, avoid_atoms);
      if (!tv.sat) continue;
      Answer ans = build_answer(st, tv.model);
      std::string fingerprint;
      for (const auto& [v, val] : ans.valuation)
        fingerprint += print(v) + "=" + val.str() + ";";
      if (!seen_valuations.insert(fingerprint).second) continue;
      return ans;
    }
    return std::nullopt;
  }
};

Value SolutionStream::Impl::value_of_x(const XTermPtr& t, AnswerCtx& ctx) {
  if (const auto* v = std::get_if<XVar>(&t->node)) {
    auto it = ctx.memo.find(v->var);
    if (it != ctx.memo.end()) return it->second;
    if (const XTermPtr* b = ctx.st.bindings.lookup_x(v->var)) {
      Value val = value_of_x(*b, ctx);
      ctx.memo[v->var] = val;
      return val;
    }
    // Absent from both bindings and model: canonical fresh atom / 0.
    Value val = query.theory->canonical_value(ctx.canon++);
    while (val.is_atom() && avoid_atoms.count(val.atom_name()))
      val = query.theory->canonical_value(ctx.canon++);
    ctx.memo[v->var] = val;
    return val;
  }
  if (const auto* a = std::get_if<XAtom>(&t->node)) return Value::atom(a->name);
  if (const auto* i = std::get_if<XInt>(&t->node)) return Value::integer(i->value);
  if (const auto* p = std::get_if<XPair>(&t->node))
    return Value::pair(value_of_x(p->first, ctx), value_of_x(p->second, ctx));
  Valuation env = ctx.memo;
  for (const Var& v : free_vars(t))
    if (!env.count(v)) env[v] = value_of_x(mk_xvar(v), ctx);
  return eval_xterm(t, env);
}

Value SolutionStream::Impl::value_of_set_var(const Var& v, AnswerCtx& ctx) {
  auto it = ctx.memo.find(v);
  if (it != ctx.memo.end()) return it->second;
  const SetTermPtr* b = ctx.st.bindings.lookup_set(v);
  if (!b) {
    auto eq = ctx.residual_eqs.find(v);
    if (eq != ctx.residual_eqs.end()) b = &eq->second;
  }
  if (b) {
    Value val = value_of_set(*b, ctx);
    ctx.memo[v] = val;
    return val;
  }
  // Unbound set variables (including irreducible RUQ domains) map to {}.
  ctx.memo[v] = Value::set({});
  return ctx.memo[v];
}

SolutionStream::SolutionStream(const PreparedQuery& q, const SolveOptions& opts)
    : impl_(std::make_unique<Impl>(q, opts)) {}
SolutionStream::~SolutionStream() = default;
SolutionStream::SolutionStream(SolutionStream&&) noexcept = default;

std::optional<Answer> SolutionStream::next() { return impl_->next(); }
long long SolutionStream::budget_branches() const { return impl_->budget_branches; }

Verdict sat_rq(const PreparedQuery& q, const SolveOptions& opts, size_t max_answers) {
  Verdict out;
  if (max_answers == 0) max_answers = 1;  // a verdict needs at least one probe
  SolutionStream stream(q, opts);
  while (out.answers.size() < max_answers) {
    std::optional<Answer> a = stream.next();
    if (!a) break;
    out.answers.push_back(std::move(*a));
  }
  out.budget_branches = stream.budget_branches();
  if (!out.answers.empty()) {
    out.status = Status::Sat;
  } else if (out.budget_branches > 0) {
    out.status = Status::Unknown;
    out.unknown_reason = "step budget exhausted on " +
                         std::to_string(out.budget_branches) + " branch(es)";
  } else {
    out.status = Status::Unsat;
  }
  return out;
}

Verdict solve_program(const Program& program, const SolveOptions& opts,
                      size_t max_answers) {
  PreparedQuery q = prepare(program, opts);
  return sat_rq(q, opts, max_answers);
}

ProveResult prove(const Program& program, const SolveOptions& opts) {
  ProveResult out;
  out.verdict = solve_program(program, opts, 1);
  switch (out.verdict.status) {
    case Status::Unsat: out.status = ProveStatus::Proved; break;
    case Status::Sat:
      out.status = ProveStatus::Counterexample;
      out.witness = out.verdict.answers.front();
      break;
    default: out.status = ProveStatus::Unknown; break;
  }
  return out;
}

}  // namespace rq
