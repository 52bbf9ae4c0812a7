#include "rq/rewrite.hpp"

#include "rq/print.hpp"

namespace rq {

namespace {

// Control-term match against an element: direct bindings where the shapes
// agree, fresh-skeleton equations where a variable meets a pair pattern,
// failure on a structural mismatch.
struct CtrlMatch {
  bool failed = false;
  Subst binding;
  std::vector<FormulaPtr> side_eqs;
};

void match_ctrl(const CtrlTerm& ctrl, const XTermPtr& elem, CtrlMatch& out) {
  if (out.failed) return;
  if (const Var* v = std::get_if<Var>(&ctrl.node)) {
    out.binding.bind(*v, elem);
    return;
  }
  const auto& p = std::get<std::shared_ptr<const CtrlPair>>(ctrl.node);
  if (const auto* pr = std::get_if<XPair>(&elem->node)) {
    match_ctrl(p->first, pr->first, out);
    match_ctrl(p->second, pr->second, out);
    return;
  }
  if (as_xvar(elem)) {
    // v must be a pair: bind the control variables to a fresh skeleton and
    // delegate the pair equation.
    CtrlMatch skel;
    XTermPtr skeleton = [&]() {
      // Build fresh variables following the control-term shape.
      std::function<XTermPtr(const CtrlTerm&)> build = [&](const CtrlTerm& c) -> XTermPtr {
        if (const Var* cv = std::get_if<Var>(&c.node)) {
          Var n = fresh_var(Sort::X);
          skel.binding.bind(*cv, mk_xvar(n));
          return mk_xvar(n);
        }
        const auto& cp = std::get<std::shared_ptr<const CtrlPair>>(c.node);
        XTermPtr a = build(cp->first);
        XTermPtr b = build(cp->second);
        return mk_pair(a, b);
      };
      return build(ctrl);
    }();
    for (const auto& [v2, t] : skel.binding.x_bindings()) out.binding.bind(v2, t);
    out.side_eqs.push_back(mk_atom(CTheory{"=", {elem, skeleton}}));
    return;
  }
  // Atom, integer or arithmetic term can never be a pair.
  out.failed = true;
}

// Instance of a RIS body at one element: side equations, then the renamed
// functional predicates, then the filter (fresh locals per element).
FormulaPtr instantiate(const CtrlTerm& ctrl, const std::vector<Var>& locals,
                       const FormulaPtr& filter, const FormulaPtr& fpreds,
                       const XTermPtr& elem) {
  CtrlMatch m;
  match_ctrl(ctrl, elem, m);
  if (m.failed) return mk_false();
  for (const Var& l : locals) m.binding.bind(l, mk_xvar(fresh_var(Sort::X)));
  FormulaPtr body = mk_and(m.binding.apply(fpreds), m.binding.apply(filter));
  for (auto it = m.side_eqs.rbegin(); it != m.side_eqs.rend(); ++it)
    body = mk_and(*it, body);
  return body;
}

}  // namespace

FormulaPtr desugar_rq(const CRq& rq) {
  if (rq.quant == Quant::Forall) {
    RisTerm ris{rq.ctrl, rq.dom, rq.locals, rq.filter, rq.fpreds};
    return mk_atom(CSubsetRuq{rq.dom, std::move(ris)});
  }
  // exists(x in A, phi): n in A and psi(n) and phi(n), all witnesses fresh.
  Subst renaming;
  std::function<XTermPtr(const CtrlTerm&)> build = [&](const CtrlTerm& c) -> XTermPtr {
    if (const Var* v = std::get_if<Var>(&c.node)) {
      Var n = fresh_var(Sort::X);
      renaming.bind(*v, mk_xvar(n));
      return mk_xvar(n);
    }
    const auto& p = std::get<std::shared_ptr<const CtrlPair>>(c.node);
    XTermPtr a = build(p->first);
    XTermPtr b = build(p->second);
    return mk_pair(a, b);
  };
  XTermPtr witness = build(rq.ctrl);
  for (const Var& l : rq.locals) renaming.bind(l, mk_xvar(fresh_var(Sort::X)));
  FormulaPtr body = mk_and(renaming.apply(rq.fpreds), renaming.apply(rq.filter));
  return mk_and(mk_atom(CIn{witness, rq.dom}), body);
}

SolverState make_state(const FormulaPtr& goal) {
  SolverState st;
  st.pending.push_back(goal);
  return st;
}

void Engine::trace(const std::string& rule, const std::string& before,
                   const std::string& after) const {
  if (cfg_.trace) cfg_.trace({rule, before, after});
}

namespace {

// Unique-node count of the live state (pointer-identity visited sets, so
// shared structure is counted once). A proxy for memory.
class SizeCounter {
 public:
  size_t total = 0;
  void count(const XTermPtr& t) {
    if (!t || !xseen_.insert(t.get()).second) return;
    ++total;
    if (const auto* p = std::get_if<XPair>(&t->node)) {
      count(p->first);
      count(p->second);
    } else if (const auto* a = std::get_if<XApply>(&t->node)) {
      for (const auto& arg : a->args) count(arg);
    }
  }
  void count(const SetTermPtr& t) {
    if (!t || !sseen_.insert(t.get()).second) return;
    ++total;
    if (const auto* c = std::get_if<SCons>(&t->node)) {
      count(c->elem);
      count(c->rest);
    }
  }
  void count(const FormulaPtr& f) {
    if (!f || !fseen_.insert(f.get()).second) return;
    ++total;
    if (const auto* x = std::get_if<FAnd>(&f->node)) {
      count(x->lhs);
      count(x->rhs);
    } else if (const auto* x = std::get_if<FOr>(&f->node)) {
      count(x->lhs);
      count(x->rhs);
    } else if (const auto* x = std::get_if<FAtom>(&f->node)) {
      count(x->c);
    }
  }
  void count(const Constraint& c) {
    ++total;
    if (const auto* e = std::get_if<CEqSet>(&c)) {
      count(e->lhs);
      count(e->rhs);
    } else if (const auto* e = std::get_if<CIn>(&c)) {
      count(e->elem);
      count(e->set);
    } else if (const auto* e = std::get_if<CNin>(&c)) {
      count(e->elem);
      count(e->set);
    } else if (const auto* e = std::get_if<CSubsetRuq>(&c)) {
      count(e->lhs);
      count(e->ris.dom);
      count(e->ris.filter);
      count(e->ris.fpreds);
    } else if (const auto* e = std::get_if<CTheory>(&c)) {
      for (const auto& a : e->args) count(a);
    } else if (const auto* e = std::get_if<CRq>(&c)) {
      count(e->dom);
      count(e->filter);
      count(e->fpreds);
    }
  }

 private:
  std::set<const XTerm*> xseen_;
  std::set<const SetTerm*> sseen_;
  std::set<const Formula*> fseen_;
};

size_t state_size(const SolverState& st) {
  SizeCounter sc;
  for (const auto& c : st.set_cs) sc.count(c);
  for (const auto& l : st.x_lits) sc.count(Constraint{l});
  for (const auto& f : st.pending) sc.count(f);
  for (const auto& [v, t] : st.bindings.set_bindings()) sc.count(t);
  for (const auto& [v, t] : st.bindings.x_bindings()) sc.count(t);
  return sc.total;
}

constexpr size_t kStateSizeCap = 200000;

}  // namespace

bool Engine::count_step(SolverState& st) const {
  ++st.steps;
  if (cfg_.max_steps > 0) {
    if (st.steps > cfg_.max_steps) {
      st.budget_hit = true;
      return false;
    }
    // Diverging branches also grow without bound; treat an oversized state
    // like an exhausted budget so budgeted searches stay within memory.
    if ((st.steps & 127) == 0 && state_size(st) > kStateSizeCap) {
      st.budget_hit = true;
      return false;
    }
  }
  return true;
}

void Engine::quiesce(SolverState& st, std::vector<SolverState>& alternatives) const {
  for (;;) {
    if (st.failed || st.budget_hit) return;
    if (!st.pending.empty()) {
      decompose_one(st, &alternatives);
      continue;
    }
    if (st.x_dirty) {
      normalize_x(st);
      continue;
    }
    if (fire_one_rule(st)) continue;
    return;
  }
}

SolverState Engine::step(SolverState st) const {
  for (;;) {
    if (st.failed || st.budget_hit) return st;
    if (!st.pending.empty()) {
      decompose_one(st, nullptr);  // deterministic: first alternative only
      continue;
    }
    if (st.x_dirty) {
      normalize_x(st);
      continue;
    }
    if (fire_one_rule(st)) continue;
    return st;
  }
}

bool Engine::decompose_one(SolverState& st, std::vector<SolverState>* alternatives) const {
  FormulaPtr f = st.pending.front();
  st.pending.pop_front();
  if (is_true(f)) return true;
  if (is_false(f)) {
    st.failed = true;
    return true;
  }
  if (const auto* x = std::get_if<FAnd>(&f->node)) {
    st.pending.push_front(x->rhs);
    st.pending.push_front(x->lhs);
    return true;
  }
  if (const auto* x = std::get_if<FOr>(&f->node)) {
    // Def. 12: non-deterministic choice, explored left to right.
    if (alternatives) {
      SolverState right = st;
      right.pending.push_front(x->rhs);
      alternatives->push_back(std::move(right));
    }
    st.pending.push_front(x->lhs);
    return true;
  }
  route_constraint(st, std::get<FAtom>(f->node).c);
  return true;
}

void Engine::route_constraint(SolverState& st, Constraint c) const {
  if (const auto* rq = std::get_if<CRq>(&c)) {
    st.pending.push_front(desugar_rq(*rq));
    return;
  }
  if (const auto* lit = std::get_if<CTheory>(&c)) {
    route_theory_lit(st, *lit);
    return;
  }
  // Conjunction is idempotent; duplicate copies of a constraint only fuel
  // redundant unification branches.
  for (const auto& existing : st.set_cs)
    if (equal(existing, c)) return;
  st.set_cs.push_back(std::move(c));
}

// Structural layer over the theory: ordered pairs are free constructors, so
// pair equalities decompose, a variable facing a pair is bound, and
// mismatched constructors fail, independently of the plugged-in theory.
void Engine::route_theory_lit(SolverState& st, const CTheory& lit) const {
  if (lit.args.size() == 2 && (lit.pred == "=" || lit.pred == "neq")) {
    const XTermPtr& a = lit.args[0];
    const XTermPtr& b = lit.args[1];
    // Ground constants decide immediately: constants are distinct values in
    // every bundled theory, and dead branches should die before they breed
    // set-unification churn.
    const bool a_const = std::holds_alternative<XAtom>(a->node) ||
                         std::holds_alternative<XInt>(a->node);
    const bool b_const = std::holds_alternative<XAtom>(b->node) ||
                         std::holds_alternative<XInt>(b->node);
    if (a_const && b_const) {
      bool same = equal(a, b);
      if (same != (lit.pred == "=")) st.failed = true;
      return;
    }
    if (equal(a, b)) {  // identical terms: reflexivity
      if (lit.pred == "neq") st.failed = true;
      return;
    }
    const auto* pa = std::get_if<XPair>(&a->node);
    const auto* pb = std::get_if<XPair>(&b->node);
    bool scalar_a = !pa && !as_xvar(a);
    bool scalar_b = !pb && !as_xvar(b);
    if (lit.pred == "=") {
      if (pa && pb) {
        st.pending.push_front(
            mk_and(mk_atom(CTheory{"=", {pa->first, pb->first}}),
                   mk_atom(CTheory{"=", {pa->second, pb->second}})));
        return;
      }
      if ((pa && scalar_b) || (pb && scalar_a)) {
        st.failed = true;
        return;
      }
      if (pa || pb) {  // variable meets pair: bind it (occurs check first)
        const XTermPtr& var_side = pa ? b : a;
        const XTermPtr& pair_side = pa ? a : b;
        const Var v = as_xvar(var_side)->var;
        if (free_vars(pair_side).count(v)) {
          st.failed = true;
          return;
        }
        apply_binding(st, v, pair_side);
        return;
      }
    } else {  // neq
      if (pa && pb) {
        st.pending.push_front(
            mk_or(mk_atom(CTheory{"neq", {pa->first, pb->first}}),
                  mk_atom(CTheory{"neq", {pa->second, pb->second}})));
        return;
      }
      if ((pa && scalar_b) || (pb && scalar_a)) return;  // trivially true
      if ((pa || pb) && cfg_.theory->pair_disequality_trivial())
        return;  // integer-valued variables never equal a pair
    }
  }
  st.x_lits.push_back(lit);
}

void Engine::normalize_x(SolverState& st) const {
  st.x_dirty = false;
  std::vector<CTheory> lits;
  lits.swap(st.x_lits);
  for (const auto& lit : lits) {
    if (st.failed) return;
    route_theory_lit(st, lit);
  }
}

namespace {

// Rules that split into alternatives: membership over an extension and the
// set-unification cases. Everything else is deterministic propagation.
bool is_branching(const Constraint& c) {
  if (const auto* in = std::get_if<CIn>(&c)) return as_scons(in->set) != nullptr;
  if (const auto* eq = std::get_if<CEqSet>(&c))
    return as_scons(eq->lhs) != nullptr && as_scons(eq->rhs) != nullptr;
  return false;
}

}  // namespace

bool Engine::fire_one_rule(SolverState& st) const {
  // Deterministic rules first (leftmost), then the leftmost disjunctive
  // rule: substitutions and orientation collapse equal sets before the
  // unification split can multiply branches.
  for (int branching = 0; branching < 2; ++branching) {
    for (size_t i = 0; i < st.set_cs.size(); ++i) {
      const Constraint& c = st.set_cs[i];
      if (is_branching(c) != static_cast<bool>(branching)) continue;
      if (std::holds_alternative<CSubsetRuq>(c)) {
        if (try_subset(st, i)) return true;
      } else if (std::holds_alternative<CIn>(c) || std::holds_alternative<CNin>(c)) {
        if (try_membership(st, i)) return true;
      } else if (std::holds_alternative<CEqSet>(c)) {
        if (try_equality(st, i)) return true;
      }
    }
  }
  return false;
}

bool Engine::try_subset(SolverState& st, size_t idx) const {
  const auto& c = std::get<CSubsetRuq>(st.set_cs[idx]);
  std::string before = print(st.set_cs[idx]);
  if (is_empty(c.lhs)) {  // rule (1)
    if (!count_step(st)) return false;
    trace("1", before, "true");
    st.set_cs.erase(st.set_cs.begin() + idx);
    return true;
  }
  if (const SCons* cons = as_scons(c.lhs)) {  // rule (2)
    if (!count_step(st)) return false;
    // Iterate: prove the filter at the first element, recur on the rest.
    // Control variables bound to a fresh set-variable twin mark the
    // quantified-variable-as-domain feature, which needs set-valued
    // elements; those are outside this solver's term language.
    for (const Var& cv : ctrl_vars(c.ris.ctrl)) {
      Var twin{cv.name, cv.fresh_id, Sort::Set};
      std::set<Var> fv = free_vars(c.ris.filter);
      if (fv.count(twin))
        throw InputError(
            "cannot iterate a quantifier whose control variable is used as an "
            "inner domain (set-valued elements are not supported)");
    }
    FormulaPtr instance =
        instantiate(c.ris.ctrl, c.ris.locals, c.ris.filter, c.ris.fpreds, cons->elem);
    RisTerm rest_ris{c.ris.ctrl, cons->rest, c.ris.locals, c.ris.filter, c.ris.fpreds};
    Constraint residual = CSubsetRuq{cons->rest, std::move(rest_ris)};
    FormulaPtr result = mk_and(instance, mk_atom(residual));
    trace("2", before, print(result));
    st.set_cs.erase(st.set_cs.begin() + idx);
    st.pending.push_front(result);
    return true;
  }
  return false;  // rule (3): variable domain, irreducible
}

bool Engine::try_membership(SolverState& st, size_t idx) const {
  std::string before = print(st.set_cs[idx]);
  if (const auto* in = std::get_if<CIn>(&st.set_cs[idx])) {
    if (is_empty(in->set)) {  // rule (4)
      if (!count_step(st)) return false;
      trace("4", before, "false");
      st.failed = true;
      return true;
    }
    if (const SCons* cons = as_scons(in->set)) {  // rule (5)
      if (!count_step(st)) return false;
      FormulaPtr result = mk_or(mk_atom(CTheory{"=", {in->elem, cons->elem}}),
                                mk_atom(CIn{in->elem, cons->rest}));
      trace("5", before, print(result));
      st.set_cs.erase(st.set_cs.begin() + idx);
      st.pending.push_front(result);
      return true;
    }
    // rule (6): a in A' rewrites to A' = {a / N}
    if (!count_step(st)) return false;
    SetTermPtr n = mk_svar(fresh_var(Sort::Set));
    FormulaPtr result = mk_atom(CEqSet{in->set, mk_cons(in->elem, n)});
    trace("6", before, print(result));
    st.set_cs.erase(st.set_cs.begin() + idx);
    st.pending.push_front(result);
    return true;
  }
  const auto& nin = std::get<CNin>(st.set_cs[idx]);
  if (is_empty(nin.set)) {
    if (!count_step(st)) return false;
    trace("nin1", before, "true");
    st.set_cs.erase(st.set_cs.begin() + idx);
    return true;
  }
  if (const SCons* cons = as_scons(nin.set)) {
    if (!count_step(st)) return false;
    FormulaPtr result = mk_and(mk_atom(CTheory{"neq", {nin.elem, cons->elem}}),
                               mk_atom(CNin{nin.elem, cons->rest}));
    trace("nin2", before, print(result));
    st.set_cs.erase(st.set_cs.begin() + idx);
    st.pending.push_front(result);
    return true;
  }
  return false;  // nin over a variable is irreducible (satisfied by {})
}

bool Engine::try_equality(SolverState& st, size_t idx) const {
  const auto& c = std::get<CEqSet>(st.set_cs[idx]);
  std::string before = print(st.set_cs[idx]);
  const SVar* lv = as_svar(c.lhs);
  const SVar* rv = as_svar(c.rhs);
  bool l_empty = is_empty(c.lhs), r_empty = is_empty(c.rhs);

  if (l_empty && r_empty) {  // rule (7)
    if (!count_step(st)) return false;
    trace("7", before, "true");
    st.set_cs.erase(st.set_cs.begin() + idx);
    return true;
  }
  if (lv && rv && lv->var == rv->var) {  // rule (8)
    if (!count_step(st)) return false;
    trace("8", before, "true");
    st.set_cs.erase(st.set_cs.begin() + idx);
    return true;
  }
  if (equal(c.lhs, c.rhs)) {
    // Reflexivity on identical extensional terms; without it the same-tail
    // split keeps absorbing a tautology into ever fresher tails.
    if (!count_step(st)) return false;
    trace("8e", before, "true");
    st.set_cs.erase(st.set_cs.begin() + idx);
    return true;
  }
  if (!lv && rv) {  // rule (9): orient variable to the left
    if (!count_step(st)) return false;
    Constraint swapped = CEqSet{c.rhs, c.lhs};
    trace("9", before, print(swapped));
    st.set_cs[idx] = std::move(swapped);
    return true;
  }
  if (lv) {
    Var v = lv->var;
    if (occurs_in_tail(v, c.rhs)) {
      // A = {a1..an / A} absorbs its own tail: A = {a1..an / N}.
      if (!count_step(st)) return false;
      ExtParts parts = ext_parts(c.rhs);
      SetTermPtr fresh_tail = mk_svar(fresh_var(Sort::Set));
      Constraint absorbed = CEqSet{c.lhs, mk_ext(parts.elems, fresh_tail)};
      trace("abs", before, print(absorbed));
      st.set_cs[idx] = std::move(absorbed);
      return true;
    }
    if (occurs_elsewhere(st, v, idx)) {  // rule (10): substitute and keep
      if (!count_step(st)) return false;
      SetTermPtr rhs = c.rhs;
      trace("10", before, print(st.set_cs[idx]));
      st.set_cs.erase(st.set_cs.begin() + idx);
      apply_binding(st, v, rhs);
      return true;
    }
    return false;  // rule (14): irreducible solved equation
  }
  // Both sides non-variable extensional terms.
  const SCons* lc = as_scons(c.lhs);
  const SCons* rc = as_scons(c.rhs);
  if (lc && r_empty) {  // rule (11)
    if (!count_step(st)) return false;
    trace("11", before, "false");
    st.failed = true;
    return true;
  }
  if (lc && rc) {
    // Same-tail case first: {t1..tm / X} = {s1..sn / X} regenerates itself
    // through the fourth disjunct forever. With the tail shared, equality is
    // exactly mutual inclusion of the heads, and memberships terminate.
    ExtParts lp = ext_parts(c.lhs);
    ExtParts rp = ext_parts(c.rhs);
    const SVar* lt = as_svar(lp.tail);
    const SVar* rt = as_svar(rp.tail);
    if (lt && rt && lt->var == rt->var) {
      if (!count_step(st)) return false;
      std::vector<FormulaPtr> incl;
      for (const auto& t : lp.elems) incl.push_back(mk_atom(CIn{t, c.rhs}));
      for (const auto& s : rp.elems) incl.push_back(mk_atom(CIn{s, c.lhs}));
      FormulaPtr result = mk_conj(incl);
      trace("12s", before, print(result));
      st.set_cs.erase(st.set_cs.begin() + idx);
      st.pending.push_front(result);
      return true;
    }
    // rule (12): set unification, four-way choice
    if (!count_step(st)) return false;
    XTermPtr a = lc->elem;
    SetTermPtr A = lc->rest;
    XTermPtr b = rc->elem;
    SetTermPtr B = rc->rest;
    FormulaPtr ab = mk_atom(CTheory{"=", {a, b}});
    SetTermPtr n = mk_svar(fresh_var(Sort::Set));
    FormulaPtr d1 = mk_and(ab, mk_atom(CEqSet{A, B}));
    FormulaPtr d2 = mk_and(ab, mk_atom(CEqSet{c.lhs, B}));
    FormulaPtr d3 = mk_and(ab, mk_atom(CEqSet{A, c.rhs}));
    FormulaPtr d4 = mk_and(mk_atom(CEqSet{A, mk_cons(b, n)}),
                           mk_atom(CEqSet{B, mk_cons(a, n)}));
    FormulaPtr result = mk_or(d1, mk_or(d2, mk_or(d3, d4)));
    trace("12", before, print(result));
    st.set_cs.erase(st.set_cs.begin() + idx);
    st.pending.push_front(result);
    return true;
  }
  if (l_empty && rc) {  // rule (13)
    if (!count_step(st)) return false;
    trace("13", before, "false");
    st.failed = true;
    return true;
  }
  return false;
}

void Engine::apply_binding(SolverState& st, const Var& v, const SetTermPtr& t) const {
  st.bindings.bind(v, t);
  Subst one = subst1(v, t);
  for (auto& c : st.set_cs) c = one.apply(c);
  for (auto& l : st.x_lits) l = std::get<CTheory>(one.apply(Constraint{l}));
  for (auto& f : st.pending) f = one.apply(f);
}

void Engine::apply_binding(SolverState& st, const Var& v, const XTermPtr& t) const {
  st.bindings.bind(v, t);
  Subst one = subst1(v, t);
  for (auto& c : st.set_cs) c = one.apply(c);
  for (auto& l : st.x_lits) l = std::get<CTheory>(one.apply(Constraint{l}));
  for (auto& f : st.pending) f = one.apply(f);
  st.x_dirty = true;  // substituted literals may need structural handling
}

bool Engine::occurs_elsewhere(const SolverState& st, const Var& v, size_t skip_idx) const {
  for (size_t i = 0; i < st.set_cs.size(); ++i) {
    if (i == skip_idx) continue;
    if (free_vars(st.set_cs[i]).count(v)) return true;
  }
  for (const auto& l : st.x_lits)
    if (free_vars(Constraint{l}).count(v)) return true;
  for (const auto& f : st.pending)
    if (free_vars(f).count(v)) return true;
  // Solved equations are part of the formula too: a variable inside a
  // binding's range must be substituted there (binding composition rewrites
  // the stored ranges), or the answer would not be in irreducible form.
  for (const auto& [w, t] : st.bindings.set_bindings())
    if (free_vars(t).count(v)) return true;
  for (const auto& [w, t] : st.bindings.x_bindings())
    if (free_vars(t).count(v)) return true;
  return false;
}

bool is_irreducible(const SolverState& st) {
  if (st.failed || !st.pending.empty()) return false;
  for (size_t i = 0; i < st.set_cs.size(); ++i) {
    const Constraint& c = st.set_cs[i];
    if (const auto* e = std::get_if<CSubsetRuq>(&c)) {
      if (!as_svar(e->lhs)) return false;
      continue;
    }
    if (const auto* e = std::get_if<CNin>(&c)) {
      if (!as_svar(e->set)) return false;
      continue;
    }
    if (const auto* e = std::get_if<CEqSet>(&c)) {
      const SVar* lv = as_svar(e->lhs);
      if (!lv) return false;
      if (free_vars(e->rhs).count(lv->var)) return false;
      for (size_t j = 0; j < st.set_cs.size(); ++j)
        if (j != i && free_vars(st.set_cs[j]).count(lv->var)) return false;
      continue;
    }
    return false;
  }
  return true;
}

std::vector<Constraint> irreducible_part(const SolverState& st) {
  std::vector<Constraint> out;
  for (const auto& [v, t] : st.bindings.set_bindings())
    out.push_back(CEqSet{mk_svar(v), t});
  for (const auto& c : st.set_cs) out.push_back(c);
  return out;
}

RuleApplication apply_rule_once(const Constraint& c, const FormulaPtr& context,
                                const TheoryPtr& theory) {
  EngineConfig cfg;
  cfg.theory = theory;
  std::vector<TraceEntry> log;
  cfg.trace = [&log](const TraceEntry& e) { log.push_back(e); };
  Engine engine(cfg);

  SolverState st;
  st.set_cs.push_back(c);
  if (context) st.pending.push_back(context);

  bool fired = std::holds_alternative<CSubsetRuq>(c) ? engine.try_subset(st, 0)
               : std::holds_alternative<CEqSet>(c)   ? engine.try_equality(st, 0)
                                                     : engine.try_membership(st, 0);
  auto to_formula = [](const SolverState& s) {
    std::vector<FormulaPtr> parts;
    for (const auto& [v, t] : s.bindings.set_bindings())
      parts.push_back(mk_atom(CEqSet{mk_svar(v), t}));
    for (const auto& [v, t] : s.bindings.x_bindings())
      parts.push_back(mk_atom(CTheory{"=", {mk_xvar(v), t}}));
    for (const auto& cc : s.set_cs) parts.push_back(mk_atom(cc));
    for (const auto& l : s.x_lits) parts.push_back(mk_atom(Constraint{l}));
    for (const auto& f : s.pending) parts.push_back(f);
    return mk_conj(parts);
  };

  RuleApplication out;
  if (!fired) {
    out.rule = "irreducible";
    out.branches.push_back(to_formula(st));
    return out;
  }
  out.rule = log.empty() ? "?" : log.front().rule;
  if (st.failed) return out;  // no branches: rewrote to false

  // Split the produced top-level disjunction (if any) into branches, keeping
  // the rest of the state conjoined.
  std::vector<SolverState> states{st};
  std::vector<FormulaPtr> done;
  while (!states.empty()) {
    SolverState cur = std::move(states.back());
    states.pop_back();
    if (cur.pending.empty()) {
      done.push_back(to_formula(cur));
      continue;
    }
    FormulaPtr f = cur.pending.front();
    if (const auto* o = std::get_if<FOr>(&f->node)) {
      SolverState left = cur, right = cur;
      left.pending.front() = o->lhs;
      right.pending.front() = o->rhs;
      states.push_back(std::move(right));
      states.push_back(std::move(left));
      continue;
    }
    done.push_back(to_formula(cur));
  }
  out.branches = std::move(done);
  return out;
}

}  // namespace rq
