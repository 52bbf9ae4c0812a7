#include "rq/print.hpp"
#include "rq/rewrite.hpp"
#include "rq/rqlayer.hpp"

namespace rq {

namespace {

// One binder entry: the core X-variable standing for the surface name, plus
// (lazily) a set-sorted twin for the quantified-variable-as-domain feature.
struct BoundVar {
  Var xvar;
};

class Lowering {
 public:
  Lowering(const SortReport& rep, const Theory& th) : rep_(rep), th_(th) {
    for (const auto& [key, sort] : rep.free_sorts) {
      const UVar& u = rep.vars.at(key);
      free_[key] = Var{u.name, u.fresh_id, sort};
    }
  }

  const std::map<std::string, Var>& free_vars() const { return free_; }

  FormulaPtr formula(const SurFormulaPtr& f) {
    if (std::holds_alternative<UTrue>(f->node)) return mk_true();
    if (std::holds_alternative<UFalse>(f->node)) return mk_false();
    if (const auto* x = std::get_if<UAnd>(&f->node))
      return mk_and(formula(x->lhs), formula(x->rhs));
    if (const auto* x = std::get_if<UOr>(&f->node))
      return mk_or(formula(x->lhs), formula(x->rhs));
    if (std::holds_alternative<UNeg>(f->node) ||
        std::holds_alternative<UImplies>(f->node))
      throw InputError("negation must be eliminated before lowering", f->pos);
    if (const auto* x = std::get_if<URel>(&f->node)) return relation(*x, f->pos);
    if (const auto* x = std::get_if<USubset>(&f->node)) {
      SetTermPtr lhs = set_term(x->lhs, f->pos);
      const auto& r = std::get<URis>(x->ris->node);
      RisTerm ris = ris_term(r, f->pos);
      return mk_atom(CSubsetRuq{lhs, std::move(ris)});
    }
    if (const auto* x = std::get_if<URq>(&f->node)) {
      URis view{x->binder.ctrl, x->binder.dom, x->locals, x->filter, x->fpreds};
      RisTerm ris = ris_term(view, f->pos);
      return mk_atom(CRq{x->quant, ris.ctrl, ris.dom, ris.locals, ris.filter, ris.fpreds});
    }
    if (const auto* x = std::get_if<UCall>(&f->node)) {
      if (!th_.knows(x->name, x->args.size()))
        throw InputError("unknown predicate '" + x->name + "/" +
                             std::to_string(x->args.size()) +
                             "' (not a definition; theory " + th_.name() +
                             " does not register it)",
                         f->pos);
      std::vector<XTermPtr> args;
      for (const auto& a : x->args) args.push_back(x_term(a, f->pos));
      return mk_atom(CTheory{x->name, std::move(args)});
    }
    // Sort atoms carry no constraint content once resolution has run.
    return mk_true();
  }

 private:
  const SortReport& rep_;
  const Theory& th_;
  std::map<std::string, Var> free_;
  std::vector<std::map<std::string, BoundVar>> scopes_;

  const BoundVar* lookup_bound(const UVar& v) const {
    if (v.fresh_id) return nullptr;
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(v.name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  bool name_in_scope(const std::string& name) const {
    for (const auto& s : scopes_)
      if (s.count(name)) return true;
    return false;
  }

  Var bind_name(const std::string& name, Pos pos) {
    // Rename when the name collides with a free variable or an enclosing
    // binder; otherwise keep it readable.
    bool collide = rep_.free_sorts.count(name) > 0 || name_in_scope(name);
    Var v = collide ? fresh_var(Sort::X) : Var{name, std::nullopt, Sort::X};
    if (scopes_.back().count(name))
      throw InputError("control variables must be pairwise distinct: " + name, pos);
    scopes_.back().emplace(name, BoundVar{v});
    return v;
  }

  CtrlTerm ctrl_term(const SurTermPtr& t, Pos pos) {
    if (const auto* v = std::get_if<UVar>(&t->node)) return mk_ctrl(bind_name(v->name, pos));
    if (const auto* p = std::get_if<UPair>(&t->node)) {
      CtrlTerm a = ctrl_term(p->first, pos);
      CtrlTerm b = ctrl_term(p->second, pos);
      return mk_ctrl(a, b);
    }
    throw InputError("control term must be a variable or a pair of control terms", pos);
  }

  RisTerm ris_term(const URis& r, Pos pos) {
    SetTermPtr dom = set_term(r.dom, pos);
    scopes_.push_back({});
    RisTerm out;
    out.ctrl = ctrl_term(r.ctrl, pos);
    out.dom = dom;
    for (const auto& l : r.locals) out.locals.push_back(bind_name(l, pos));
    out.filter = formula(r.filter);
    out.fpreds = r.fpreds ? formula(r.fpreds) : mk_true();
    scopes_.pop_back();
    if (!is_true(out.fpreds)) validate_fpreds(out, pos);
    return out;
  }

  // §6 shape: every functional-predicate conjunct is a registered predicate
  // whose result argument is a local, and every local is the result of
  // exactly one conjunct.
  void validate_fpreds(const RisTerm& r, Pos pos) const {
    std::vector<FormulaPtr> parts;
    flatten_and(r.fpreds, parts);
    std::map<Var, int> results;
    for (const Var& l : r.locals) results[l] = 0;
    for (const auto& p : parts) {
      const auto* atom = std::get_if<FAtom>(&p->node);
      const CTheory* lit = atom ? std::get_if<CTheory>(&atom->c) : nullptr;
      if (!lit)
        throw InputError(
            "the fourth argument of an extended quantifier must be a conjunction "
            "of functional predicates",
            pos);
      th_.fp_lookup(lit->pred);  // throws when unknown, listing what exists
      const XVar* res = lit->args.empty() ? nullptr : as_xvar(lit->args.back());
      if (!res || !results.count(res->var))
        throw InputError("functional predicate '" + lit->pred +
                             "' must have one of the declared locals as its result",
                         pos);
      results[res->var] += 1;
    }
    for (const auto& [v, n] : results)
      if (n != 1)
        throw InputError("local " + print(v) + " must be the result of exactly one "
                                               "functional predicate",
                         pos);
  }

  FormulaPtr relation(const URel& r, Pos pos) {
    if (r.op == "in" || r.op == "nin") {
      XTermPtr e = x_term(r.lhs, pos);
      SetTermPtr s = set_term(r.rhs, pos);
      if (r.op == "in") return mk_atom(CIn{e, s});
      return mk_atom(CNin{e, s});
    }
    if (r.op == "=") {
      if (is_set_side(r.lhs) || is_set_side(r.rhs))
        return mk_atom(CEqSet{set_term(r.lhs, pos), set_term(r.rhs, pos)});
      return mk_atom(CTheory{"=", {x_term(r.lhs, pos), x_term(r.rhs, pos)}});
    }
    return mk_atom(CTheory{r.op, {x_term(r.lhs, pos), x_term(r.rhs, pos)}});
  }

  bool is_set_side(const SurTermPtr& t) const {
    if (std::holds_alternative<UEmpty>(t->node) || std::holds_alternative<UExt>(t->node))
      return true;
    if (const auto* v = std::get_if<UVar>(&t->node)) {
      if (lookup_bound(*v)) return false;  // control variables are X-sorted
      auto it = rep_.free_sorts.find(var_key(*v));
      return it != rep_.free_sorts.end() && it->second == Sort::Set;
    }
    return false;
  }

  XTermPtr x_term(const SurTermPtr& t, Pos pos) {
    if (const auto* v = std::get_if<UVar>(&t->node)) {
      if (const BoundVar* b = lookup_bound(*v)) return mk_xvar(b->xvar);
      auto it = free_.find(var_key(*v));
      if (it == free_.end() || it->second.sort != Sort::X)
        throw InputError("variable " + v->name + " is not element-sorted here", pos);
      return mk_xvar(it->second);
    }
    if (const auto* a = std::get_if<UAtom>(&t->node)) return mk_atom(a->name);
    if (const auto* i = std::get_if<UInt>(&t->node)) return mk_int(i->value);
    if (const auto* p = std::get_if<UPair>(&t->node))
      return mk_pair(x_term(p->first, pos), x_term(p->second, pos));
    if (const auto* ar = std::get_if<UArith>(&t->node)) {
      std::vector<XTermPtr> args;
      for (const auto& x : ar->args) args.push_back(x_term(x, pos));
      return mk_apply(ar->op, std::move(args));
    }
    throw InputError("set term used in an element position: " + print(t), pos);
  }

  SetTermPtr set_term(const SurTermPtr& t, Pos pos) {
    if (std::holds_alternative<UEmpty>(t->node)) return mk_empty();
    if (const auto* v = std::get_if<UVar>(&t->node)) {
      if (const BoundVar* b = lookup_bound(*v)) {
        // Quantified variable used as a domain: refer to its set-sorted twin.
        return mk_svar(Var{b->xvar.name, b->xvar.fresh_id, Sort::Set});
      }
      auto it = free_.find(var_key(*v));
      if (it == free_.end() || it->second.sort != Sort::Set)
        throw InputError("variable " + v->name + " is not set-sorted here", pos);
      return mk_svar(it->second);
    }
    if (const auto* e = std::get_if<UExt>(&t->node)) {
      std::vector<XTermPtr> elems;
      for (const auto& x : e->elems) elems.push_back(x_term(x, pos));
      SetTermPtr tail = e->tail ? set_term(e->tail, pos) : mk_empty();
      return mk_ext(elems, tail);
    }
    if (std::holds_alternative<URis>(t->node))
      throw InputError(
          "a ris(...) term may only appear as the second argument of subset", pos);
    throw InputError("element term used in a set position: " + print(t), pos);
  }
};

}  // namespace

Lowered lower(const SurFormulaPtr& f, const Theory& th) {
  Lowered out;
  SortReport rep = infer_sorts(f);
  if (!rep.ok) {
    out.goal = mk_false();
    out.sort_false = true;
    out.sort_clashes = rep.clashes;
    return out;
  }
  Lowering low(rep, th);
  out.goal = low.formula(f);
  out.query_vars = low.free_vars();
  return out;
}

FormulaPtr desugar(const FormulaPtr& f) {
  if (const auto* x = std::get_if<FAnd>(&f->node))
    return mk_and(desugar(x->lhs), desugar(x->rhs));
  if (const auto* x = std::get_if<FOr>(&f->node))
    return mk_or(desugar(x->lhs), desugar(x->rhs));
  if (const auto* x = std::get_if<FAtom>(&f->node)) {
    if (const auto* rq = std::get_if<CRq>(&x->c)) return desugar(desugar_rq(*rq));
  }
  return f;
}

}  // namespace rq
