#include "rq/rqlayer.hpp"

#include <atomic>

#include "rq/print.hpp"
#include "rq/rewrite.hpp"

namespace rq {

namespace {

std::atomic<std::uint64_t> g_rename_counter{1};

SurTermPtr sterm(SurTerm t) { return std::make_shared<const SurTerm>(std::move(t)); }
SurFormulaPtr sform(SurFormula f) {
  return std::make_shared<const SurFormula>(std::move(f));
}

// --- surface substitution (name -> term), binder-aware -----------------------

using NameMap = std::map<std::string, SurTermPtr>;

void bound_names(const SurTermPtr& ctrl, std::set<std::string>& out) {
  if (const auto* v = std::get_if<UVar>(&ctrl->node)) {
    out.insert(v->name);
  } else if (const auto* p = std::get_if<UPair>(&ctrl->node)) {
    bound_names(p->first, out);
    bound_names(p->second, out);
  }
}

SurTermPtr subst_term(const SurTermPtr& t, const NameMap& m,
                      const std::set<std::string>& bound);
SurFormulaPtr subst_formula(const SurFormulaPtr& f, const NameMap& m,
                            std::set<std::string> bound);

SurTermPtr subst_term(const SurTermPtr& t, const NameMap& m,
                      const std::set<std::string>& bound) {
  if (const auto* v = std::get_if<UVar>(&t->node)) {
    if (v->fresh_id || bound.count(v->name)) return t;
    auto it = m.find(v->name);
    return it == m.end() ? t : it->second;
  }
  if (const auto* p = std::get_if<UPair>(&t->node))
    return sterm({UPair{subst_term(p->first, m, bound), subst_term(p->second, m, bound)},
                  t->pos});
  if (const auto* a = std::get_if<UArith>(&t->node)) {
    std::vector<SurTermPtr> args;
    for (const auto& x : a->args) args.push_back(subst_term(x, m, bound));
    return sterm({UArith{a->op, std::move(args)}, t->pos});
  }
  if (const auto* e = std::get_if<UExt>(&t->node)) {
    UExt out;
    for (const auto& x : e->elems) out.elems.push_back(subst_term(x, m, bound));
    if (e->tail) out.tail = subst_term(e->tail, m, bound);
    return sterm({std::move(out), t->pos});
  }
  if (const auto* r = std::get_if<URis>(&t->node)) {
    std::set<std::string> inner = bound;
    bound_names(r->ctrl, inner);
    for (const auto& l : r->locals) inner.insert(l);
    URis out = *r;
    out.dom = subst_term(r->dom, m, bound);
    out.filter = subst_formula(r->filter, m, inner);
    if (r->fpreds) out.fpreds = subst_formula(r->fpreds, m, inner);
    return sterm({std::move(out), t->pos});
  }
  return t;
}

SurFormulaPtr subst_formula(const SurFormulaPtr& f, const NameMap& m,
                            std::set<std::string> bound) {
  if (const auto* x = std::get_if<UAnd>(&f->node))
    return sform({UAnd{subst_formula(x->lhs, m, bound), subst_formula(x->rhs, m, bound)},
                  f->pos});
  if (const auto* x = std::get_if<UOr>(&f->node))
    return sform({UOr{subst_formula(x->lhs, m, bound), subst_formula(x->rhs, m, bound)},
                  f->pos});
  if (const auto* x = std::get_if<UNeg>(&f->node))
    return sform({UNeg{subst_formula(x->body, m, bound)}, f->pos});
  if (const auto* x = std::get_if<UImplies>(&f->node))
    return sform({UImplies{subst_formula(x->lhs, m, bound),
                           subst_formula(x->rhs, m, bound)},
                  f->pos});
  if (const auto* x = std::get_if<URel>(&f->node))
    return sform({URel{x->op, subst_term(x->lhs, m, bound), subst_term(x->rhs, m, bound)},
                  f->pos});
  if (const auto* x = std::get_if<USubset>(&f->node))
    return sform({USubset{subst_term(x->lhs, m, bound), subst_term(x->ris, m, bound)},
                  f->pos});
  if (const auto* x = std::get_if<URq>(&f->node)) {
    std::set<std::string> inner = bound;
    bound_names(x->binder.ctrl, inner);
    for (const auto& l : x->locals) inner.insert(l);
    URq out = *x;
    out.binder.dom = subst_term(x->binder.dom, m, bound);
    out.filter = subst_formula(x->filter, m, inner);
    if (x->fpreds) out.fpreds = subst_formula(x->fpreds, m, inner);
    return sform({std::move(out), f->pos});
  }
  if (const auto* x = std::get_if<UCall>(&f->node)) {
    UCall out = *x;
    for (auto& a : out.args) a = subst_term(a, m, bound);
    return sform({std::move(out), f->pos});
  }
  if (const auto* x = std::get_if<USort>(&f->node))
    return sform({USort{x->is_set, subst_term(x->term, m, bound)}, f->pos});
  return f;
}

void free_names(const SurTermPtr& t, const std::set<std::string>& bound,
                std::set<std::string>& out);
void free_names(const SurFormulaPtr& f, std::set<std::string> bound,
                std::set<std::string>& out);

void free_names(const SurTermPtr& t, const std::set<std::string>& bound,
                std::set<std::string>& out) {
  if (const auto* v = std::get_if<UVar>(&t->node)) {
    if (!v->fresh_id && !bound.count(v->name)) out.insert(v->name);
  } else if (const auto* p = std::get_if<UPair>(&t->node)) {
    free_names(p->first, bound, out);
    free_names(p->second, bound, out);
  } else if (const auto* a = std::get_if<UArith>(&t->node)) {
    for (const auto& x : a->args) free_names(x, bound, out);
  } else if (const auto* e = std::get_if<UExt>(&t->node)) {
    for (const auto& x : e->elems) free_names(x, bound, out);
    if (e->tail) free_names(e->tail, bound, out);
  } else if (const auto* r = std::get_if<URis>(&t->node)) {
    free_names(r->dom, bound, out);
    std::set<std::string> inner = bound;
    bound_names(r->ctrl, inner);
    for (const auto& l : r->locals) inner.insert(l);
    free_names(r->filter, inner, out);
    if (r->fpreds) free_names(r->fpreds, inner, out);
  }
}

void free_names(const SurFormulaPtr& f, std::set<std::string> bound,
                std::set<std::string>& out) {
  if (const auto* x = std::get_if<UAnd>(&f->node)) {
    free_names(x->lhs, bound, out);
    free_names(x->rhs, bound, out);
  } else if (const auto* x = std::get_if<UOr>(&f->node)) {
    free_names(x->lhs, bound, out);
    free_names(x->rhs, bound, out);
  } else if (const auto* x = std::get_if<UNeg>(&f->node)) {
    free_names(x->body, bound, out);
  } else if (const auto* x = std::get_if<UImplies>(&f->node)) {
    free_names(x->lhs, bound, out);
    free_names(x->rhs, bound, out);
  } else if (const auto* x = std::get_if<URel>(&f->node)) {
    free_names(x->lhs, bound, out);
    free_names(x->rhs, bound, out);
  } else if (const auto* x = std::get_if<USubset>(&f->node)) {
    free_names(x->lhs, bound, out);
    free_names(x->ris, bound, out);
  } else if (const auto* x = std::get_if<URq>(&f->node)) {
    free_names(x->binder.dom, bound, out);
    std::set<std::string> inner = bound;
    bound_names(x->binder.ctrl, inner);
    for (const auto& l : x->locals) inner.insert(l);
    free_names(x->filter, inner, out);
    if (x->fpreds) free_names(x->fpreds, inner, out);
  } else if (const auto* x = std::get_if<UCall>(&f->node)) {
    for (const auto& a : x->args) free_names(a, bound, out);
  } else if (const auto* x = std::get_if<USort>(&f->node)) {
    free_names(x->term, bound, out);
  }
}

}  // namespace

// --- definition expansion ----------------------------------------------------

SurFormulaPtr expand_calls(const SurFormulaPtr& f, const std::vector<Definition>& defs) {
  std::map<std::string, const Definition*> byname;
  for (const auto& d : defs) byname[d.name] = &d;

  std::function<SurFormulaPtr(const SurFormulaPtr&)> go =
      [&](const SurFormulaPtr& g) -> SurFormulaPtr {
    if (const auto* x = std::get_if<UAnd>(&g->node))
      return sform({UAnd{go(x->lhs), go(x->rhs)}, g->pos});
    if (const auto* x = std::get_if<UOr>(&g->node))
      return sform({UOr{go(x->lhs), go(x->rhs)}, g->pos});
    if (const auto* x = std::get_if<UNeg>(&g->node))
      return sform({UNeg{go(x->body)}, g->pos});
    if (const auto* x = std::get_if<UImplies>(&g->node))
      return sform({UImplies{go(x->lhs), go(x->rhs)}, g->pos});
    if (const auto* x = std::get_if<URq>(&g->node)) {
      URq out = *x;
      out.filter = go(x->filter);
      if (x->fpreds) out.fpreds = go(x->fpreds);
      return sform({std::move(out), g->pos});
    }
    if (const auto* x = std::get_if<UCall>(&g->node)) {
      auto it = byname.find(x->name);
      if (it == byname.end()) return g;  // theory predicate, handled at lowering
      const Definition& d = *it->second;
      if (d.params.size() != x->args.size())
        throw InputError("call to " + d.name + "/" + std::to_string(d.params.size()) +
                             " with " + std::to_string(x->args.size()) + " arguments",
                         g->pos);
      NameMap m;
      for (size_t i = 0; i < d.params.size(); ++i) m[d.params[i]] = x->args[i];
      // Rename body variables that are neither parameters nor bound, so two
      // expansions of the same definition do not share locals.
      std::set<std::string> body_free;
      free_names(d.body, {}, body_free);
      for (const auto& name : body_free) {
        if (m.count(name)) continue;
        std::uint64_t id = g_rename_counter.fetch_add(1);
        m[name] = sterm({UVar{name, id}, d.pos});
      }
      return go(subst_formula(d.body, m, {}));
    }
    return g;
  };
  return go(f);
}

// --- negation ----------------------------------------------------------------

namespace {

bool definitely_set_term(const SurTermPtr& t, const SortReport& rep) {
  if (std::holds_alternative<UEmpty>(t->node) || std::holds_alternative<UExt>(t->node) ||
      std::holds_alternative<URis>(t->node))
    return true;
  if (const auto* v = std::get_if<UVar>(&t->node)) {
    auto it = rep.free_sorts.find(var_key(*v));
    return it != rep.free_sorts.end() && it->second == Sort::Set;
  }
  return false;
}

SurFormulaPtr negate_impl(const SurFormulaPtr& f, const Theory& th, const SortReport& rep);
SurFormulaPtr eliminate_impl(const SurFormulaPtr& f, const Theory& th,
                             const SortReport& rep);

SurFormulaPtr negate_impl(const SurFormulaPtr& f, const Theory& th,
                          const SortReport& rep) {
  Pos pos = f->pos;
  if (std::holds_alternative<UTrue>(f->node)) return sform({UFalse{}, pos});
  if (std::holds_alternative<UFalse>(f->node)) return sform({UTrue{}, pos});
  if (const auto* x = std::get_if<UAnd>(&f->node))
    return sform({UOr{negate_impl(x->lhs, th, rep), negate_impl(x->rhs, th, rep)}, pos});
  if (const auto* x = std::get_if<UOr>(&f->node))
    return sform({UAnd{negate_impl(x->lhs, th, rep), negate_impl(x->rhs, th, rep)}, pos});
  if (const auto* x = std::get_if<UNeg>(&f->node)) return eliminate_impl(x->body, th, rep);
  if (const auto* x = std::get_if<UImplies>(&f->node))
    return sform({UAnd{eliminate_impl(x->lhs, th, rep), negate_impl(x->rhs, th, rep)},
                  pos});
  if (const auto* x = std::get_if<URq>(&f->node)) {
    // Quantifier dual; extended forms keep the functional predicates and
    // negate only the filter.
    URq out = *x;
    out.quant = x->quant == Quant::Forall ? Quant::Exists : Quant::Forall;
    out.filter = negate_impl(x->filter, th, rep);
    return sform({std::move(out), pos});
  }
  if (const auto* x = std::get_if<USubset>(&f->node)) {
    // A RUQ in subset form: negate as the corresponding exists.
    const auto& r = std::get<URis>(x->ris->node);
    URq out;
    out.quant = Quant::Exists;
    out.binder = {r.ctrl, r.dom};
    out.locals = r.locals;
    out.filter = negate_impl(r.filter, th, rep);
    out.fpreds = r.fpreds;
    return sform({std::move(out), pos});
  }
  if (const auto* x = std::get_if<URel>(&f->node)) {
    if (x->op == "in") return sform({URel{"nin", x->lhs, x->rhs}, pos});
    if (x->op == "nin") return sform({URel{"in", x->lhs, x->rhs}, pos});
    if (x->op == "=" &&
        (definitely_set_term(x->lhs, rep) || definitely_set_term(x->rhs, rep)))
      throw InputError(
          "cannot negate a set equality; only restricted quantifiers, membership "
          "and theory literals are negatable",
          pos);
    // Theory literal: ask the plugin for the complement.
    CTheory lit{x->op, {mk_int(0), mk_int(0)}};
    CTheory neg = th.negate(lit);
    return sform({URel{neg.pred, x->lhs, x->rhs}, pos});
  }
  if (const auto* x = std::get_if<UCall>(&f->node))
    throw InputError("cannot negate '" + x->name +
                         "': functional predicates have no complement",
                     pos);
  throw InputError("formula is not negatable: " + print(f), pos);
}

SurFormulaPtr eliminate_impl(const SurFormulaPtr& f, const Theory& th,
                             const SortReport& rep) {
  Pos pos = f->pos;
  if (const auto* x = std::get_if<UAnd>(&f->node))
    return sform({UAnd{eliminate_impl(x->lhs, th, rep), eliminate_impl(x->rhs, th, rep)},
                  pos});
  if (const auto* x = std::get_if<UOr>(&f->node))
    return sform({UOr{eliminate_impl(x->lhs, th, rep), eliminate_impl(x->rhs, th, rep)},
                  pos});
  if (const auto* x = std::get_if<UNeg>(&f->node)) return negate_impl(x->body, th, rep);
  if (const auto* x = std::get_if<UImplies>(&f->node))
    return sform({UOr{negate_impl(x->lhs, th, rep), eliminate_impl(x->rhs, th, rep)},
                  pos});
  if (const auto* x = std::get_if<URq>(&f->node)) {
    URq out = *x;
    out.filter = eliminate_impl(x->filter, th, rep);
    return sform({std::move(out), pos});
  }
  return f;
}

}  // namespace

SurFormulaPtr negate(const SurFormulaPtr& f, const Theory& th) {
  return negate_impl(f, th, infer_sorts(f));
}

SurFormulaPtr eliminate_neg(const SurFormulaPtr& f, const Theory& th) {
  return eliminate_impl(f, th, infer_sorts(f));
}

}  // namespace rq
