#include "rq/subst.hpp"

#include <stdexcept>

namespace rq {

void Subst::bind(const Var& v, XTermPtr t) {
  if (v.sort != Sort::X) throw std::logic_error("Subst::bind: sort mismatch");
  // Compose: rewrite existing ranges with the new pair, then insert.
  Subst one;
  one.xmap_.emplace(v, t);
  for (auto& [w, u] : xmap_) u = one.apply(u);
  for (auto& [w, u] : smap_) u = one.apply(u);
  xmap_[v] = std::move(t);
}

void Subst::bind(const Var& v, SetTermPtr t) {
  if (v.sort != Sort::Set) throw std::logic_error("Subst::bind: sort mismatch");
  Subst one;
  one.smap_.emplace(v, t);
  for (auto& [w, u] : xmap_) u = one.apply(u);
  for (auto& [w, u] : smap_) u = one.apply(u);
  smap_[v] = std::move(t);
}

const XTermPtr* Subst::lookup_x(const Var& v) const {
  auto it = xmap_.find(v);
  return it == xmap_.end() ? nullptr : &it->second;
}
const SetTermPtr* Subst::lookup_set(const Var& v) const {
  auto it = smap_.find(v);
  return it == smap_.end() ? nullptr : &it->second;
}

// Applications preserve sharing: untouched subterms come back as the same
// pointer, so substitution cost tracks the rewritten part only.

XTermPtr Subst::apply(const XTermPtr& t) const {
  if (empty()) return t;
  if (const auto* v = std::get_if<XVar>(&t->node)) {
    if (const XTermPtr* r = lookup_x(v->var)) return *r;
    return t;
  }
  if (const auto* p = std::get_if<XPair>(&t->node)) {
    XTermPtr a = apply(p->first);
    XTermPtr b = apply(p->second);
    if (a.get() == p->first.get() && b.get() == p->second.get()) return t;
    return mk_pair(std::move(a), std::move(b));
  }
  if (const auto* a = std::get_if<XApply>(&t->node)) {
    std::vector<XTermPtr> args;
    args.reserve(a->args.size());
    bool changed = false;
    for (const auto& x : a->args) {
      args.push_back(apply(x));
      changed |= args.back().get() != x.get();
    }
    if (!changed) return t;
    return mk_apply(a->fn, std::move(args));
  }
  return t;
}

SetTermPtr Subst::apply(const SetTermPtr& t) const {
  if (empty()) return t;
  if (const auto* v = std::get_if<SVar>(&t->node)) {
    if (const SetTermPtr* r = lookup_set(v->var)) return *r;
    return t;
  }
  if (const auto* c = std::get_if<SCons>(&t->node)) {
    XTermPtr e = apply(c->elem);
    SetTermPtr r = apply(c->rest);
    if (e.get() == c->elem.get() && r.get() == c->rest.get()) return t;
    return mk_cons(std::move(e), std::move(r));
  }
  return t;
}

namespace {

// Restricts a substitution to the bindings whose domain is not shadowed by
// the binder, and reports whether any live range variable collides with the
// binder (which forces alpha-renaming).
struct BinderView {
  const Subst* live = nullptr;  // original substitution when usable directly
  Subst narrowed;               // otherwise the non-shadowed part
  bool capture = false;

  const Subst& subst() const { return live ? *live : narrowed; }
};

BinderView under_binder(const Subst& s, const std::vector<Var>& bound) {
  BinderView out;
  bool shadowed = false;
  for (const Var& b : bound) {
    if ((b.sort == Sort::X && s.lookup_x(b)) || (b.sort == Sort::Set && s.lookup_set(b)))
      shadowed = true;
  }
  if (!shadowed) {
    out.live = &s;
  } else {
    auto keep = [&](const Var& v) {
      for (const Var& b : bound)
        if (b == v) return false;
      return true;
    };
    for (const auto& [v, t] : s.x_bindings())
      if (keep(v)) out.narrowed.bind(v, t);
    for (const auto& [v, t] : s.set_bindings())
      if (keep(v)) out.narrowed.bind(v, t);
  }
  std::set<Var> range;
  for (const auto& [v, t] : out.subst().x_bindings()) collect_free_vars(t, range);
  for (const auto& [v, t] : out.subst().set_bindings()) collect_free_vars(t, range);
  for (const Var& b : bound)
    if (range.count(b)) out.capture = true;
  return out;
}

CtrlTerm rename_ctrl(const CtrlTerm& c, Subst& renaming) {
  if (const Var* v = std::get_if<Var>(&c.node)) {
    Var nv = fresh_var(Sort::X);
    renaming.bind(*v, mk_xvar(nv));
    return mk_ctrl(nv);
  }
  const auto& p = std::get<std::shared_ptr<const CtrlPair>>(c.node);
  CtrlTerm a = rename_ctrl(p->first, renaming);
  CtrlTerm b = rename_ctrl(p->second, renaming);
  return mk_ctrl(a, b);
}

}  // namespace

RisTerm Subst::apply(const RisTerm& r) const {
  std::vector<Var> bound = ctrl_vars(r.ctrl);
  bound.insert(bound.end(), r.locals.begin(), r.locals.end());
  BinderView view = under_binder(*this, bound);
  RisTerm out = r;
  if (view.capture) {
    Subst renaming;
    out.ctrl = rename_ctrl(r.ctrl, renaming);
    out.locals.clear();
    for (const Var& l : r.locals) {
      Var nl = fresh_var(Sort::X);
      renaming.bind(l, mk_xvar(nl));
      out.locals.push_back(nl);
    }
    out.filter = renaming.apply(r.filter);
    out.fpreds = renaming.apply(r.fpreds);
  }
  out.dom = apply(out.dom);
  out.filter = view.subst().apply(out.filter);
  out.fpreds = view.subst().apply(out.fpreds);
  return out;
}

Constraint Subst::apply(const Constraint& c) const {
  if (const auto* e = std::get_if<CEqSet>(&c)) return CEqSet{apply(e->lhs), apply(e->rhs)};
  if (const auto* e = std::get_if<CIn>(&c)) return CIn{apply(e->elem), apply(e->set)};
  if (const auto* e = std::get_if<CNin>(&c)) return CNin{apply(e->elem), apply(e->set)};
  if (const auto* e = std::get_if<CSubsetRuq>(&c))
    return CSubsetRuq{apply(e->lhs), apply(e->ris)};
  if (const auto* e = std::get_if<CTheory>(&c)) {
    std::vector<XTermPtr> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) args.push_back(apply(a));
    return CTheory{e->pred, std::move(args)};
  }
  const auto& e = std::get<CRq>(c);
  RisTerm r{e.ctrl, e.dom, e.locals, e.filter, e.fpreds};
  RisTerm s = apply(r);
  return CRq{e.quant, s.ctrl, s.dom, s.locals, s.filter, s.fpreds};
}

FormulaPtr Subst::apply(const FormulaPtr& f) const {
  if (empty()) return f;
  if (const auto* x = std::get_if<FAnd>(&f->node)) {
    FormulaPtr a = apply(x->lhs);
    FormulaPtr b = apply(x->rhs);
    if (a.get() == x->lhs.get() && b.get() == x->rhs.get()) return f;
    return mk_and(std::move(a), std::move(b));
  }
  if (const auto* x = std::get_if<FOr>(&f->node)) {
    FormulaPtr a = apply(x->lhs);
    FormulaPtr b = apply(x->rhs);
    if (a.get() == x->lhs.get() && b.get() == x->rhs.get()) return f;
    return mk_or(std::move(a), std::move(b));
  }
  if (const auto* x = std::get_if<FAtom>(&f->node)) {
    Constraint c = apply(x->c);
    if (equal(c, x->c)) return f;
    return mk_atom(std::move(c));
  }
  return f;
}

Subst subst1(const Var& v, XTermPtr t) {
  Subst s;
  s.bind(v, std::move(t));
  return s;
}
Subst subst1(const Var& v, SetTermPtr t) {
  Subst s;
  s.bind(v, std::move(t));
  return s;
}

}  // namespace rq
