#include <stdexcept>

#include "rq/formula.hpp"

namespace rq {

namespace {
std::atomic<std::uint64_t> g_fresh_counter{1};
}

Var fresh_var(Sort sort) {
  std::uint64_t id = g_fresh_counter.fetch_add(1, std::memory_order_relaxed);
  return Var{"_N", id, sort};
}

void reset_fresh_counter(std::uint64_t next) {
  g_fresh_counter.store(next, std::memory_order_relaxed);
}

// --- constructors -----------------------------------------------------------

XTermPtr mk_xvar(Var v) {
  if (v.sort != Sort::X) throw std::logic_error("mk_xvar: set-sorted variable");
  return std::make_shared<const XTerm>(XTerm{XVar{std::move(v)}});
}
XTermPtr mk_atom(std::string name) {
  return std::make_shared<const XTerm>(XTerm{XAtom{std::move(name)}});
}
XTermPtr mk_int(long long value) {
  return std::make_shared<const XTerm>(XTerm{XInt{value}});
}
XTermPtr mk_pair(XTermPtr a, XTermPtr b) {
  return std::make_shared<const XTerm>(XTerm{XPair{std::move(a), std::move(b)}});
}
XTermPtr mk_apply(std::string fn, std::vector<XTermPtr> args) {
  return std::make_shared<const XTerm>(XTerm{XApply{std::move(fn), std::move(args)}});
}

SetTermPtr mk_empty() {
  static const SetTermPtr e = std::make_shared<const SetTerm>(SetTerm{SEmpty{}});
  return e;
}
SetTermPtr mk_svar(Var v) {
  if (v.sort != Sort::Set) throw std::logic_error("mk_svar: X-sorted variable");
  return std::make_shared<const SetTerm>(SetTerm{SVar{std::move(v)}});
}
SetTermPtr mk_cons(XTermPtr elem, SetTermPtr rest) {
  return std::make_shared<const SetTerm>(SetTerm{SCons{std::move(elem), std::move(rest)}});
}
SetTermPtr mk_ext(const std::vector<XTermPtr>& elems, SetTermPtr tail) {
  SetTermPtr s = tail ? tail : mk_empty();
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) s = mk_cons(*it, s);
  return s;
}

CtrlTerm mk_ctrl(Var v) {
  if (v.sort != Sort::X) throw std::logic_error("mk_ctrl: set-sorted variable");
  return CtrlTerm{std::move(v)};
}
CtrlTerm mk_ctrl(CtrlTerm a, CtrlTerm b) {
  return CtrlTerm{std::make_shared<const CtrlPair>(CtrlPair{std::move(a), std::move(b)})};
}

std::vector<Var> ctrl_vars(const CtrlTerm& c) {
  std::vector<Var> out;
  if (const Var* v = std::get_if<Var>(&c.node)) {
    out.push_back(*v);
  } else {
    const auto& p = std::get<std::shared_ptr<const CtrlPair>>(c.node);
    for (const Var& v : ctrl_vars(p->first)) out.push_back(v);
    for (const Var& v : ctrl_vars(p->second)) out.push_back(v);
  }
  return out;
}

XTermPtr ctrl_to_xterm(const CtrlTerm& c) {
  if (const Var* v = std::get_if<Var>(&c.node)) return mk_xvar(*v);
  const auto& p = std::get<std::shared_ptr<const CtrlPair>>(c.node);
  return mk_pair(ctrl_to_xterm(p->first), ctrl_to_xterm(p->second));
}

FormulaPtr mk_true() {
  static const FormulaPtr t = std::make_shared<const Formula>(Formula{FTrue{}});
  return t;
}
FormulaPtr mk_false() {
  static const FormulaPtr f = std::make_shared<const Formula>(Formula{FFalse{}});
  return f;
}
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  if (is_false(a) || is_false(b)) return mk_false();
  return std::make_shared<const Formula>(Formula{FAnd{std::move(a), std::move(b)}});
}
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<const Formula>(Formula{FOr{std::move(a), std::move(b)}});
}
FormulaPtr mk_atom(Constraint c) {
  return std::make_shared<const Formula>(Formula{FAtom{std::move(c)}});
}
FormulaPtr mk_conj(const std::vector<FormulaPtr>& fs) {
  FormulaPtr acc = mk_true();
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) acc = mk_and(*it, acc);
  return acc;
}

bool is_true(const FormulaPtr& f) { return std::holds_alternative<FTrue>(f->node); }
bool is_false(const FormulaPtr& f) { return std::holds_alternative<FFalse>(f->node); }

// --- structural equality ----------------------------------------------------

bool equal(const XTermPtr& a, const XTermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  if (const auto* v = std::get_if<XVar>(&a->node))
    return v->var == std::get<XVar>(b->node).var;
  if (const auto* at = std::get_if<XAtom>(&a->node))
    return at->name == std::get<XAtom>(b->node).name;
  if (const auto* i = std::get_if<XInt>(&a->node))
    return i->value == std::get<XInt>(b->node).value;
  if (const auto* p = std::get_if<XPair>(&a->node)) {
    const auto& q = std::get<XPair>(b->node);
    return equal(p->first, q.first) && equal(p->second, q.second);
  }
  const auto& f = std::get<XApply>(a->node);
  const auto& g = std::get<XApply>(b->node);
  if (f.fn != g.fn || f.args.size() != g.args.size()) return false;
  for (size_t i = 0; i < f.args.size(); ++i)
    if (!equal(f.args[i], g.args[i])) return false;
  return true;
}

bool equal(const SetTermPtr& a, const SetTermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<SEmpty>(a->node)) return true;
  if (const auto* v = std::get_if<SVar>(&a->node))
    return v->var == std::get<SVar>(b->node).var;
  const auto& c = std::get<SCons>(a->node);
  const auto& d = std::get<SCons>(b->node);
  return equal(c.elem, d.elem) && equal(c.rest, d.rest);
}

bool equal(const CtrlTerm& a, const CtrlTerm& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const Var* v = std::get_if<Var>(&a.node)) return *v == std::get<Var>(b.node);
  const auto& p = std::get<std::shared_ptr<const CtrlPair>>(a.node);
  const auto& q = std::get<std::shared_ptr<const CtrlPair>>(b.node);
  return equal(p->first, q->first) && equal(p->second, q->second);
}

bool equal(const RisTerm& a, const RisTerm& b) {
  return equal(a.ctrl, b.ctrl) && equal(a.dom, b.dom) && a.locals == b.locals &&
         equal(a.filter, b.filter) && equal(a.fpreds, b.fpreds);
}

bool equal(const Constraint& a, const Constraint& b) {
  if (a.index() != b.index()) return false;
  if (const auto* e = std::get_if<CEqSet>(&a)) {
    const auto& f = std::get<CEqSet>(b);
    return equal(e->lhs, f.lhs) && equal(e->rhs, f.rhs);
  }
  if (const auto* e = std::get_if<CIn>(&a)) {
    const auto& f = std::get<CIn>(b);
    return equal(e->elem, f.elem) && equal(e->set, f.set);
  }
  if (const auto* e = std::get_if<CNin>(&a)) {
    const auto& f = std::get<CNin>(b);
    return equal(e->elem, f.elem) && equal(e->set, f.set);
  }
  if (const auto* e = std::get_if<CSubsetRuq>(&a)) {
    const auto& f = std::get<CSubsetRuq>(b);
    return equal(e->lhs, f.lhs) && equal(e->ris, f.ris);
  }
  if (const auto* e = std::get_if<CTheory>(&a)) {
    const auto& f = std::get<CTheory>(b);
    if (e->pred != f.pred || e->args.size() != f.args.size()) return false;
    for (size_t i = 0; i < e->args.size(); ++i)
      if (!equal(e->args[i], f.args[i])) return false;
    return true;
  }
  const auto& e = std::get<CRq>(a);
  const auto& f = std::get<CRq>(b);
  return e.quant == f.quant && equal(e.ctrl, f.ctrl) && equal(e.dom, f.dom) &&
         e.locals == f.locals && equal(e.filter, f.filter) && equal(e.fpreds, f.fpreds);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<FTrue>(a->node) || std::holds_alternative<FFalse>(a->node))
    return true;
  if (const auto* x = std::get_if<FAnd>(&a->node)) {
    const auto& y = std::get<FAnd>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto* x = std::get_if<FOr>(&a->node)) {
    const auto& y = std::get<FOr>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  return equal(std::get<FAtom>(a->node).c, std::get<FAtom>(b->node).c);
}

// --- queries ----------------------------------------------------------------

bool is_empty(const SetTermPtr& s) { return std::holds_alternative<SEmpty>(s->node); }
const SVar* as_svar(const SetTermPtr& s) { return std::get_if<SVar>(&s->node); }
const SCons* as_scons(const SetTermPtr& s) { return std::get_if<SCons>(&s->node); }
const XVar* as_xvar(const XTermPtr& t) { return std::get_if<XVar>(&t->node); }

bool occurs_in_tail(const Var& v, const SetTermPtr& t) {
  const SetTerm* cur = t.get();
  bool saw_cons = false;
  while (const auto* c = std::get_if<SCons>(&cur->node)) {
    saw_cons = true;
    cur = c->rest.get();
  }
  if (const auto* sv = std::get_if<SVar>(&cur->node))
    return saw_cons && sv->var == v;
  return false;
}

ExtParts ext_parts(const SetTermPtr& s) {
  ExtParts out;
  SetTermPtr cur = s;
  while (const auto* c = std::get_if<SCons>(&cur->node)) {
    out.elems.push_back(c->elem);
    cur = c->rest;
  }
  out.tail = cur;
  return out;
}

// --- free variables ---------------------------------------------------------

void collect_free_vars(const XTermPtr& t, std::set<Var>& out) {
  if (const auto* v = std::get_if<XVar>(&t->node)) {
    out.insert(v->var);
  } else if (const auto* p = std::get_if<XPair>(&t->node)) {
    collect_free_vars(p->first, out);
    collect_free_vars(p->second, out);
  } else if (const auto* a = std::get_if<XApply>(&t->node)) {
    for (const auto& arg : a->args) collect_free_vars(arg, out);
  }
}

void collect_free_vars(const SetTermPtr& t, std::set<Var>& out) {
  if (const auto* v = std::get_if<SVar>(&t->node)) {
    out.insert(v->var);
  } else if (const auto* c = std::get_if<SCons>(&t->node)) {
    collect_free_vars(c->elem, out);
    collect_free_vars(c->rest, out);
  }
}

namespace {

void free_vars_binder(const CtrlTerm& ctrl, const std::vector<Var>& locals,
                      const FormulaPtr& filter, const FormulaPtr& fpreds,
                      std::set<Var>& out) {
  std::set<Var> inner;
  collect_free_vars(filter, inner);
  collect_free_vars(fpreds, inner);
  for (const Var& v : ctrl_vars(ctrl)) inner.erase(v);
  for (const Var& v : locals) inner.erase(v);
  out.insert(inner.begin(), inner.end());
}

}  // namespace

void collect_free_vars(const Constraint& c, std::set<Var>& out) {
  if (const auto* e = std::get_if<CEqSet>(&c)) {
    collect_free_vars(e->lhs, out);
    collect_free_vars(e->rhs, out);
  } else if (const auto* e = std::get_if<CIn>(&c)) {
    collect_free_vars(e->elem, out);
    collect_free_vars(e->set, out);
  } else if (const auto* e = std::get_if<CNin>(&c)) {
    collect_free_vars(e->elem, out);
    collect_free_vars(e->set, out);
  } else if (const auto* e = std::get_if<CSubsetRuq>(&c)) {
    collect_free_vars(e->lhs, out);
    collect_free_vars(e->ris.dom, out);
    free_vars_binder(e->ris.ctrl, e->ris.locals, e->ris.filter, e->ris.fpreds, out);
  } else if (const auto* e = std::get_if<CTheory>(&c)) {
    for (const auto& a : e->args) collect_free_vars(a, out);
  } else {
    const auto& rq = std::get<CRq>(c);
    collect_free_vars(rq.dom, out);
    free_vars_binder(rq.ctrl, rq.locals, rq.filter, rq.fpreds, out);
  }
}

void collect_free_vars(const FormulaPtr& f, std::set<Var>& out) {
  if (const auto* x = std::get_if<FAnd>(&f->node)) {
    collect_free_vars(x->lhs, out);
    collect_free_vars(x->rhs, out);
  } else if (const auto* x = std::get_if<FOr>(&f->node)) {
    collect_free_vars(x->lhs, out);
    collect_free_vars(x->rhs, out);
  } else if (const auto* x = std::get_if<FAtom>(&f->node)) {
    collect_free_vars(x->c, out);
  }
}

std::set<Var> free_vars(const XTermPtr& t) {
  std::set<Var> out;
  collect_free_vars(t, out);
  return out;
}
std::set<Var> free_vars(const SetTermPtr& t) {
  std::set<Var> out;
  collect_free_vars(t, out);
  return out;
}
std::set<Var> free_vars(const FormulaPtr& f) {
  std::set<Var> out;
  collect_free_vars(f, out);
  return out;
}
std::set<Var> free_vars(const Constraint& c) {
  std::set<Var> out;
  collect_free_vars(c, out);
  return out;
}

void flatten_and(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (const auto* x = std::get_if<FAnd>(&f->node)) {
    flatten_and(x->lhs, out);
    flatten_and(x->rhs, out);
  } else if (!is_true(f)) {
    out.push_back(f);
  }
}

}  // namespace rq
