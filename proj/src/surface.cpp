#include "rq/surface.hpp"

namespace rq {

// Structural equality; positions are ignored.

bool equal(const SurTermPtr& a, const SurTermPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return a.get() == b.get();
  if (a->node.index() != b->node.index()) return false;
  if (const auto* v = std::get_if<UVar>(&a->node)) {
    const auto& w = std::get<UVar>(b->node);
    return v->name == w.name && v->fresh_id == w.fresh_id;
  }
  if (const auto* v = std::get_if<UAtom>(&a->node))
    return v->name == std::get<UAtom>(b->node).name;
  if (const auto* v = std::get_if<UInt>(&a->node))
    return v->value == std::get<UInt>(b->node).value;
  if (const auto* v = std::get_if<UPair>(&a->node)) {
    const auto& w = std::get<UPair>(b->node);
    return equal(v->first, w.first) && equal(v->second, w.second);
  }
  if (const auto* v = std::get_if<UArith>(&a->node)) {
    const auto& w = std::get<UArith>(b->node);
    if (v->op != w.op || v->args.size() != w.args.size()) return false;
    for (size_t i = 0; i < v->args.size(); ++i)
      if (!equal(v->args[i], w.args[i])) return false;
    return true;
  }
  if (std::holds_alternative<UEmpty>(a->node)) return true;
  if (const auto* v = std::get_if<UExt>(&a->node)) {
    const auto& w = std::get<UExt>(b->node);
    if (v->elems.size() != w.elems.size()) return false;
    for (size_t i = 0; i < v->elems.size(); ++i)
      if (!equal(v->elems[i], w.elems[i])) return false;
    return equal(v->tail, w.tail);
  }
  const auto& v = std::get<URis>(a->node);
  const auto& w = std::get<URis>(b->node);
  return equal(v.ctrl, w.ctrl) && equal(v.dom, w.dom) && v.locals == w.locals &&
         equal(v.filter, w.filter) && equal(v.fpreds, w.fpreds);
}

bool equal(const SurFormulaPtr& a, const SurFormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return a.get() == b.get();
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<UTrue>(a->node) || std::holds_alternative<UFalse>(a->node))
    return true;
  if (const auto* x = std::get_if<UAnd>(&a->node)) {
    const auto& y = std::get<UAnd>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto* x = std::get_if<UOr>(&a->node)) {
    const auto& y = std::get<UOr>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto* x = std::get_if<UNeg>(&a->node))
    return equal(x->body, std::get<UNeg>(b->node).body);
  if (const auto* x = std::get_if<UImplies>(&a->node)) {
    const auto& y = std::get<UImplies>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto* x = std::get_if<URel>(&a->node)) {
    const auto& y = std::get<URel>(b->node);
    return x->op == y.op && equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto* x = std::get_if<USubset>(&a->node)) {
    const auto& y = std::get<USubset>(b->node);
    return equal(x->lhs, y.lhs) && equal(x->ris, y.ris);
  }
  if (const auto* x = std::get_if<URq>(&a->node)) {
    const auto& y = std::get<URq>(b->node);
    return x->quant == y.quant && equal(x->binder.ctrl, y.binder.ctrl) &&
           equal(x->binder.dom, y.binder.dom) && x->locals == y.locals &&
           equal(x->filter, y.filter) && equal(x->fpreds, y.fpreds);
  }
  if (const auto* x = std::get_if<UCall>(&a->node)) {
    const auto& y = std::get<UCall>(b->node);
    if (x->name != y.name || x->args.size() != y.args.size()) return false;
    for (size_t i = 0; i < x->args.size(); ++i)
      if (!equal(x->args[i], y.args[i])) return false;
    return true;
  }
  const auto& x = std::get<USort>(a->node);
  const auto& y = std::get<USort>(b->node);
  return x.is_set == y.is_set && equal(x.term, y.term);
}

bool equal(const Program& a, const Program& b) {
  if (a.defs.size() != b.defs.size()) return false;
  for (size_t i = 0; i < a.defs.size(); ++i) {
    if (a.defs[i].name != b.defs[i].name || a.defs[i].params != b.defs[i].params ||
        !equal(a.defs[i].body, b.defs[i].body))
      return false;
  }
  return equal(a.query, b.query);
}

}  // namespace rq
