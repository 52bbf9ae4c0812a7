#include "rq/print.hpp"

#include <sstream>

namespace rq {

namespace {

// Formula precedence levels: implies < or < & < unit.
constexpr int kImplies = 1, kOr = 2, kAnd = 3, kUnit = 4;
// Term precedence: additive < multiplicative < primary.
constexpr int kAdd = 1, kMul = 2, kPrim = 3;

void put_sur_term(std::ostream& os, const SurTermPtr& t, int prec);
void put_sur_formula(std::ostream& os, const SurFormulaPtr& f, int prec);
void put_xterm(std::ostream& os, const XTermPtr& t, int prec);
void put_formula(std::ostream& os, const FormulaPtr& f, int prec);

void put_var(std::ostream& os, const std::string& name,
             const std::optional<std::uint64_t>& fresh_id) {
  if (fresh_id)
    os << "_N" << *fresh_id;
  else
    os << name;
}

// --- surface -----------------------------------------------------------------

void put_sur_term(std::ostream& os, const SurTermPtr& t, int prec) {
  if (const auto* v = std::get_if<UVar>(&t->node)) {
    put_var(os, v->name, v->fresh_id);
  } else if (const auto* a = std::get_if<UAtom>(&t->node)) {
    os << a->name;
  } else if (const auto* i = std::get_if<UInt>(&t->node)) {
    if (i->value < 0 && prec > kAdd) os << "(" << i->value << ")";
    else os << i->value;
  } else if (const auto* p = std::get_if<UPair>(&t->node)) {
    os << "[";
    put_sur_term(os, p->first, kAdd);
    os << ",";
    put_sur_term(os, p->second, kAdd);
    os << "]";
  } else if (const auto* ar = std::get_if<UArith>(&t->node)) {
    if (ar->args.size() == 1) {
      if (prec > kAdd) os << "(";
      os << "-";
      put_sur_term(os, ar->args[0], kPrim);
      if (prec > kAdd) os << ")";
      return;
    }
    int self = ar->op == "*" ? kMul : kAdd;
    if (prec > self) os << "(";
    put_sur_term(os, ar->args[0], self);
    os << " " << ar->op << " ";
    put_sur_term(os, ar->args[1], self + 1);
    if (prec > self) os << ")";
  } else if (std::holds_alternative<UEmpty>(t->node)) {
    os << "{}";
  } else if (const auto* e = std::get_if<UExt>(&t->node)) {
    os << "{";
    for (size_t i = 0; i < e->elems.size(); ++i) {
      if (i) os << ",";
      put_sur_term(os, e->elems[i], kAdd);
    }
    if (e->tail) {
      os << " / ";
      put_sur_term(os, e->tail, kAdd);
    }
    os << "}";
  } else {
    const auto& r = std::get<URis>(t->node);
    os << "ris(";
    put_sur_term(os, r.ctrl, kAdd);
    os << ", ";
    put_sur_term(os, r.dom, kAdd);
    if (!r.locals.empty() || r.fpreds) {
      os << ", [";
      for (size_t i = 0; i < r.locals.size(); ++i) {
        if (i) os << ",";
        os << r.locals[i];
      }
      os << "], ";
      put_sur_formula(os, r.filter, kImplies);
      os << ", ";
      put_sur_formula(os, r.fpreds, kImplies);
    } else {
      os << ", ";
      put_sur_formula(os, r.filter, kImplies);
    }
    os << ")";
  }
}

void put_sur_formula(std::ostream& os, const SurFormulaPtr& f, int prec) {
  if (std::holds_alternative<UTrue>(f->node)) {
    os << "true";
  } else if (std::holds_alternative<UFalse>(f->node)) {
    os << "false";
  } else if (const auto* x = std::get_if<UAnd>(&f->node)) {
    if (prec > kAnd) os << "(";
    put_sur_formula(os, x->lhs, kAnd);
    os << " & ";
    put_sur_formula(os, x->rhs, kAnd + 1);
    if (prec > kAnd) os << ")";
  } else if (const auto* x = std::get_if<UOr>(&f->node)) {
    if (prec > kOr) os << "(";
    put_sur_formula(os, x->lhs, kOr);
    os << " or ";
    put_sur_formula(os, x->rhs, kOr + 1);
    if (prec > kOr) os << ")";
  } else if (const auto* x = std::get_if<UNeg>(&f->node)) {
    os << "neg(";
    put_sur_formula(os, x->body, kImplies);
    os << ")";
  } else if (const auto* x = std::get_if<UImplies>(&f->node)) {
    if (prec > kImplies) os << "(";
    put_sur_formula(os, x->lhs, kOr);
    os << " implies ";
    put_sur_formula(os, x->rhs, kImplies);
    if (prec > kImplies) os << ")";
  } else if (const auto* x = std::get_if<URel>(&f->node)) {
    put_sur_term(os, x->lhs, kAdd);
    os << " " << x->op << " ";
    put_sur_term(os, x->rhs, kAdd);
  } else if (const auto* x = std::get_if<USubset>(&f->node)) {
    os << "subset(";
    put_sur_term(os, x->lhs, kAdd);
    os << ", ";
    put_sur_term(os, x->ris, kAdd);
    os << ")";
  } else if (const auto* x = std::get_if<URq>(&f->node)) {
    os << (x->quant == Quant::Forall ? "foreach(" : "exists(");
    put_sur_term(os, x->binder.ctrl, kAdd);
    os << " in ";
    put_sur_term(os, x->binder.dom, kAdd);
    os << ", ";
    if (!x->locals.empty() || x->fpreds) {
      os << "[";
      for (size_t i = 0; i < x->locals.size(); ++i) {
        if (i) os << ",";
        os << x->locals[i];
      }
      os << "], ";
      put_sur_formula(os, x->filter, kImplies);
      os << ", ";
      put_sur_formula(os, x->fpreds, kImplies);
    } else {
      put_sur_formula(os, x->filter, kImplies);
    }
    os << ")";
  } else if (const auto* x = std::get_if<UCall>(&f->node)) {
    os << x->name << "(";
    for (size_t i = 0; i < x->args.size(); ++i) {
      if (i) os << ",";
      put_sur_term(os, x->args[i], kAdd);
    }
    os << ")";
  } else {
    const auto& srt = std::get<USort>(f->node);
    os << (srt.is_set ? "set(" : "isx(");
    put_sur_term(os, srt.term, kAdd);
    os << ")";
  }
}

// --- core --------------------------------------------------------------------

void put_xterm(std::ostream& os, const XTermPtr& t, int prec) {
  if (const auto* v = std::get_if<XVar>(&t->node)) {
    put_var(os, v->var.name, v->var.fresh_id);
  } else if (const auto* a = std::get_if<XAtom>(&t->node)) {
    os << a->name;
  } else if (const auto* i = std::get_if<XInt>(&t->node)) {
    if (i->value < 0 && prec > kAdd) os << "(" << i->value << ")";
    else os << i->value;
  } else if (const auto* p = std::get_if<XPair>(&t->node)) {
    os << "[";
    put_xterm(os, p->first, kAdd);
    os << ",";
    put_xterm(os, p->second, kAdd);
    os << "]";
  } else {
    const auto& ap = std::get<XApply>(t->node);
    if (ap.args.size() == 1) {
      if (prec > kAdd) os << "(";
      os << "-";
      put_xterm(os, ap.args[0], kPrim);
      if (prec > kAdd) os << ")";
      return;
    }
    int self = ap.fn == "*" ? kMul : kAdd;
    if (prec > self) os << "(";
    put_xterm(os, ap.args[0], self);
    os << " " << ap.fn << " ";
    put_xterm(os, ap.args[1], self + 1);
    if (prec > self) os << ")";
  }
}

void put_set_term(std::ostream& os, const SetTermPtr& t) {
  if (std::holds_alternative<SEmpty>(t->node)) {
    os << "{}";
    return;
  }
  if (const auto* v = std::get_if<SVar>(&t->node)) {
    put_var(os, v->var.name, v->var.fresh_id);
    return;
  }
  ExtParts parts = ext_parts(t);
  os << "{";
  for (size_t i = 0; i < parts.elems.size(); ++i) {
    if (i) os << ",";
    put_xterm(os, parts.elems[i], kAdd);
  }
  if (!is_empty(parts.tail)) {
    os << " / ";
    put_set_term(os, parts.tail);
  }
  os << "}";
}

void put_ctrl(std::ostream& os, const CtrlTerm& c) {
  if (const Var* v = std::get_if<Var>(&c.node)) {
    put_var(os, v->name, v->fresh_id);
    return;
  }
  const auto& p = std::get<std::shared_ptr<const CtrlPair>>(c.node);
  os << "[";
  put_ctrl(os, p->first);
  os << ",";
  put_ctrl(os, p->second);
  os << "]";
}

void put_rq_tail(std::ostream& os, const std::vector<Var>& locals,
                 const FormulaPtr& filter, const FormulaPtr& fpreds) {
  if (!locals.empty() || !is_true(fpreds)) {
    os << "[";
    for (size_t i = 0; i < locals.size(); ++i) {
      if (i) os << ",";
      put_var(os, locals[i].name, locals[i].fresh_id);
    }
    os << "], ";
    put_formula(os, filter, kImplies);
    os << ", ";
    put_formula(os, fpreds, kImplies);
  } else {
    put_formula(os, filter, kImplies);
  }
}

void put_constraint(std::ostream& os, const Constraint& c) {
  if (const auto* e = std::get_if<CEqSet>(&c)) {
    put_set_term(os, e->lhs);
    os << " = ";
    put_set_term(os, e->rhs);
  } else if (const auto* e = std::get_if<CIn>(&c)) {
    put_xterm(os, e->elem, kAdd);
    os << " in ";
    put_set_term(os, e->set);
  } else if (const auto* e = std::get_if<CNin>(&c)) {
    put_xterm(os, e->elem, kAdd);
    os << " nin ";
    put_set_term(os, e->set);
  } else if (const auto* e = std::get_if<CSubsetRuq>(&c)) {
    os << "subset(";
    put_set_term(os, e->lhs);
    os << ", ris(";
    put_ctrl(os, e->ris.ctrl);
    os << ", ";
    put_set_term(os, e->ris.dom);
    os << ", ";
    put_rq_tail(os, e->ris.locals, e->ris.filter, e->ris.fpreds);
    os << "))";
  } else if (const auto* e = std::get_if<CTheory>(&c)) {
    static const std::set<std::string> infix = {"=", "neq", "=<", "<", ">=", ">"};
    if (e->args.size() == 2 && infix.count(e->pred)) {
      put_xterm(os, e->args[0], kAdd);
      os << " " << e->pred << " ";
      put_xterm(os, e->args[1], kAdd);
    } else {
      os << e->pred << "(";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) os << ",";
        put_xterm(os, e->args[i], kAdd);
      }
      os << ")";
    }
  } else {
    const auto& rqc = std::get<CRq>(c);
    os << (rqc.quant == Quant::Forall ? "foreach(" : "exists(");
    put_ctrl(os, rqc.ctrl);
    os << " in ";
    put_set_term(os, rqc.dom);
    os << ", ";
    put_rq_tail(os, rqc.locals, rqc.filter, rqc.fpreds);
    os << ")";
  }
}

void put_formula(std::ostream& os, const FormulaPtr& f, int prec) {
  if (is_true(f)) {
    os << "true";
  } else if (is_false(f)) {
    os << "false";
  } else if (const auto* x = std::get_if<FAnd>(&f->node)) {
    if (prec > kAnd) os << "(";
    put_formula(os, x->lhs, kAnd);
    os << " & ";
    put_formula(os, x->rhs, kAnd + 1);
    if (prec > kAnd) os << ")";
  } else if (const auto* x = std::get_if<FOr>(&f->node)) {
    if (prec > kOr) os << "(";
    put_formula(os, x->lhs, kOr);
    os << " or ";
    put_formula(os, x->rhs, kOr + 1);
    if (prec > kOr) os << ")";
  } else {
    put_constraint(os, std::get<FAtom>(f->node).c);
  }
}

}  // namespace

std::string print(const Var& v) {
  std::ostringstream os;
  put_var(os, v.name, v.fresh_id);
  return os.str();
}
std::string print(const SurTermPtr& t) {
  std::ostringstream os;
  put_sur_term(os, t, kAdd);
  return os.str();
}
std::string print(const SurFormulaPtr& f) {
  std::ostringstream os;
  put_sur_formula(os, f, kImplies);
  return os.str();
}
std::string print(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.defs) {
    os << d.name << "(";
    for (size_t i = 0; i < d.params.size(); ++i) {
      if (i) os << ",";
      os << d.params[i];
    }
    os << ") :- ";
    put_sur_formula(os, d.body, kImplies);
    os << ".\n";
  }
  put_sur_formula(os, p.query, kImplies);
  os << ".\n";
  return os.str();
}

std::string print(const XTermPtr& t) {
  std::ostringstream os;
  put_xterm(os, t, kAdd);
  return os.str();
}
std::string print(const SetTermPtr& t) {
  std::ostringstream os;
  put_set_term(os, t);
  return os.str();
}
std::string print(const CtrlTerm& c) {
  std::ostringstream os;
  put_ctrl(os, c);
  return os.str();
}
std::string print(const Constraint& c) {
  std::ostringstream os;
  put_constraint(os, c);
  return os.str();
}
std::string print(const FormulaPtr& f) {
  std::ostringstream os;
  put_formula(os, f, kImplies);
  return os.str();
}

}  // namespace rq
