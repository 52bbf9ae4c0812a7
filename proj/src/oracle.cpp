#include "rq/oracle.hpp"

#include <algorithm>

#include "rq/print.hpp"

namespace rq {

namespace {

Value eval_set(const SetTermPtr& t, const Valuation& v) {
  if (std::holds_alternative<SEmpty>(t->node)) return Value::set({});
  if (const auto* sv = std::get_if<SVar>(&t->node)) {
    auto it = v.find(sv->var);
    if (it == v.end())
      throw EvalError("unbound set variable in evaluation: " + print(sv->var));
    if (!it->second.is_set())
      throw EvalError("set variable bound to a non-set value: " + it->second.str());
    return it->second;
  }
  const auto& c = std::get<SCons>(t->node);
  Value rest = eval_set(c.rest, v);
  std::vector<Value> elems = rest.set_elems();
  elems.push_back(eval_xterm(c.elem, v));
  return Value::set(std::move(elems));
}

// Binds variables in a shared environment and restores the previous state on
// scope exit, so quantifier evaluation avoids copying the valuation per
// element.
class EnvGuard {
 public:
  explicit EnvGuard(Valuation& env) : env_(env) {}
  EnvGuard(const EnvGuard&) = delete;
  ~EnvGuard() {
    for (auto it = saved_.rbegin(); it != saved_.rend(); ++it) {
      if (it->second)
        env_[it->first] = std::move(*it->second);
      else
        env_.erase(it->first);
    }
  }
  void set(const Var& v, Value val) {
    auto it = env_.find(v);
    saved_.emplace_back(v, it == env_.end() ? std::nullopt
                                            : std::optional<Value>(it->second));
    env_[v] = std::move(val);
  }

 private:
  Valuation& env_;
  std::vector<std::pair<Var, std::optional<Value>>> saved_;
};

// Destructures a concrete value against a control term; returns false on a
// structural mismatch (the value then simply fails the RIS pattern).
bool destructure(const CtrlTerm& ctrl, const Value& val, EnvGuard& guard) {
  if (const Var* v = std::get_if<Var>(&ctrl.node)) {
    guard.set(*v, val);
    return true;
  }
  const auto& p = std::get<std::shared_ptr<const CtrlPair>>(ctrl.node);
  if (!val.is_pair()) return false;
  return destructure(p->first, val.pair_first(), guard) &&
         destructure(p->second, val.pair_second(), guard);
}

bool eval_rec(const FormulaPtr& f, Valuation& env, const Theory& th);

// Computes the locals of an extended RIS instance from its functional
// predicates, then evaluates the filter: the value of "exists locals
// (fpreds and filter)". A functional predicate applied outside its domain
// makes the instance false.
bool instance_holds(const std::vector<Var>& locals, const FormulaPtr& filter,
                    const FormulaPtr& fpreds, Valuation& env, EnvGuard& guard,
                    const Theory& th) {
  if (!locals.empty() || !is_true(fpreds)) {
    std::vector<FormulaPtr> parts;
    flatten_and(fpreds, parts);
    std::set<Var> pending(locals.begin(), locals.end());
    std::vector<const CTheory*> calls;
    for (const auto& part : parts) {
      const auto* atom = std::get_if<FAtom>(&part->node);
      const CTheory* lit = atom ? std::get_if<CTheory>(&atom->c) : nullptr;
      if (!lit)
        throw EvalError("functional-predicate section must be a conjunction of "
                        "functional predicate atoms");
      calls.push_back(lit);
    }
    bool progress = true;
    while (!pending.empty() && progress) {
      progress = false;
      for (const CTheory* lit : calls) {
        const FunctionalPredicate& fp = th.fp_lookup(lit->pred);
        const XTermPtr& result = lit->args.back();
        const XVar* rv = as_xvar(result);
        if (!rv || !pending.count(rv->var)) continue;
        std::vector<Value> inputs;
        bool ready = true;
        for (size_t i = 0; i + 1 < lit->args.size(); ++i) {
          for (const Var& w : free_vars(lit->args[i]))
            if (!env.count(w)) {
              ready = false;
              break;
            }
          if (!ready) break;
          inputs.push_back(eval_xterm(lit->args[i], env));
        }
        if (!ready) continue;
        try {
          guard.set(rv->var, fp.eval(inputs));
        } catch (const EvalError&) {
          return false;  // input outside the predicate's domain
        }
        pending.erase(rv->var);
        progress = true;
      }
    }
    if (!pending.empty())
      throw EvalError("functional predicates do not determine all locals");
    // Re-check the non-defining functional atoms too.
    for (const CTheory* lit : calls) {
      try {
        if (!th.eval_lit(*lit, env)) return false;
      } catch (const EvalError&) {
        return false;
      }
    }
  }
  return eval_rec(filter, env, th);
}

bool rq_holds(Quant quant, const CtrlTerm& ctrl, const Value& dom,
              const std::vector<Var>& locals, const FormulaPtr& filter,
              const FormulaPtr& fpreds, Valuation& env, const Theory& th) {
  for (const Value& elem : dom.set_elems()) {
    bool holds;
    {
      EnvGuard guard(env);
      holds = destructure(ctrl, elem, guard) &&
              instance_holds(locals, filter, fpreds, env, guard, th);
    }
    if (quant == Quant::Forall && !holds) return false;
    if (quant == Quant::Exists && holds) return true;
  }
  return quant == Quant::Forall;
}

// The set denoted by a RIS: elements of the domain that match the control
// term and pass the filter.
Value eval_ris(const RisTerm& r, Valuation& env, const Theory& th) {
  Value dom = eval_set(r.dom, env);
  std::vector<Value> kept;
  for (const Value& elem : dom.set_elems()) {
    EnvGuard guard(env);
    if (destructure(r.ctrl, elem, guard) &&
        instance_holds(r.locals, r.filter, r.fpreds, env, guard, th))
      kept.push_back(elem);
  }
  return Value::set(std::move(kept));
}

bool subset_value(const Value& a, const Value& b) {
  for (const Value& x : a.set_elems())
    if (!b.set_contains(x)) return false;
  return true;
}

bool eval_rec(const FormulaPtr& f, Valuation& env, const Theory& th) {
  if (is_true(f)) return true;
  if (is_false(f)) return false;
  if (const auto* x = std::get_if<FAnd>(&f->node))
    return eval_rec(x->lhs, env, th) && eval_rec(x->rhs, env, th);
  if (const auto* x = std::get_if<FOr>(&f->node))
    return eval_rec(x->lhs, env, th) || eval_rec(x->rhs, env, th);
  const Constraint& c = std::get<FAtom>(f->node).c;
  if (const auto* e = std::get_if<CEqSet>(&c))
    return eval_set(e->lhs, env) == eval_set(e->rhs, env);
  if (const auto* e = std::get_if<CIn>(&c))
    return eval_set(e->set, env).set_contains(eval_xterm(e->elem, env));
  if (const auto* e = std::get_if<CNin>(&c))
    return !eval_set(e->set, env).set_contains(eval_xterm(e->elem, env));
  if (const auto* e = std::get_if<CSubsetRuq>(&c))
    return subset_value(eval_set(e->lhs, env), eval_ris(e->ris, env, th));
  if (const auto* e = std::get_if<CTheory>(&c)) return th.eval_lit(*e, env);
  const auto& rq = std::get<CRq>(c);
  Value dom = eval_set(rq.dom, env);
  return rq_holds(rq.quant, rq.ctrl, dom, rq.locals, rq.filter, rq.fpreds, env, th);
}

void collect_atom_names(const FormulaPtr& f, std::set<std::string>& out);

void collect_atom_names(const XTermPtr& t, std::set<std::string>& out) {
  if (const auto* a = std::get_if<XAtom>(&t->node)) {
    out.insert(a->name);
  } else if (const auto* p = std::get_if<XPair>(&t->node)) {
    collect_atom_names(p->first, out);
    collect_atom_names(p->second, out);
  } else if (const auto* ap = std::get_if<XApply>(&t->node)) {
    for (const auto& arg : ap->args) collect_atom_names(arg, out);
  }
}
void collect_atom_names(const SetTermPtr& t, std::set<std::string>& out) {
  if (const auto* c = std::get_if<SCons>(&t->node)) {
    collect_atom_names(c->elem, out);
    collect_atom_names(c->rest, out);
  }
}
void collect_atom_names(const FormulaPtr& f, std::set<std::string>& out) {
  if (const auto* x = std::get_if<FAnd>(&f->node)) {
    collect_atom_names(x->lhs, out);
    collect_atom_names(x->rhs, out);
  } else if (const auto* x = std::get_if<FOr>(&f->node)) {
    collect_atom_names(x->lhs, out);
    collect_atom_names(x->rhs, out);
  } else if (const auto* x = std::get_if<FAtom>(&f->node)) {
    const Constraint& c = x->c;
    if (const auto* e = std::get_if<CEqSet>(&c)) {
      collect_atom_names(e->lhs, out);
      collect_atom_names(e->rhs, out);
    } else if (const auto* e = std::get_if<CIn>(&c)) {
      collect_atom_names(e->elem, out);
      collect_atom_names(e->set, out);
    } else if (const auto* e = std::get_if<CNin>(&c)) {
      collect_atom_names(e->elem, out);
      collect_atom_names(e->set, out);
    } else if (const auto* e = std::get_if<CSubsetRuq>(&c)) {
      collect_atom_names(e->lhs, out);
      collect_atom_names(e->ris.dom, out);
      collect_atom_names(e->ris.filter, out);
      collect_atom_names(e->ris.fpreds, out);
    } else if (const auto* e = std::get_if<CTheory>(&c)) {
      for (const auto& a : e->args) collect_atom_names(a, out);
    } else {
      const auto& rq = std::get<CRq>(c);
      collect_atom_names(rq.dom, out);
      collect_atom_names(rq.filter, out);
      collect_atom_names(rq.fpreds, out);
    }
  }
}

}  // namespace

bool eval(const FormulaPtr& f, const Valuation& v, const Theory& th) {
  Valuation env = v;
  return eval_rec(f, env, th);
}

Value eval_setterm(const SetTermPtr& t, const Valuation& v) { return eval_set(t, v); }

std::vector<Value> element_pool(const FormulaPtr& f, const Universe& u, const Theory& th) {
  std::vector<Value> pool;
  if (th.name() == "lia") {
    for (long long i = u.int_lo; i <= u.int_hi; ++i) pool.push_back(Value::integer(i));
  } else {
    std::set<std::string> atoms;
    collect_atom_names(f, atoms);
    size_t pad = 1;
    while (atoms.size() < u.atoms) {
      std::string name = "u" + std::to_string(pad++);
      atoms.insert(name);
    }
    for (const auto& a : atoms) pool.push_back(Value::atom(a));
  }
  if (u.include_pairs) {
    std::vector<Value> scalars = pool;
    for (const Value& a : scalars)
      for (const Value& b : scalars) pool.push_back(Value::pair(a, b));
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<Value> set_pool(const std::vector<Value>& elements, size_t max_card) {
  // All subsets up to max_card, by cardinality then lexicographically.
  std::vector<Value> out{Value::set({})};
  std::vector<std::vector<size_t>> frontier{{}};
  for (size_t card = 1; card <= max_card && card <= elements.size(); ++card) {
    std::vector<std::vector<size_t>> next;
    for (const auto& idxs : frontier) {
      size_t start = idxs.empty() ? 0 : idxs.back() + 1;
      for (size_t i = start; i < elements.size(); ++i) {
        auto ext = idxs;
        ext.push_back(i);
        next.push_back(ext);
      }
    }
    for (const auto& idxs : next) {
      std::vector<Value> elems;
      for (size_t i : idxs) elems.push_back(elements[i]);
      out.push_back(Value::set(std::move(elems)));
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<Valuation> enumerate_models(const FormulaPtr& f, const Universe& u,
                                        const Theory& th) {
  std::set<Var> fv = free_vars(f);
  std::vector<Var> vars(fv.begin(), fv.end());
  return enumerate_models_over(f, u, th, vars, element_pool(f, u, th));
}

std::vector<Valuation> enumerate_models_over(const FormulaPtr& f, const Universe& u,
                                             const Theory& th,
                                             const std::vector<Var>& vars,
                                             const std::vector<Value>& elems) {
  std::vector<Value> sets = set_pool(elems, u.max_set_card);

  double space = 1;
  for (const Var& v : vars)
    space *= static_cast<double>(v.sort == Sort::Set ? sets.size() : elems.size());
  if (space > static_cast<double>(u.cap))
    throw EvalError("enumeration space too large; use a smaller universe");

  std::vector<Valuation> out;
  std::vector<size_t> idx(vars.size(), 0);
  Valuation val;
  for (size_t i = 0; i < vars.size(); ++i) {
    const auto& pool = vars[i].sort == Sort::Set ? sets : elems;
    val[vars[i]] = pool[idx[i]];
  }
  for (;;) {
    if (eval_rec(f, val, th)) out.push_back(val);
    // Odometer: last variable varies fastest; only changed slots update.
    size_t i = vars.size();
    for (;;) {
      if (i == 0) return out;
      --i;
      const auto& pool = vars[i].sort == Sort::Set ? sets : elems;
      if (++idx[i] < pool.size()) {
        val[vars[i]] = pool[idx[i]];
        break;
      }
      idx[i] = 0;
      val[vars[i]] = pool[0];
      if (i == 0) return out;
    }
  }
}

}  // namespace rq
