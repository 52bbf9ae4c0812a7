#include "rq/sorts.hpp"

#include <optional>
#include <set>

#include "rq/print.hpp"

namespace rq {

namespace {

// Union-find over free variable names plus two sort anchors. A class that
// absorbs both anchors is a clash.
class SortUf {
 public:
  SortUf() {
    find("#set");
    find("#isx");
  }

  std::string find(const std::string& k) {
    auto it = parent_.find(k);
    if (it == parent_.end()) {
      parent_[k] = k;
      return k;
    }
    if (it->second == k) return k;
    std::string r = find(it->second);
    parent_[k] = r;
    return r;
  }

  void merge(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra == rb) return;
    // Keep anchors as roots so sort lookups stay O(1).
    if (rb == "#set" || rb == "#isx") std::swap(ra, rb);
    parent_[rb] = ra;
  }

  bool same(const std::string& a, const std::string& b) { return find(a) == find(b); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : parent_)
      if (k[0] != '#') out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, std::string> parent_;
};

struct Walker {
  SortUf uf;
  std::vector<std::string> clashes;
  std::map<std::string, UVar> vars;           // free-variable key -> variable
  std::vector<std::set<std::string>> scopes;  // bound control vars / locals

  // Only plain names can be bound; renamed variables (fresh_id set) come
  // from definition expansion of free variables.
  bool is_bound(const UVar& v) const {
    if (v.fresh_id) return false;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
      if (it->count(v.name)) return true;
    return false;
  }

  void clash(const std::string& what) { clashes.push_back(what); }

  std::string free_key(const UVar& v) {
    std::string key = "v:" + var_key(v);
    vars.emplace(var_key(v), v);
    return key;
  }

  // A "handle" is an anchor or a free-variable key.
  std::string handle(const SurTermPtr& t) {
    if (const auto* v = std::get_if<UVar>(&t->node)) {
      if (is_bound(*v)) return "#isx";  // control vars and locals are X-sorted
      return free_key(*v);
    }
    if (std::holds_alternative<UAtom>(t->node) || std::holds_alternative<UInt>(t->node) ||
        std::holds_alternative<UPair>(t->node) || std::holds_alternative<UArith>(t->node))
      return "#isx";
    return "#set";  // UEmpty / UExt / URis
  }

  void expect(const SurTermPtr& t, Sort sort) {
    const char* anchor = sort == Sort::Set ? "#set" : "#isx";
    if (const auto* v = std::get_if<UVar>(&t->node)) {
      if (is_bound(*v)) return;  // X-sorted; set use is the (†) domain feature
      uf.merge(free_key(*v), anchor);
      return;
    }
    std::string h = handle(t);
    if (h != anchor)
      clash("term '" + print(t) + "' used in a " +
            (sort == Sort::Set ? "set" : "element") + " position");
  }

  void term(const SurTermPtr& t, Sort sort) {
    expect(t, sort);
    if (const auto* p = std::get_if<UPair>(&t->node)) {
      term(p->first, Sort::X);
      term(p->second, Sort::X);
    } else if (const auto* a = std::get_if<UArith>(&t->node)) {
      for (const auto& arg : a->args) term(arg, Sort::X);
    } else if (const auto* e = std::get_if<UExt>(&t->node)) {
      for (const auto& el : e->elems) term(el, Sort::X);
      if (e->tail) term(e->tail, Sort::Set);
    } else if (const auto* r = std::get_if<URis>(&t->node)) {
      term(r->dom, Sort::Set);
      scopes.push_back({});
      bind_ctrl(r->ctrl);
      for (const auto& l : r->locals) scopes.back().insert(l);
      walk(r->filter);
      if (r->fpreds) walk(r->fpreds);
      scopes.pop_back();
    }
  }

  void bind_ctrl(const SurTermPtr& ctrl) {
    if (const auto* v = std::get_if<UVar>(&ctrl->node)) {
      scopes.back().insert(v->name);
    } else if (const auto* p = std::get_if<UPair>(&ctrl->node)) {
      bind_ctrl(p->first);
      bind_ctrl(p->second);
    }
  }

  void walk(const SurFormulaPtr& f) {
    if (const auto* x = std::get_if<UAnd>(&f->node)) {
      walk(x->lhs);
      walk(x->rhs);
    } else if (const auto* x = std::get_if<UOr>(&f->node)) {
      walk(x->lhs);
      walk(x->rhs);
    } else if (const auto* x = std::get_if<UNeg>(&f->node)) {
      walk(x->body);
    } else if (const auto* x = std::get_if<UImplies>(&f->node)) {
      walk(x->lhs);
      walk(x->rhs);
    } else if (const auto* x = std::get_if<URel>(&f->node)) {
      if (x->op == "in" || x->op == "nin") {
        term(x->lhs, Sort::X);
        term(x->rhs, Sort::Set);
      } else if (x->op == "=") {
        // Set or X equality; both sides share a sort.
        std::string a = handle(x->lhs), b = handle(x->rhs);
        uf.merge(a, b);
        if (uf.same("#set", "#isx"))
          clash("equality between a set term and an element term: " + print(f));
        // Recurse with the sort each side's shape already dictates.
        descend_eq(x->lhs);
        descend_eq(x->rhs);
      } else {  // neq, =<, <, >=, > are theory predicates over X terms
        term(x->lhs, Sort::X);
        term(x->rhs, Sort::X);
      }
    } else if (const auto* x = std::get_if<USubset>(&f->node)) {
      term(x->lhs, Sort::Set);
      term(x->ris, Sort::Set);
    } else if (const auto* x = std::get_if<URq>(&f->node)) {
      // The domain may be a bound control variable of an enclosing RQ.
      if (const auto* v = std::get_if<UVar>(&x->binder.dom->node); !v || !is_bound(*v))
        term(x->binder.dom, Sort::Set);
      scopes.push_back({});
      bind_ctrl(x->binder.ctrl);
      for (const auto& l : x->locals) scopes.back().insert(l);
      walk(x->filter);
      if (x->fpreds) walk(x->fpreds);
      scopes.pop_back();
    } else if (const auto* x = std::get_if<UCall>(&f->node)) {
      // Functional-predicate or defined call; arguments sit in X positions
      // by the theory discipline (defined calls are expanded before this).
      for (const auto& a : x->args) term(a, Sort::X);
    } else if (const auto* x = std::get_if<USort>(&f->node)) {
      term(x->term, x->is_set ? Sort::Set : Sort::X);
    }
  }

  void descend_eq(const SurTermPtr& t) {
    if (std::holds_alternative<UVar>(t->node)) return;
    Sort s = handle(t) == "#set" ? Sort::Set : Sort::X;
    term(t, s);
  }
};

}  // namespace

SortReport infer_sorts(const SurFormulaPtr& f) {
  Walker w;
  w.walk(f);
  SortReport out;
  out.clashes = w.clashes;
  if (w.uf.same("#set", "#isx")) {
    out.ok = false;
    if (out.clashes.empty()) out.clashes.push_back("a variable is used at both sorts");
  }
  out.vars = w.vars;
  for (const std::string& key : w.uf.names()) {
    std::string name = key.substr(2);
    bool is_set = w.uf.same(key, "#set");
    bool is_x = w.uf.same(key, "#isx");
    if (is_set && is_x) {
      out.ok = false;
      out.clashes.push_back("variable " + name + " is used as both a set and an element");
      continue;
    }
    out.free_sorts[name] = is_set ? Sort::Set : Sort::X;  // unconstrained defaults to X
  }
  if (!out.clashes.empty()) out.ok = false;
  return out;
}

namespace {

void existing_sort_atoms(const SurFormulaPtr& f, std::set<std::string>& out) {
  if (const auto* x = std::get_if<UAnd>(&f->node)) {
    existing_sort_atoms(x->lhs, out);
    existing_sort_atoms(x->rhs, out);
  } else if (const auto* x = std::get_if<USort>(&f->node)) {
    if (const auto* v = std::get_if<UVar>(&x->term->node)) out.insert(var_key(*v));
  }
}

}  // namespace

SurFormulaPtr sort_infer(const SurFormulaPtr& f) {
  SortReport rep = infer_sorts(f);
  std::set<std::string> already;
  existing_sort_atoms(f, already);
  SurFormulaPtr out = f;
  for (const auto& [key, sort] : rep.free_sorts) {
    if (already.count(key)) continue;
    auto var = mk_sur_term({rep.vars.at(key), {}});
    auto atom = mk_sur_formula({USort{sort == Sort::Set, var}, {}});
    out = mk_sur_formula({UAnd{out, atom}, {}});
  }
  return out;
}

SurFormulaPtr sort_check(const SurFormulaPtr& f) {
  SortReport rep = infer_sorts(f);
  if (!rep.ok) return mk_sur_formula({UFalse{}, {}});
  return f;
}

}  // namespace rq
