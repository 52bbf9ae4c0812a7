#pragma once

#include <map>

#include "rq/formula.hpp"

namespace rq {

/// Sort-respecting, idempotent substitution. Binding a variable composes the
/// new pair into the existing map, so applying the substitution once is the
/// same as applying it twice. RIS-bound variables (control variables and
/// locals) are never substituted; capture is resolved by alpha-renaming the
/// binder, never by failing.
class Subst {
 public:
  bool empty() const { return xmap_.empty() && smap_.empty(); }

  void bind(const Var& v, XTermPtr t);
  void bind(const Var& v, SetTermPtr t);

  const std::map<Var, XTermPtr>& x_bindings() const { return xmap_; }
  const std::map<Var, SetTermPtr>& set_bindings() const { return smap_; }

  const XTermPtr* lookup_x(const Var& v) const;
  const SetTermPtr* lookup_set(const Var& v) const;

  XTermPtr apply(const XTermPtr& t) const;
  SetTermPtr apply(const SetTermPtr& t) const;
  FormulaPtr apply(const FormulaPtr& f) const;
  Constraint apply(const Constraint& c) const;
  RisTerm apply(const RisTerm& r) const;

 private:
  std::map<Var, XTermPtr> xmap_;
  std::map<Var, SetTermPtr> smap_;
};

/// Single-binding convenience used by rule instantiation.
Subst subst1(const Var& v, XTermPtr t);
Subst subst1(const Var& v, SetTermPtr t);

}  // namespace rq
