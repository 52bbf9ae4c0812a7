#pragma once

#include <vector>

#include "rq/theory.hpp"

namespace rq {

/// Finite enumeration bounds for the brute-force model search.
struct Universe {
  size_t atoms = 3;            // distinct atoms in the element pool (theory eq)
  long long int_lo = -3;       // integer range (theory lia)
  long long int_hi = 3;
  size_t max_set_card = 3;     // cap on enumerated set cardinality
  bool include_pairs = false;  // add pairs of scalars to the element pool
  size_t cap = 4000000;        // maximum number of candidate valuations
};

/// Truth of a formula under a concrete valuation, by direct recursion on the
/// reference semantics: membership/subset/equality as set theory, RIS by
/// filtering the domain value through the (possibly nested) filter with
/// control-term destructuring, extended RIS via the functional-predicate
/// evaluators, theory literals via the plugin. Independent of the rewrite
/// rules. Throws EvalError on unbound variables.
bool eval(const FormulaPtr& f, const Valuation& v, const Theory& th);

/// Value of a set term under a valuation.
Value eval_setterm(const SetTermPtr& t, const Valuation& v);

/// Exactly the valuations of the free variables of f over the universe for
/// which eval returns true, in lexicographic order over a fixed variable
/// order (sets by cardinality then lexicographically). Throws EvalError when
/// the search space exceeds u.cap.
std::vector<Valuation> enumerate_models(const FormulaPtr& f, const Universe& u,
                                        const Theory& th);

/// Enumeration over an explicit variable list and element pool, for
/// solution-set comparisons across formulas with different free variables
/// (fresh rule variables are enumerated too, then projected away).
std::vector<Valuation> enumerate_models_over(const FormulaPtr& f, const Universe& u,
                                             const Theory& th,
                                             const std::vector<Var>& vars,
                                             const std::vector<Value>& elements);

/// The element pool the enumerator uses (exposed for tests and projections).
std::vector<Value> element_pool(const FormulaPtr& f, const Universe& u, const Theory& th);
std::vector<Value> set_pool(const std::vector<Value>& elements, size_t max_card);

}  // namespace rq
