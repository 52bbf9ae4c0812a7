#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rq/errors.hpp"
#include "rq/formula.hpp"
#include "rq/value.hpp"

namespace rq {

/// Verdict of a theory solver call. A sat model assigns every free variable
/// of the checked conjunction a concrete value.
struct TheoryVerdict {
  bool sat = false;
  Valuation model;
};

/// A predicate of arity n+1 whose last argument is uniquely determined by the
/// first n (e.g. sum(x,y,n) meaning n = x + y).
struct FunctionalPredicate {
  std::string name;
  size_t inputs;  // arity is inputs + 1
  std::function<Value(const std::vector<Value>&)> eval;
};

/// The pluggable theory X: a decision procedure for conjunctions of literals,
/// literal negation, functional predicates and an evaluator hook for the
/// oracle. Implementations are stateless per call so backtracking in the
/// rewrite engine cannot leak state across branches.
class Theory {
 public:
  virtual ~Theory() = default;

  virtual std::string name() const = 0;
  virtual bool knows(const std::string& pred, size_t arity) const = 0;

  /// Decides a pure conjunction. `avoid_atoms` lists atom names the model
  /// must not invent (so fresh witness atoms stay distinct from everything
  /// in the query). Throws TheoryError on unknown literal symbols.
  virtual TheoryVerdict sat(const std::vector<CTheory>& lits,
                            const std::set<std::string>& avoid_atoms = {}) const = 0;

  /// Complement of a literal: for all valuations, exactly one of l and
  /// negate(l) holds. Throws TheoryError when no complement is registered.
  virtual CTheory negate(const CTheory& lit) const = 0;

  /// Throws TheoryError listing the registered functional predicates when
  /// the name is unknown.
  virtual const FunctionalPredicate& fp_lookup(const std::string& name) const = 0;
  virtual std::vector<std::string> fp_names() const = 0;

  /// Truth of one literal under a concrete valuation (oracle hook).
  virtual bool eval_lit(const CTheory& lit, const Valuation& v) const = 0;

  /// True when a disequality between a variable and a pair term is vacuous
  /// because the theory's models never assign pair values to variables.
  virtual bool pair_disequality_trivial() const = 0;

  /// Canonical value for variables the model does not mention.
  virtual Value canonical_value(size_t index) const = 0;
};

using TheoryPtr = std::shared_ptr<const Theory>;

/// Bundled theories: "eq" (equality over uninterpreted atoms) and "lia"
/// (linear integer arithmetic). Throws InputError on unknown names.
TheoryPtr make_theory(const std::string& name);
std::vector<std::string> theory_names();

/// Evaluates an element term under a valuation: variables looked up,
/// arithmetic over integers. Throws EvalError on unbound variables or
/// non-integer arithmetic operands.
Value eval_xterm(const XTermPtr& t, const Valuation& v);

}  // namespace rq
