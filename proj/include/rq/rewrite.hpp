#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "rq/subst.hpp"
#include "rq/theory.hpp"

namespace rq {

/// One rewrite-rule application: `<rule-id> <constraint-before> ==> <result>`.
struct TraceEntry {
  std::string rule;
  std::string before;
  std::string after;
};
using TraceSink = std::function<void(const TraceEntry&)>;

/// The nondeterministic rewriting state: set constraints in focus, the
/// accumulated theory conjunction, formulas not yet decomposed, and the
/// bindings collected by the substitution rule.
struct SolverState {
  std::vector<Constraint> set_cs;
  std::vector<CTheory> x_lits;
  std::deque<FormulaPtr> pending;
  Subst bindings;
  bool failed = false;
  bool budget_hit = false;
  long long steps = 0;
  bool x_dirty = false;
};

struct EngineConfig {
  TheoryPtr theory;
  long long max_steps = 0;  // per branch; 0 means unlimited
  TraceSink trace;          // may be empty
};

/// Definitional expansion of a restricted quantifier (foreach to the RUQ
/// subset form, exists to a fresh-witness membership).
FormulaPtr desugar_rq(const CRq& rq);

class Engine {
 public:
  explicit Engine(EngineConfig cfg) : cfg_(std::move(cfg)) {}

  /// Runs rewriting to quiescence. Disjunctive rule results fork the state:
  /// the first alternative continues in st, the others are appended to
  /// `alternatives` (explore them LIFO for left-to-right, depth-first
  /// order). On return st is failed, budget-hit, or irreducible.
  void quiesce(SolverState& st, std::vector<SolverState>& alternatives) const;

  /// Deterministic single-state variant for tests: at each disjunction only
  /// the first alternative is followed.
  SolverState step(SolverState st) const;

  const EngineConfig& config() const { return cfg_; }

  // Single-rule entry points (index into st.set_cs); used by the one-rule
  // application harness.
  bool try_subset(SolverState& st, size_t idx) const;
  bool try_membership(SolverState& st, size_t idx) const;
  bool try_equality(SolverState& st, size_t idx) const;

 private:
  EngineConfig cfg_;

  bool decompose_one(SolverState& st, std::vector<SolverState>* alternatives) const;
  void route_constraint(SolverState& st, Constraint c) const;
  void route_theory_lit(SolverState& st, const CTheory& lit) const;
  void normalize_x(SolverState& st) const;
  bool fire_one_rule(SolverState& st) const;
  void apply_binding(SolverState& st, const Var& v, const SetTermPtr& t) const;
  void apply_binding(SolverState& st, const Var& v, const XTermPtr& t) const;
  bool occurs_elsewhere(const SolverState& st, const Var& v, size_t skip_idx) const;
  void trace(const std::string& rule, const std::string& before,
             const std::string& after) const;
  bool count_step(SolverState& st) const;
};

/// Builds a state from a goal formula (asserted, not yet decomposed).
SolverState make_state(const FormulaPtr& goal);

/// Def-13 irreducibility: every set constraint is a variable equation whose
/// variable occurs nowhere else, a variable-domain RUQ subset, or (extension)
/// a nin over a variable.
bool is_irreducible(const SolverState& st);

/// The remaining pure set part (bindings as equations plus residual
/// constraints), for answers and tests.
std::vector<Constraint> irreducible_part(const SolverState& st);

/// Applies the first matching rewrite rule to `c` once, in a state holding
/// `context` as the rest of the formula. Returns the applied rule id ("1"
/// through "14", "abs", "nin1".."nin3"; "irreducible" when no rule applies)
/// and the resulting branches, each a formula conjoining the rule result
/// with the context (so equisatisfiability of input and branch union can be
/// checked externally).
struct RuleApplication {
  std::string rule;
  std::vector<FormulaPtr> branches;
};
RuleApplication apply_rule_once(const Constraint& c, const FormulaPtr& context,
                                const TheoryPtr& theory);

}  // namespace rq
