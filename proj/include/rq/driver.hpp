#pragma once

#include <memory>
#include <optional>

#include "rq/rewrite.hpp"
#include "rq/rqlayer.hpp"

namespace rq {

struct SolveOptions {
  std::string theory = "lia";
  long long max_steps = -1;  // -1: by classification (unlimited in-fragment,
                             // 100000 per branch outside); 0: unlimited
  TraceSink trace;
};

/// One solution: the irreducible set part (Def.-13 shape, bindings included),
/// the theory model of the X part, and a concrete valuation for every query
/// variable (unbound set variables map to the empty set).
struct Answer {
  std::vector<Constraint> irreducible_s;
  std::vector<CTheory> x_residue;
  Subst bindings;
  Valuation theory_model;
  Valuation valuation;
  /// Query-variable bindings in display form (theory equalities folded in),
  /// in query order; unbound variables are omitted.
  std::vector<std::pair<Var, std::string>> display_bindings;
};

enum class Status { Sat, Unsat, Unknown };

struct Verdict {
  Status status = Status::Unsat;
  std::vector<Answer> answers;
  long long budget_branches = 0;  // branches stopped by the step budget
  std::string unknown_reason;
};

/// A query after definition expansion, negation elimination, sort
/// resolution, lowering and classification.
struct PreparedQuery {
  Program program;
  SurFormulaPtr expanded;
  FormulaPtr goal;  // lowered, RQ nodes symbolic
  std::map<std::string, Var> query_vars;
  TheoryPtr theory;
  ClassifyReport classification;
  bool sort_false = false;
  std::vector<std::string> sort_clashes;
};

PreparedQuery prepare(const Program& program, const SolveOptions& opts);

/// Lazy answer stream: depth-first, left-to-right over the choice points.
class SolutionStream {
 public:
  SolutionStream(const PreparedQuery& q, const SolveOptions& opts);
  ~SolutionStream();
  SolutionStream(SolutionStream&&) noexcept;

  /// Next answer, or nullopt when the search space is exhausted (or the
  /// query was sort-rejected). Answers are deduplicated syntactically by
  /// their valuation.
  std::optional<Answer> next();

  long long budget_branches() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs the solver collecting up to max_answers answers.
Verdict sat_rq(const PreparedQuery& q, const SolveOptions& opts, size_t max_answers = 1);

/// Convenience: prepare + solve from a parsed program.
Verdict solve_program(const Program& program, const SolveOptions& opts,
                      size_t max_answers = 1);

enum class ProveStatus { Proved, Counterexample, Unknown };
struct ProveResult {
  ProveStatus status = ProveStatus::Unknown;
  std::optional<Answer> witness;
  Verdict verdict;
};

/// The invariance-lemma workflow: solve the (already negated) query; Unsat
/// means the lemma is proved, Sat yields a counterexample witness.
ProveResult prove(const Program& program, const SolveOptions& opts);

}  // namespace rq
