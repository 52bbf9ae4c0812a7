#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rq/driver.hpp"
#include "rq/oracle.hpp"
#include "rq/parse.hpp"
#include "rq/print.hpp"

namespace py = pybind11;

namespace {

rq::SolveOptions options(const std::string& theory, long long max_steps) {
  rq::SolveOptions opts;
  opts.theory = theory;
  opts.max_steps = max_steps;
  return opts;
}

py::dict answer_dict(const rq::Answer& a) {
  py::dict out;
  py::dict bindings;
  for (const auto& [v, text] : a.display_bindings) bindings[py::str(rq::print(v))] = text;
  out["bindings"] = bindings;
  py::list residue;
  for (const auto& c : a.irreducible_s) residue.append(rq::print(c));
  out["residue"] = residue;
  py::dict model;
  for (const auto& [v, val] : a.theory_model) model[py::str(rq::print(v))] = val.str();
  out["model"] = model;
  py::dict valuation;
  for (const auto& [v, val] : a.valuation) valuation[py::str(rq::print(v))] = val.str();
  out["valuation"] = valuation;
  return out;
}

py::dict solve(const std::string& text, const std::string& theory, long long max_steps,
               size_t max_solutions) {
  rq::Program program = rq::parse_program(text);
  rq::SolveOptions opts = options(theory, max_steps);
  rq::Verdict v = rq::solve_program(program, opts, max_solutions);
  py::dict out;
  out["verdict"] = v.status == rq::Status::Sat     ? "sat"
                   : v.status == rq::Status::Unsat ? "unsat"
                                                   : "unknown";
  py::list answers;
  for (const auto& a : v.answers) answers.append(answer_dict(a));
  out["answers"] = answers;
  if (v.status == rq::Status::Unknown) out["reason"] = v.unknown_reason;
  return out;
}

py::dict prove(const std::string& text, const std::string& theory, long long max_steps) {
  rq::Program program = rq::parse_program(text);
  rq::ProveResult r = rq::prove(program, options(theory, max_steps));
  py::dict out;
  out["result"] = r.status == rq::ProveStatus::Proved           ? "proved"
                  : r.status == rq::ProveStatus::Counterexample ? "counterexample"
                                                                : "unknown";
  if (r.witness) out["counterexample"] = answer_dict(*r.witness);
  return out;
}

py::dict classify_text(const std::string& text, const std::string& theory) {
  rq::Program program = rq::parse_program(text);
  rq::PreparedQuery q = rq::prepare(program, options(theory, -1));
  py::dict out;
  out["fragment"] = rq::fragment_name(q.classification.fragment);
  auto node = [](const rq::DomainNode& n) {
    py::dict d;
    d["conjunct"] = n.conjunct;
    d["index"] = n.index;
    d["quant"] = n.quant == rq::Quant::Forall ? "forall" : "exists";
    d["var"] = rq::print(n.domain_var);
    return d;
  };
  py::list nodes;
  for (const auto& n : q.classification.graph.nodes) nodes.append(node(n));
  out["domain_function"] = nodes;
  py::list loop;
  for (const auto& n : q.classification.loop) loop.append(node(n));
  out["loop"] = loop;
  out["warnings"] = q.classification.warnings;
  out["report"] = q.classification.text();
  return out;
}

std::string pretty(const std::string& text) {
  return rq::print(rq::parse_program(text));
}

}  // namespace

PYBIND11_MODULE(_rqsolve, m) {
  m.doc() = "satisfiability solver for quantifier-free theories extended with "
            "nested restricted quantifiers over finite sets";

  m.def("solve", &solve, py::arg("text"), py::arg("theory") = "lia",
        py::arg("max_steps") = -1, py::arg("max_solutions") = 1,
        "Parse and solve a program; returns a dict with the verdict and answers.");
  m.def("prove", &prove, py::arg("text"), py::arg("theory") = "lia",
        py::arg("max_steps") = -1,
        "Solve the negated lemma: unsat means proved, sat a counterexample.");
  m.def("classify", &classify_text, py::arg("text"), py::arg("theory") = "lia",
        "Termination-fragment report with the domain graph and loop witness.");
  m.def("pretty", &pretty, py::arg("text"), "Parse and pretty-print a program.");

  py::register_exception<rq::InputError>(m, "InputError");
}
