#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rq/driver.hpp"
#include "rq/oracle.hpp"
#include "rq/parse.hpp"
#include "rq/print.hpp"

namespace {

using nlohmann::json;

constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitInputError = 3;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rq::InputError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

rq::TraceSink make_trace_sink(bool enabled) {
  if (!enabled) return {};
  return [](const rq::TraceEntry& e) {
    std::cerr << e.rule << " " << e.before << " ==> " << e.after << "\n";
  };
}

std::string bindings_line(const rq::Answer& a) {
  if (a.display_bindings.empty()) return "true";
  std::string out;
  for (const auto& [v, text] : a.display_bindings) {
    if (!out.empty()) out += ", ";
    out += rq::print(v) + " = " + text;
  }
  return out;
}

json answer_json(const rq::Answer& a) {
  json out;
  out["bindings"] = json::object();
  for (const auto& [v, text] : a.display_bindings) out["bindings"][rq::print(v)] = text;
  out["residue"] = json::array();
  for (const auto& c : a.irreducible_s) out["residue"].push_back(rq::print(c));
  out["model"] = json::object();
  for (const auto& [v, val] : a.theory_model) out["model"][rq::print(v)] = val.str();
  out["valuation"] = json::object();
  for (const auto& [v, val] : a.valuation) out["valuation"][rq::print(v)] = val.str();
  return out;
}

void print_answer_text(const rq::Answer& a, bool with_model) {
  std::cout << "answer: " << bindings_line(a) << "\n";
  for (const auto& c : a.irreducible_s) {
    if (std::holds_alternative<rq::CEqSet>(c)) continue;  // shown as bindings
    std::cout << "  residue: " << rq::print(c) << "\n";
  }
  for (const auto& l : a.x_residue)
    std::cout << "  constraint: " << rq::print(rq::Constraint{l}) << "\n";
  if (with_model) {
    std::string line;
    for (const auto& [v, val] : a.valuation) {
      if (!line.empty()) line += ", ";
      line += rq::print(v) + " = " + val.str();
    }
    std::cout << "  valuation: " << line << "\n";
  }
}

json node_json(const rq::DomainNode& n) {
  return json{{"conjunct", n.conjunct},
              {"index", n.index},
              {"quant", n.quant == rq::Quant::Forall ? "forall" : "exists"},
              {"var", rq::print(n.domain_var)}};
}

json classification_json(const rq::ClassifyReport& r) {
  json out;
  out["fragment"] = rq::fragment_name(r.fragment);
  out["domain_function"] = json::array();
  for (const auto& n : r.graph.nodes) out["domain_function"].push_back(node_json(n));
  out["edges"] = json::array();
  for (const auto& [a, b] : r.graph.edges)
    out["edges"].push_back(json::array({node_json(r.graph.nodes[a]),
                                        node_json(r.graph.nodes[b])}));
  out["loop"] = json::array();
  for (const auto& n : r.loop) out["loop"].push_back(node_json(n));
  out["warnings"] = r.warnings;
  return out;
}

int run_solve(const std::string& file, const rq::SolveOptions& opts, bool all,
              size_t max_solutions, bool as_json, bool with_model) {
  rq::Program program = rq::parse_program(read_input(file));
  rq::PreparedQuery q = rq::prepare(program, opts);
  size_t limit = all ? 1000000 : max_solutions;
  rq::Verdict v = rq::sat_rq(q, opts, limit);

  if (as_json) {
    json out;
    out["verdict"] = v.status == rq::Status::Sat     ? "sat"
                     : v.status == rq::Status::Unsat ? "unsat"
                                                     : "unknown";
    if (v.status == rq::Status::Unknown) out["reason"] = v.unknown_reason;
    out["answers"] = json::array();
    for (const auto& a : v.answers) out["answers"].push_back(answer_json(a));
    out["classification"] = classification_json(q.classification);
    std::cout << out.dump(2) << "\n";
  } else {
    switch (v.status) {
      case rq::Status::Sat:
        std::cout << "sat\n";
        for (const auto& a : v.answers) print_answer_text(a, with_model);
        break;
      case rq::Status::Unsat: std::cout << "unsat\n"; break;
      case rq::Status::Unknown:
        std::cout << "unknown (" << v.unknown_reason << ")\n";
        break;
    }
  }
  return v.status == rq::Status::Sat     ? kExitSat
         : v.status == rq::Status::Unsat ? kExitUnsat
                                         : kExitUnknown;
}

int run_prove(const std::string& file, const rq::SolveOptions& opts, bool as_json,
              bool with_model) {
  rq::Program program = rq::parse_program(read_input(file));
  rq::ProveResult r = rq::prove(program, opts);
  if (as_json) {
    json out;
    out["result"] = r.status == rq::ProveStatus::Proved           ? "proved"
                    : r.status == rq::ProveStatus::Counterexample ? "counterexample"
                                                                  : "unknown";
    if (r.witness) out["counterexample"] = answer_json(*r.witness);
    if (r.status == rq::ProveStatus::Unknown) out["reason"] = r.verdict.unknown_reason;
    std::cout << out.dump(2) << "\n";
  } else {
    switch (r.status) {
      case rq::ProveStatus::Proved: std::cout << "proved\n"; break;
      case rq::ProveStatus::Counterexample:
        std::cout << "counterexample\n";
        print_answer_text(*r.witness, with_model);
        break;
      case rq::ProveStatus::Unknown:
        std::cout << "unknown (" << r.verdict.unknown_reason << ")\n";
        break;
    }
  }
  return r.status == rq::ProveStatus::Counterexample ? kExitSat
         : r.status == rq::ProveStatus::Proved       ? kExitUnsat
                                                     : kExitUnknown;
}

int run_classify(const std::string& file, const std::string& theory, bool as_json) {
  rq::Program program = rq::parse_program(read_input(file));
  rq::SolveOptions opts;
  opts.theory = theory;
  rq::PreparedQuery q = rq::prepare(program, opts);
  if (as_json) {
    std::cout << classification_json(q.classification).dump(2) << "\n";
  } else {
    std::cout << q.classification.text();
  }
  return kExitSat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satisfiability solver for quantifier-free theories extended with "
               "nested restricted quantifiers over finite sets"};
  app.require_subcommand(1);

  std::string file;
  std::string theory = "lia";
  long long max_steps = -1;
  bool all = false;
  size_t max_solutions = 1;
  bool trace = false;
  bool as_json = false;
  bool with_model = false;

  auto add_common = [&](CLI::App* cmd, bool solver_flags) {
    cmd->add_option("file", file, "input file (.slog), or '-' for stdin")->required();
    if (solver_flags) {
      cmd->add_option("--theory", theory, "theory plugin: eq or lia")
          ->check(CLI::IsMember({"eq", "lia"}));
      cmd->add_option("--max-steps", max_steps,
                      "rule applications per branch (0 = unlimited; default by "
                      "classification)");
      cmd->add_flag("--trace", trace, "stream the rewrite log to stderr");
      cmd->add_flag("--model", with_model, "print a concrete valuation per answer");
    }
    cmd->add_flag("--json", as_json, "machine-readable output");
  };

  CLI::App* solve = app.add_subcommand("solve", "decide satisfiability of the query");
  add_common(solve, true);
  solve->add_flag("--all", all, "enumerate all solutions");
  solve->add_option("--max-solutions", max_solutions, "enumerate up to N solutions");

  CLI::App* classify =
      app.add_subcommand("classify", "report the termination fragment of the query");
  add_common(classify, false);
  classify->add_option("--theory", theory, "theory plugin: eq or lia")
      ->check(CLI::IsMember({"eq", "lia"}));

  CLI::App* prove = app.add_subcommand(
      "prove", "solve the negated lemma: unsat means proved, sat a counterexample");
  add_common(prove, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  rq::SolveOptions opts;
  opts.theory = theory;
  opts.max_steps = max_steps;
  opts.trace = make_trace_sink(trace);

  try {
    if (solve->parsed()) return run_solve(file, opts, all, max_solutions, as_json, with_model);
    if (prove->parsed()) return run_prove(file, opts, as_json, with_model);
    return run_classify(file, theory, as_json);
  } catch (const rq::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const rq::EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
