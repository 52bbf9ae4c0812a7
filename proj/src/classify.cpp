#include <algorithm>
#include <functional>
#include <sstream>

#include "rq/print.hpp"
#include "rq/rqlayer.hpp"

namespace rq {

const char* fragment_name(Fragment f) {
  switch (f) {
    case Fragment::PhiForall: return "forall";
    case Fragment::PhiExists: return "exists";
    case Fragment::PhiExistsForall: return "exists-forall";
    case Fragment::PhiForallExists: return "forall-exists";
    default: return "outside";
  }
}

bool operator==(const DomainNode& a, const DomainNode& b) {
  return a.conjunct == b.conjunct && a.index == b.index && a.quant == b.quant &&
         a.domain_var == b.domain_var;
}

namespace {

struct RqTree {
  Quant quant = Quant::Forall;
  std::optional<Var> dom_var;  // set when the domain is a variable domain
  bool ctrl_as_domain = false;
  std::vector<RqTree> children;
};

// The variable of a variable domain: the domain itself when it is a
// variable, the set part of an extensional set whose set part is a variable.
std::optional<Var> domain_variable(const SetTermPtr& dom) {
  if (const SVar* v = as_svar(dom)) return v->var;
  ExtParts parts = ext_parts(dom);
  if (const SVar* tail = as_svar(parts.tail); tail && !parts.elems.empty())
    return tail->var;
  return std::nullopt;
}

void collect_rq(const FormulaPtr& f, const std::set<Var>& ctrl_twins,
                std::vector<RqTree>& out);

RqTree tree_of(const CRq& rq, std::set<Var> ctrl_twins) {
  RqTree t;
  t.quant = rq.quant;
  t.dom_var = domain_variable(rq.dom);
  if (t.dom_var && ctrl_twins.count(*t.dom_var)) t.ctrl_as_domain = true;
  for (const Var& cv : ctrl_vars(rq.ctrl))
    ctrl_twins.insert(Var{cv.name, cv.fresh_id, Sort::Set});
  collect_rq(rq.filter, ctrl_twins, t.children);
  return t;
}

void collect_rq(const FormulaPtr& f, const std::set<Var>& ctrl_twins,
                std::vector<RqTree>& out) {
  if (const auto* x = std::get_if<FAnd>(&f->node)) {
    collect_rq(x->lhs, ctrl_twins, out);
    collect_rq(x->rhs, ctrl_twins, out);
  } else if (const auto* x = std::get_if<FOr>(&f->node)) {
    collect_rq(x->lhs, ctrl_twins, out);
    collect_rq(x->rhs, ctrl_twins, out);
  } else if (const auto* x = std::get_if<FAtom>(&f->node)) {
    if (const auto* rq = std::get_if<CRq>(&x->c)) out.push_back(tree_of(*rq, ctrl_twins));
    if (const auto* sub = std::get_if<CSubsetRuq>(&x->c)) {
      CRq view{Quant::Forall, sub->ris.ctrl,     sub->ris.dom,
               sub->ris.locals, sub->ris.filter, sub->ris.fpreds};
      out.push_back(tree_of(view, ctrl_twins));
    }
  }
}

bool all_quant(const RqTree& t, Quant q) {
  if (t.quant != q) return false;
  for (const auto& c : t.children)
    if (!all_quant(c, q)) return false;
  return true;
}

// The exists-then-forall pattern: an exists prefix over forall-only trees.
bool ef_pattern(const RqTree& t) {
  if (all_quant(t, Quant::Forall)) return true;
  if (t.quant != Quant::Exists) return false;
  for (const auto& c : t.children)
    if (!ef_pattern(c)) return false;
  return true;
}

bool has_ctrl_domain(const RqTree& t) {
  if (t.ctrl_as_domain) return true;
  for (const auto& c : t.children)
    if (has_ctrl_domain(c)) return true;
  return false;
}

void number_nodes(const RqTree& t, int conjunct, int& next_index,
                  std::vector<DomainNode>& out) {
  int index = next_index++;
  if (t.dom_var)
    out.push_back(DomainNode{conjunct, index, t.quant, *t.dom_var});
  for (const auto& c : t.children) number_nodes(c, conjunct, next_index, out);
}

// Expands the formula into disjunctive branches, each a conjunction list.
void dnf(const FormulaPtr& f, std::vector<std::vector<FormulaPtr>>& branches,
         size_t cap, bool& overflow) {
  if (overflow) return;
  if (const auto* x = std::get_if<FAnd>(&f->node)) {
    std::vector<std::vector<FormulaPtr>> left;
    bool of = false;
    dnf(x->lhs, left, cap, of);
    std::vector<std::vector<FormulaPtr>> right;
    dnf(x->rhs, right, cap, of);
    if (of || left.size() * right.size() > cap) {
      overflow = true;
      return;
    }
    for (const auto& l : left)
      for (const auto& r : right) {
        std::vector<FormulaPtr> both = l;
        both.insert(both.end(), r.begin(), r.end());
        branches.push_back(std::move(both));
      }
    return;
  }
  if (const auto* x = std::get_if<FOr>(&f->node)) {
    dnf(x->lhs, branches, cap, overflow);
    dnf(x->rhs, branches, cap, overflow);
    if (branches.size() > cap) overflow = true;
    return;
  }
  branches.push_back({f});
}

struct BranchVerdict {
  Fragment fragment;
  DomainGraph graph;
  std::vector<DomainNode> loop;
  std::vector<std::string> warnings;
};

BranchVerdict classify_branch(const std::vector<FormulaPtr>& conjuncts) {
  BranchVerdict out;
  std::vector<RqTree> trees;
  for (const auto& c : conjuncts) collect_rq(c, {}, trees);

  bool warn = false;
  for (const auto& t : trees)
    if (has_ctrl_domain(t)) warn = true;
  if (warn)
    out.warnings.push_back(
        "a quantified variable occurs as a domain; solving is sound but may not "
        "terminate unless the domain graph stays loop-free");

  out.graph = build_domain_graph(conjuncts);
  auto loop = find_ae_loop(out.graph);

  bool forall_only = std::all_of(trees.begin(), trees.end(), [](const RqTree& t) {
    return all_quant(t, Quant::Forall);
  });
  bool exists_only = std::all_of(trees.begin(), trees.end(), [](const RqTree& t) {
    return all_quant(t, Quant::Exists);
  });
  bool ef = std::all_of(trees.begin(), trees.end(), ef_pattern);

  if (loop) {
    out.fragment = Fragment::Outside;
    out.loop = *loop;
  } else if (forall_only && !trees.empty()) {
    out.fragment = Fragment::PhiForall;
  } else if (trees.empty()) {
    out.fragment = Fragment::PhiForall;  // theory-only conjunction
  } else if (exists_only) {
    out.fragment = Fragment::PhiExists;
  } else if (ef) {
    out.fragment = Fragment::PhiExistsForall;
  } else {
    out.fragment = Fragment::PhiForallExists;
  }
  return out;
}

}  // namespace

namespace {

// Top-level set equalities alias set variables (substitution merges their
// domains during solving), so loop detection must identify them. Membership
// constraints stay neutral: they feed a domain at most once.
std::map<Var, Var> domain_aliases(const std::vector<FormulaPtr>& conjuncts) {
  std::map<Var, Var> parent;
  std::function<Var(Var)> find = [&](Var v) {
    auto it = parent.find(v);
    if (it == parent.end() || it->second == v) return v;
    Var r = find(it->second);
    parent[v] = r;
    return r;
  };
  auto merge = [&](const Var& a, const Var& b) {
    Var ra = find(a), rb = find(b);
    if (!(ra == rb)) parent[ra] = rb;
  };
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& f) {
    if (const auto* x = std::get_if<FAnd>(&f->node)) {
      walk(x->lhs);
      walk(x->rhs);
    } else if (const auto* x = std::get_if<FOr>(&f->node)) {
      walk(x->lhs);
      walk(x->rhs);
    } else if (const auto* x = std::get_if<FAtom>(&f->node)) {
      const auto* eq = std::get_if<CEqSet>(&x->c);
      if (!eq) return;
      auto side_var = [](const SetTermPtr& t) -> std::optional<Var> {
        if (const SVar* v = as_svar(t)) return v->var;
        ExtParts parts = ext_parts(t);
        if (const SVar* tail = as_svar(parts.tail)) return tail->var;
        return std::nullopt;
      };
      std::optional<Var> a = side_var(eq->lhs);
      std::optional<Var> b = side_var(eq->rhs);
      if (a && b) merge(*a, *b);
    }
  };
  for (const auto& c : conjuncts) walk(c);
  std::map<Var, Var> out;
  for (const auto& [v, p] : parent) out[v] = find(v);
  return out;
}

}  // namespace

DomainGraph build_domain_graph(const std::vector<FormulaPtr>& conjuncts) {
  DomainGraph g;
  std::map<Var, Var> alias = domain_aliases(conjuncts);
  auto rep = [&](const Var& v) {
    auto it = alias.find(v);
    return it == alias.end() ? v : it->second;
  };
  for (size_t i = 0; i < conjuncts.size(); ++i) {
    std::vector<RqTree> trees;
    collect_rq(conjuncts[i], {}, trees);
    int next_index = 1;
    for (const auto& t : trees)
      number_nodes(t, static_cast<int>(i) + 1, next_index, g.nodes);
  }
  for (auto& n : g.nodes) n.domain_var = rep(n.domain_var);
  for (size_t a = 0; a < g.nodes.size(); ++a) {
    for (size_t b = 0; b < g.nodes.size(); ++b) {
      if (a == b) continue;
      const DomainNode& u = g.nodes[a];
      const DomainNode& v = g.nodes[b];
      // Rule 1: a universal before an existential within one conjunct.
      if (u.conjunct == v.conjunct && u.index < v.index && u.quant == Quant::Forall &&
          v.quant == Quant::Exists)
        g.edges.emplace_back(a, b);
      // Rule 2: an existential feeding a universal with the same domain
      // variable in another conjunct.
      if (u.conjunct != v.conjunct && u.quant == Quant::Exists &&
          v.quant == Quant::Forall && u.domain_var == v.domain_var)
        g.edges.emplace_back(a, b);
    }
  }
  return g;
}

std::optional<std::vector<DomainNode>> find_ae_loop(const DomainGraph& g) {
  // Paths alternate forall/exists by construction of the edges; a loop
  // starts at a forall node and ends at an exists node with the same domain
  // variable, visiting pairwise distinct conjuncts.
  std::vector<std::vector<size_t>> succ(g.nodes.size());
  for (const auto& [a, b] : g.edges) succ[a].push_back(b);

  std::optional<std::vector<DomainNode>> found;
  std::function<bool(size_t, const Var&, std::set<int>&, std::vector<size_t>&)> dfs =
      [&](size_t at, const Var& start_var, std::set<int>& used,
          std::vector<size_t>& path) -> bool {
    for (size_t nxt : succ[at]) {
      const DomainNode& n = g.nodes[nxt];
      if (g.nodes[at].quant == Quant::Forall) {
        // rule-1 edge to an exists in the same conjunct
        path.push_back(nxt);
        if (n.domain_var == start_var) {
          std::vector<DomainNode> loop;
          for (size_t i : path) loop.push_back(g.nodes[i]);
          found = std::move(loop);
          return true;
        }
        if (dfs(nxt, start_var, used, path)) return true;
        path.pop_back();
      } else {
        // rule-2 edge to a forall in a fresh conjunct
        if (used.count(n.conjunct)) continue;
        used.insert(n.conjunct);
        path.push_back(nxt);
        if (dfs(nxt, start_var, used, path)) return true;
        path.pop_back();
        used.erase(n.conjunct);
      }
    }
    return false;
  };

  for (size_t s = 0; s < g.nodes.size(); ++s) {
    if (g.nodes[s].quant != Quant::Forall) continue;
    std::set<int> used{g.nodes[s].conjunct};
    std::vector<size_t> path{s};
    if (dfs(s, g.nodes[s].domain_var, used, path)) return found;
  }
  return std::nullopt;
}

ClassifyReport classify(const FormulaPtr& f) {
  std::vector<std::vector<FormulaPtr>> branches;
  bool overflow = false;
  dnf(f, branches, 4096, overflow);

  ClassifyReport report;
  if (overflow) {
    report.fragment = Fragment::Outside;
    report.warnings.push_back("too many disjuncts; conservatively treated as outside");
    return report;
  }
  bool first = true;
  for (const auto& branch : branches) {
    BranchVerdict v = classify_branch(branch);
    if (first || static_cast<int>(v.fragment) > static_cast<int>(report.fragment)) {
      report.fragment = v.fragment;
      report.graph = v.graph;
      report.loop = v.loop;
    }
    for (const auto& w : v.warnings)
      if (std::find(report.warnings.begin(), report.warnings.end(), w) ==
          report.warnings.end())
        report.warnings.push_back(w);
    first = false;
  }
  return report;
}

std::string ClassifyReport::text() const {
  std::ostringstream os;
  os << "fragment: " << fragment_name(fragment) << "\n";
  auto show_node = [&](const DomainNode& n) {
    os << "((" << n.conjunct << "," << n.index << "),("
       << (n.quant == Quant::Forall ? "forall" : "exists") << "," << print(n.domain_var)
       << "))";
  };
  os << "domain function:";
  if (graph.nodes.empty()) os << " (empty)";
  os << "\n";
  for (const auto& n : graph.nodes) {
    os << "  ";
    show_node(n);
    os << "\n";
  }
  os << "edges:\n";
  for (const auto& [a, b] : graph.edges) {
    os << "  ";
    show_node(graph.nodes[a]);
    os << " -> ";
    show_node(graph.nodes[b]);
    os << "\n";
  }
  if (!loop.empty()) {
    os << "forall-exists loop:\n";
    for (const auto& n : loop) {
      os << "  ";
      show_node(n);
      os << "\n";
    }
  }
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace rq
