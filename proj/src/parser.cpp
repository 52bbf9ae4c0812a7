#include "rq/parse.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace rq {

namespace {

enum class Tok {
  Var,
  LowerIdent,  // atom or keyword, disambiguated by spelling
  Int,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Slash,
  Amp,
  Dot,
  ColonDash,
  Eq,
  Le,   // =<
  Lt,   // <
  Ge,   // >=
  Gt,   // >
  Plus,
  Minus,
  Star,
  End
};

struct Token {
  Tok kind;
  std::string text;
  Pos pos;
};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"in",     "nin",    "or",     "implies",
                                           "neg",    "foreach", "exists", "subset",
                                           "ris",    "true",   "false",  "set",
                                           "isx",    "neq"};
  return kw.count(s) > 0;
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto pos = [&]() { return Pos{line, col}; };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (i < text.size() && text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Pos p = pos();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::Int, std::string(text.substr(i, j - i)), p});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                 text[j] == '_'))
        ++j;
      std::string word(text.substr(i, j - i));
      if (c == '_')
        throw ParseError("identifiers starting with '_' are reserved for generated "
                         "variables: " + word,
                         p);
      out.push_back({std::isupper(static_cast<unsigned char>(c)) ? Tok::Var
                                                                 : Tok::LowerIdent,
                     word, p});
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < text.size() && text[i + 1] == b;
    };
    if (two(':', '-')) {
      out.push_back({Tok::ColonDash, ":-", p});
      advance(2);
      continue;
    }
    if (two('=', '<')) {
      out.push_back({Tok::Le, "=<", p});
      advance(2);
      continue;
    }
    if (two('>', '=')) {
      out.push_back({Tok::Ge, ">=", p});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case ',': kind = Tok::Comma; break;
      case '/': kind = Tok::Slash; break;
      case '&': kind = Tok::Amp; break;
      case '.': kind = Tok::Dot; break;
      case '=': kind = Tok::Eq; break;
      case '<': kind = Tok::Lt; break;
      case '>': kind = Tok::Gt; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", p);
    }
    out.push_back({kind, std::string(1, c), p});
    advance(1);
  }
  out.push_back({Tok::End, "", pos()});
  return out;
}

SurTermPtr term(SurTerm t) { return std::make_shared<const SurTerm>(std::move(t)); }
SurFormulaPtr formula(SurFormula f) {
  return std::make_shared<const SurFormula>(std::move(f));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Program program() {
    Program prog;
    bool have_query = false;
    while (!at(Tok::End)) {
      if (have_query)
        throw ParseError("the query must be the last clause of the program", peek().pos);
      if (looks_like_definition()) {
        prog.defs.push_back(definition());
      } else {
        prog.query = formula_();
        have_query = true;
      }
      expect(Tok::Dot, "expected '.' at end of clause");
    }
    if (!have_query) throw ParseError("program has no query clause", peek().pos);
    check_definitions(prog);
    return prog;
  }

  SurFormulaPtr formula_only() {
    SurFormulaPtr f = formula_();
    expect(Tok::End, "trailing input after formula");
    return f;
  }

  SurTermPtr term_only() {
    SurTermPtr t = term_();
    expect(Tok::End, "trailing input after term");
    return t;
  }

 private:
  std::vector<Token> toks_;
  size_t idx_ = 0;

  const Token& peek(size_t k = 0) const {
    size_t i = idx_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const {
    return peek().kind == Tok::LowerIdent && peek().text == w;
  }
  Token take() { return toks_[idx_ < toks_.size() - 1 ? idx_++ : idx_]; }
  Token expect(Tok k, const char* msg) {
    if (!at(k)) throw ParseError(std::string(msg) + " (got '" + peek().text + "')",
                                 peek().pos);
    return take();
  }
  void expect_word(const char* w) {
    if (!at_word(w))
      throw ParseError(std::string("expected '") + w + "' (got '" + peek().text + "')",
                       peek().pos);
    take();
  }

  bool looks_like_definition() {
    // IDENT '(' ... ')' ':-'
    if (peek().kind != Tok::LowerIdent || is_keyword(peek().text)) return false;
    if (peek(1).kind != Tok::LParen) return false;
    int depth = 0;
    for (size_t k = 1;; ++k) {
      const Token& t = peek(k);
      if (t.kind == Tok::End) return false;
      if (t.kind == Tok::LParen) ++depth;
      if (t.kind == Tok::RParen && --depth == 0) return peek(k + 1).kind == Tok::ColonDash;
    }
  }

  Definition definition() {
    Token name = take();
    Definition def;
    def.name = name.text;
    def.pos = name.pos;
    expect(Tok::LParen, "expected '(' after definition name");
    if (!at(Tok::RParen)) {
      for (;;) {
        Token v = expect(Tok::Var, "definition parameters must be variables");
        for (const auto& p : def.params)
          if (p == v.text)
            throw ParseError("duplicate parameter '" + v.text + "'", v.pos);
        def.params.push_back(v.text);
        if (!at(Tok::Comma)) break;
        take();
      }
    }
    expect(Tok::RParen, "expected ')' after parameters");
    expect(Tok::ColonDash, "expected ':-' in definition");
    def.body = formula_();
    return def;
  }

  void check_definitions(const Program& prog) {
    std::map<std::string, const Definition*> byname;
    for (const auto& d : prog.defs) {
      if (byname.count(d.name))
        throw ParseError("duplicate definition of '" + d.name + "'", d.pos);
      byname[d.name] = &d;
    }
    // Reject recursion (the call graph must be acyclic); report the cycle.
    for (const auto& d : prog.defs) {
      std::vector<std::string> path;
      std::set<std::string> on_path;
      check_calls(d, byname, path, on_path);
    }
  }

  void collect_calls(const SurFormulaPtr& f, std::vector<const UCall*>& out) {
    if (const auto* x = std::get_if<UAnd>(&f->node)) {
      collect_calls(x->lhs, out);
      collect_calls(x->rhs, out);
    } else if (const auto* x = std::get_if<UOr>(&f->node)) {
      collect_calls(x->lhs, out);
      collect_calls(x->rhs, out);
    } else if (const auto* x = std::get_if<UNeg>(&f->node)) {
      collect_calls(x->body, out);
    } else if (const auto* x = std::get_if<UImplies>(&f->node)) {
      collect_calls(x->lhs, out);
      collect_calls(x->rhs, out);
    } else if (const auto* x = std::get_if<URq>(&f->node)) {
      collect_calls(x->filter, out);
      if (x->fpreds) collect_calls(x->fpreds, out);
    } else if (const auto* x = std::get_if<UCall>(&f->node)) {
      out.push_back(x);
    }
  }

  void check_calls(const Definition& d,
                   const std::map<std::string, const Definition*>& byname,
                   std::vector<std::string>& path, std::set<std::string>& on_path) {
    path.push_back(d.name);
    on_path.insert(d.name);
    std::vector<const UCall*> calls;
    collect_calls(d.body, calls);
    for (const UCall* c : calls) {
      auto it = byname.find(c->name);
      if (it == byname.end()) continue;  // theory fp or unknown; checked at lowering
      if (on_path.count(c->name)) {
        std::string cycle;
        for (const auto& n : path) cycle += n + " -> ";
        cycle += c->name;
        throw ParseError("recursive definitions are not allowed: " + cycle, d.pos);
      }
      check_calls(*it->second, byname, path, on_path);
    }
    on_path.erase(d.name);
    path.pop_back();
  }

  // --- formulas --------------------------------------------------------------

  SurFormulaPtr formula_() {
    SurFormulaPtr lhs = disj();
    if (at_word("implies")) {
      Pos p = take().pos;
      SurFormulaPtr rhs = formula_();
      return formula({UImplies{lhs, rhs}, p});
    }
    return lhs;
  }

  SurFormulaPtr disj() {
    SurFormulaPtr lhs = conj();
    while (at_word("or")) {
      Pos p = take().pos;
      SurFormulaPtr rhs = conj();
      lhs = formula({UOr{lhs, rhs}, p});
    }
    return lhs;
  }

  SurFormulaPtr conj() {
    SurFormulaPtr lhs = unit();
    while (at(Tok::Amp)) {
      Pos p = take().pos;
      SurFormulaPtr rhs = unit();
      lhs = formula({UAnd{lhs, rhs}, p});
    }
    return lhs;
  }

  SurFormulaPtr unit() {
    Pos p = peek().pos;
    if (at_word("neg")) {
      take();
      expect(Tok::LParen, "expected '(' after neg");
      SurFormulaPtr body = formula_();
      expect(Tok::RParen, "expected ')'");
      return formula({UNeg{body}, p});
    }
    if (at_word("true")) {
      take();
      return formula({UTrue{}, p});
    }
    if (at_word("false")) {
      take();
      return formula({UFalse{}, p});
    }
    if (at_word("foreach") || at_word("exists")) return rq_constraint();
    if (at_word("subset")) return subset_constraint();
    if (at_word("set") || at_word("isx")) {
      bool is_set = peek().text == "set";
      take();
      expect(Tok::LParen, "expected '('");
      SurTermPtr t = term_();
      expect(Tok::RParen, "expected ')'");
      return formula({USort{is_set, t}, p});
    }
    if (peek().kind == Tok::LowerIdent && !is_keyword(peek().text) &&
        peek(1).kind == Tok::LParen) {
      return call_constraint();
    }
    if (at(Tok::LParen)) {
      // Could be a parenthesized arithmetic term ("(X+1) = Y") or a
      // parenthesized formula; try the relation first.
      size_t save = idx_;
      try {
        return relation();
      } catch (const ParseError&) {
        idx_ = save;
      }
      take();
      SurFormulaPtr f = formula_();
      expect(Tok::RParen, "expected ')'");
      return f;
    }
    return relation();
  }

  SurFormulaPtr call_constraint() {
    Token name = take();
    expect(Tok::LParen, "expected '('");
    UCall call{name.text, {}};
    if (!at(Tok::RParen)) {
      for (;;) {
        call.args.push_back(term_());
        if (!at(Tok::Comma)) break;
        take();
      }
    }
    expect(Tok::RParen, "expected ')'");
    return formula({std::move(call), name.pos});
  }

  SurFormulaPtr relation() {
    Pos p = peek().pos;
    SurTermPtr lhs = term_();
    std::string op;
    switch (peek().kind) {
      case Tok::Eq: op = "="; break;
      case Tok::Le: op = "=<"; break;
      case Tok::Lt: op = "<"; break;
      case Tok::Ge: op = ">="; break;
      case Tok::Gt: op = ">"; break;
      case Tok::LowerIdent:
        if (peek().text == "neq" || peek().text == "in" || peek().text == "nin") {
          op = peek().text;
          break;
        }
        [[fallthrough]];
      default:
        throw ParseError("expected a relation symbol (got '" + peek().text + "')",
                         peek().pos);
    }
    take();
    SurTermPtr rhs = term_();
    return formula({URel{op, lhs, rhs}, p});
  }

  SurFormulaPtr subset_constraint() {
    Pos p = take().pos;  // 'subset'
    expect(Tok::LParen, "expected '(' after subset");
    SurTermPtr lhs = term_();
    expect(Tok::Comma, "expected ','");
    SurTermPtr rhs = term_();
    expect(Tok::RParen, "expected ')'");
    const auto* ris = std::get_if<URis>(&rhs->node);
    if (!ris)
      throw ParseError(
          "second argument of subset must be a ris(...) term; only restricted "
          "universal quantifiers A subset {x : A | f} are supported",
          p);
    if (!equal(lhs, ris->dom))
      throw ParseError(
          "subset(A, ris(X, D, F)) requires D to be structurally identical to A "
          "(restricted universal quantifier shape)",
          p);
    return formula({USubset{lhs, rhs}, p});
  }

  SurFormulaPtr rq_constraint() {
    Quant q = peek().text == "foreach" ? Quant::Forall : Quant::Exists;
    Pos p = take().pos;
    expect(Tok::LParen, "expected '('");
    std::vector<Binder> binders = binder_list();
    expect(Tok::Comma, "expected ',' after binder");
    std::vector<std::string> locals;
    SurFormulaPtr filter, fpreds;
    if (at(Tok::LBracket) && try_locals(locals)) {
      expect(Tok::Comma, "expected ',' after locals");
      filter = formula_();
      expect(Tok::Comma, "expected ',' before functional predicates");
      fpreds = formula_();
    } else {
      filter = formula_();
    }
    expect(Tok::RParen, "expected ')'");
    // Multi-binder sugar expands outermost-first; locals and functional
    // predicates attach to the innermost quantifier.
    SurFormulaPtr body = filter;
    for (size_t i = binders.size(); i-- > 0;) {
      bool innermost = (i == binders.size() - 1);
      URq rq{q, binders[i], innermost ? locals : std::vector<std::string>{}, body,
             innermost ? fpreds : nullptr};
      body = formula({std::move(rq), p});
    }
    return body;
  }

  bool try_locals(std::vector<std::string>& out) {
    size_t save = idx_;
    take();  // '['
    std::vector<std::string> names;
    for (;;) {
      if (peek().kind != Tok::Var) {
        idx_ = save;
        return false;
      }
      names.push_back(take().text);
      if (at(Tok::Comma)) {
        take();
        continue;
      }
      break;
    }
    if (!at(Tok::RBracket) || peek(1).kind != Tok::Comma) {
      idx_ = save;
      return false;
    }
    take();  // ']'
    out = std::move(names);
    return true;
  }

  std::vector<Binder> binder_list() {
    if (at(Tok::LBracket)) {
      // Either a binder list "[x in A, y in B]" or a pair control term
      // "[x,y] in R"; try the control term reading first.
      size_t save = idx_;
      try {
        SurTermPtr ctrl = ctrl_term();
        if (at_word("in")) {
          take();
          SurTermPtr dom = term_();
          return {Binder{ctrl, dom}};
        }
        idx_ = save;
      } catch (const ParseError&) {
        idx_ = save;
      }
      take();  // '['
      std::vector<Binder> out;
      for (;;) {
        SurTermPtr ctrl = ctrl_term();
        expect_word("in");
        SurTermPtr dom = term_();
        out.push_back({ctrl, dom});
        if (at(Tok::Comma)) {
          take();
          continue;
        }
        break;
      }
      expect(Tok::RBracket, "expected ']' after binder list");
      return out;
    }
    SurTermPtr ctrl = ctrl_term();
    expect_word("in");
    SurTermPtr dom = term_();
    return {Binder{ctrl, dom}};
  }

  SurTermPtr ctrl_term() {
    Pos p = peek().pos;
    if (at(Tok::Var)) {
      Token v = take();
      return term({UVar{v.text, std::nullopt}, v.pos});
    }
    if (at(Tok::LBracket)) {
      take();
      SurTermPtr a = ctrl_term();
      expect(Tok::Comma, "expected ',' in control pair");
      SurTermPtr b = ctrl_term();
      expect(Tok::RBracket, "expected ']'");
      return term({UPair{a, b}, p});
    }
    throw ParseError("expected a control term (variable or pair of control terms)", p);
  }

  // --- terms -----------------------------------------------------------------

  SurTermPtr term_() { return arith(); }

  SurTermPtr arith() {
    SurTermPtr lhs = mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Token op = take();
      SurTermPtr rhs = mul();
      lhs = term({UArith{op.text, {lhs, rhs}}, op.pos});
    }
    return lhs;
  }

  SurTermPtr mul() {
    SurTermPtr lhs = prim();
    while (at(Tok::Star)) {
      Token op = take();
      SurTermPtr rhs = prim();
      lhs = term({UArith{"*", {lhs, rhs}}, op.pos});
    }
    return lhs;
  }

  SurTermPtr prim() {
    Pos p = peek().pos;
    if (at(Tok::Minus)) {
      take();
      SurTermPtr t = prim();
      if (const auto* i = std::get_if<UInt>(&t->node))
        return term({UInt{-i->value}, p});
      return term({UArith{"-", {t}}, p});
    }
    if (at(Tok::Int)) {
      Token t = take();
      return term({UInt{std::stoll(t.text)}, t.pos});
    }
    if (at(Tok::Var)) {
      Token t = take();
      return term({UVar{t.text, std::nullopt}, t.pos});
    }
    if (at_word("ris")) return ris_term();
    if (peek().kind == Tok::LowerIdent) {
      Token t = take();
      if (is_keyword(t.text))
        throw ParseError("'" + t.text + "' is a reserved word", t.pos);
      return term({UAtom{t.text}, t.pos});
    }
    if (at(Tok::LBracket)) {
      take();
      SurTermPtr a = term_();
      expect(Tok::Comma, "expected ',' in pair");
      SurTermPtr b = term_();
      expect(Tok::RBracket, "expected ']' closing pair");
      return term({UPair{a, b}, p});
    }
    if (at(Tok::LBrace)) {
      take();
      if (at(Tok::RBrace)) {
        take();
        return term({UEmpty{}, p});
      }
      UExt ext;
      for (;;) {
        ext.elems.push_back(term_());
        if (at(Tok::Comma)) {
          take();
          continue;
        }
        break;
      }
      if (at(Tok::Slash)) {
        take();
        ext.tail = term_();
      }
      expect(Tok::RBrace, "expected '}'");
      return term({std::move(ext), p});
    }
    if (at(Tok::LParen)) {
      take();
      SurTermPtr t = arith();
      expect(Tok::RParen, "expected ')'");
      return t;
    }
    throw ParseError("expected a term (got '" + peek().text + "')", p);
  }

  SurTermPtr ris_term() {
    Pos p = take().pos;  // 'ris'
    expect(Tok::LParen, "expected '(' after ris");
    SurTermPtr ctrl = ctrl_term();
    expect(Tok::Comma, "expected ','");
    SurTermPtr dom = term_();
    expect(Tok::Comma, "expected ','");
    URis ris{ctrl, dom, {}, nullptr, nullptr};
    if (at(Tok::LBracket) && try_locals(ris.locals)) {
      expect(Tok::Comma, "expected ',' after locals");
      ris.filter = formula_();
      expect(Tok::Comma, "expected ',' before functional predicates");
      ris.fpreds = formula_();
    } else {
      ris.filter = formula_();
    }
    expect(Tok::RParen, "expected ')'");
    return term({std::move(ris), p});
  }
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }
SurFormulaPtr parse_formula(std::string_view text) { return Parser(text).formula_only(); }
SurTermPtr parse_term(std::string_view text) { return Parser(text).term_only(); }

SurTermPtr mk_sur_term(SurTerm t) { return std::make_shared<const SurTerm>(std::move(t)); }
SurFormulaPtr mk_sur_formula(SurFormula f) {
  return std::make_shared<const SurFormula>(std::move(f));
}

}  // namespace rq
