#include <algorithm>
#include <cctype>
#include <set>

#include "sessionlr/syntax.hpp"

namespace slr {
namespace {

enum class Tok { kIdent, kPunct, kEnd };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

// Multi-character punctuation is matched longest first.
const char* const kPuncts[] = {"-o", "<-", "=>", "<=", "->", "::", "{", "}",
                               "(",  ")",  "[",  "]",  ":",  ";",  ",", ".",
                               "=",  "+",  "&",  "*",  "|",  "^",  "@"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& src, std::vector<Diagnostic>& errs) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Span sp{line, col};
    if (ident_start(c) || c == '1') {
      size_t j = i + 1;
      if (c != '1')
        while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::kIdent, src.substr(i, j - i), sp});
      adv(j - i);
      continue;
    }
    bool matched = false;
    for (const char* p : kPuncts) {
      std::string ps(p);
      if (src.compare(i, ps.size(), ps) == 0) {
        out.push_back({Tok::kPunct, ps, sp});
        adv(ps.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      errs.push_back({sp, "lex", std::string("unexpected character '") + c + "'", ""});
      adv(1);
    }
  }
  out.push_back({Tok::kEnd, "", {line, col}});
  return out;
}

struct ParseError {
  Diagnostic diag;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& errs)
      : toks_(std::move(toks)), errs_(errs) {}

  Signature run() {
    while (peek().kind != Tok::kEnd) {
      try {
        top_level();
      } catch (const ParseError& e) {
        errs_.push_back(e.diag);
        recover();
      }
    }
    resolve_procs();
    return sig_;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<Diagnostic>& errs_;
  Signature sig_;
  std::set<std::string> levels_;

  const Token& peek(size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool is(const std::string& s, size_t k = 0) const {
    return peek(k).kind != Tok::kEnd && peek(k).text == s;
  }
  bool is_ident(size_t k = 0) const { return peek(k).kind == Tok::kIdent; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError{{peek().span, "parse", msg, ""}};
  }
  void expect(const std::string& s) {
    if (!is(s)) fail("expected '" + s + "' but found '" + peek().text + "'");
    take();
  }
  Token ident(const char* what) {
    if (!is_ident()) fail(std::string("expected ") + what + " but found '" + peek().text + "'");
    return take();
  }
  void error(Span sp, const std::string& rule, const std::string& msg) {
    errs_.push_back({sp, rule, msg, ""});
  }

  // Skip to the next top-level keyword.
  void recover() {
    int depth = 0;
    while (peek().kind != Tok::kEnd) {
      if (is("{")) ++depth;
      if (is("}")) --depth;
      take();
      if (depth <= 0 && (is("type") || is("proc") || is("theory") || is("secrecy")))
        return;
    }
  }

  void top_level() {
    if (is("secrecy")) return secrecy_block();
    if (is("theory")) return theory_block();
    if (is("type")) return type_def();
    if (is("proc")) return proc_def();
    fail("expected 'secrecy', 'theory', 'type' or 'proc' but found '" + peek().text + "'");
  }

  void secrecy_block() {
    Span sp = take().span;
    if (sig_.has_lattice) error(sp, "duplicate", "duplicate secrecy block");
    sig_.has_lattice = true;
    expect("{");
    std::vector<std::string> row;
    while (!is("}")) {
      if (is(";")) {
        take();
        if (!row.empty()) sig_.lattice.rows.push_back(row);
        row.clear();
        continue;
      }
      Token t = ident("security level");
      row.push_back(t.text);
      levels_.insert(t.text);
    }
    if (!row.empty()) sig_.lattice.rows.push_back(row);
    expect("}");
  }

  SecPtr sec_term(const std::vector<std::string>& vars) {
    SecPtr t = sec_atom(vars);
    while (is("|")) {
      take();
      t = SecTerm::Join(t, sec_atom(vars));
    }
    return t;
  }

  SecPtr sec_atom(const std::vector<std::string>& vars) {
    if (is("(")) {
      take();
      SecPtr t = sec_term(vars);
      expect(")");
      return t;
    }
    Token t = ident("security term");
    if (std::find(vars.begin(), vars.end(), t.text) != vars.end())
      return SecTerm::Var(t.text);
    if (!levels_.count(t.text))
      error(t.span, "secrecy", "undeclared secrecy variable or level " + t.text);
    return SecTerm::Const(t.text);
  }

  void theory_block() {
    take();
    Token name = ident("theory name");
    Theory th;
    th.name = name.text;
    expect("(");
    while (!is(")")) {
      Token v = ident("secrecy variable");
      if (th.has_var(v.text)) error(v.span, "duplicate", "duplicate secrecy variable " + v.text);
      th.vars.push_back(v.text);
      if (!is(")")) expect(",");
    }
    expect(")");
    expect("{");
    while (!is("}")) {
      SecPtr lo = sec_term(th.vars);
      if (is("<=")) {
        take();
        th.hyps.push_back({lo, sec_term(th.vars)});
      } else {
        expect("=");
        SecPtr hi = sec_term(th.vars);
        // equality desugars to two inequalities
        th.hyps.push_back({lo, hi});
        th.hyps.push_back({hi, lo});
      }
      if (!is("}")) expect(";");
    }
    expect("}");
    if (sig_.find_theory(th.name)) error(name.span, "duplicate", "duplicate theory " + th.name);
    sig_.theories.push_back(std::move(th));
  }

  TypePtr type_expr() {
    Span sp = peek().span;
    TypePtr left = tensor_expr();
    if (is("-o")) {
      take();
      auto t = std::const_pointer_cast<Type>(Type::Lolli(left, type_expr()));
      t->span = sp;
      return t;
    }
    return left;
  }

  TypePtr tensor_expr() {
    Span sp = peek().span;
    TypePtr left = type_atom();
    if (is("*")) {
      take();
      auto t = std::const_pointer_cast<Type>(Type::Tensor(left, tensor_expr()));
      t->span = sp;
      return t;
    }
    return left;
  }

  TypePtr type_atom() {
    Span sp = peek().span;
    std::shared_ptr<Type> t;
    if (is("(")) {
      take();
      TypePtr inner = type_expr();
      expect(")");
      return inner;
    }
    if (is("1")) {
      take();
      t = std::const_pointer_cast<Type>(Type::One());
    } else if (is("+") || is("&")) {
      bool plus = take().text == "+";
      expect("{");
      Choices cs;
      std::set<std::string> seen;
      while (!is("}")) {
        Token l = ident("label");
        if (!seen.insert(l.text).second) error(l.span, "duplicate", "duplicate label " + l.text);
        expect(":");
        cs.push_back({l.text, type_expr()});
        if (!is("}")) expect(",");
      }
      expect("}");
      if (cs.empty()) error(sp, "parse", "empty choice");
      t = std::const_pointer_cast<Type>(plus ? Type::Plus(cs) : Type::With(cs));
    } else {
      Token n = ident("type");
      t = std::const_pointer_cast<Type>(Type::Var(n.text));
    }
    t->span = sp;
    return t;
  }

  void type_def() {
    take();
    Token name = ident("type name");
    expect("=");
    TypePtr body = type_expr();
    if (sig_.find_type(name.text)) error(name.span, "duplicate", "duplicate type " + name.text);
    sig_.types.push_back({name.text, body, name.span});
  }

  // Secrecy blocks and theories must precede the procs that use them.
  void proc_def() {
    Span sp = take().span;
    ProcDef p;
    p.span = sp;
    std::string theory_name;
    Span theory_span;
    if (is("[")) {
      take();
      Token t = ident("theory name");
      theory_name = t.text;
      theory_span = t.span;
      expect("]");
    }
    Token name = ident("process name");
    p.name = name.text;
    const Theory* th = theory_name.empty() ? nullptr : sig_.find_theory(theory_name);
    if (!theory_name.empty() && !th)
      error(theory_span, "theory", "unknown theory " + theory_name);
    if (th) p.theory = *th;
    const std::vector<std::string>& vars = p.theory.vars;

    std::set<std::string> names;
    expect("(");
    while (!is(")")) {
      Token v = ident("channel variable");
      expect(":");
      CtxEntry e{v.text, type_expr(), nullptr, v.span};
      if (is("[")) {
        take();
        e.sec = sec_term(vars);
        expect("]");
      }
      if (!names.insert(v.text).second)
        error(v.span, "duplicate", "duplicate channel variable " + v.text);
      p.context.push_back(std::move(e));
      if (!is(")")) expect(",");
    }
    expect(")");
    if (is("@")) {
      take();
      p.running = sec_term(vars);
    }
    expect("::");
    expect("(");
    Token off = ident("offered channel");
    p.offered = off.text;
    if (!names.insert(off.text).second)
      error(off.span, "duplicate", "duplicate channel variable " + off.text);
    expect(":");
    p.offered_type = type_expr();
    if (is("[")) {
      take();
      p.offered_sec = sec_term(vars);
      expect("]");
    }
    expect(")");
    expect("=");
    expect("{");
    p.body = term(vars);
    expect("}");
    if (sig_.find_proc(p.name)) error(name.span, "duplicate", "duplicate process " + p.name);
    sig_.procs.push_back(std::move(p));
  }

  Chan chan_use(const std::vector<std::string>& vars) {
    Token t = ident("channel");
    Chan c(t.text);
    if (is("^")) {
      take();
      c.annot = sec_atom(vars);
    }
    return c;
  }

  SecSubst subst(const std::vector<std::string>& vars) {
    SecSubst s;
    if (!is("[")) return s;
    take();
    while (!is("]")) {
      Token v = ident("secrecy variable");
      expect("->");
      SecPtr t = sec_term(vars);
      if (s.count(v.text)) error(v.span, "duplicate", "duplicate binding for " + v.text);
      s[v.text] = t;
      if (!is("]")) expect(",");
    }
    expect("]");
    return s;
  }

  std::vector<Chan> args(const std::vector<std::string>& vars) {
    std::vector<Chan> out;
    expect("(");
    while (!is(")")) {
      out.push_back(chan_use(vars));
      if (!is(")")) expect(",");
    }
    expect(")");
    return out;
  }

  TermPtr term(const std::vector<std::string>& vars) {
    Span sp = peek().span;
    if (is("case")) {
      take();
      Chan c = chan_use(vars);
      expect("{");
      Branches bs;
      std::set<std::string> seen;
      while (!is("}")) {
        Token l = ident("label");
        if (!seen.insert(l.text).second) error(l.span, "duplicate", "duplicate branch " + l.text);
        expect("=>");
        bs.push_back({l.text, term(vars)});
        if (!is("}")) expect(",");
      }
      expect("}");
      return TermBuilder::Case(c, std::move(bs), sp);
    }
    if (is("send")) {
      take();
      Chan sent = chan_use(vars);
      Chan carrier = chan_use(vars);
      expect(";");
      return TermBuilder::SendChan(sent, carrier, term(vars), sp);
    }
    if (is("close")) {
      take();
      return TermBuilder::Close(chan_use(vars), sp);
    }
    if (is("wait")) {
      take();
      Chan c = chan_use(vars);
      expect(";");
      return TermBuilder::Wait(c, term(vars), sp);
    }
    if (is("fwd")) {
      take();
      Chan dst = chan_use(vars);
      Chan src = chan_use(vars);
      return TermBuilder::Fwd(dst, src, "", sp);
    }
    if (is("(")) {
      take();
      TermPtr t = term(vars);
      expect(")");
      return t;
    }
    if (is_ident() && is(".", 1)) {
      Chan c(take().text);
      take();
      Token l = ident("label");
      expect(";");
      return TermBuilder::SendLabel(c, l.text, term(vars), sp);
    }
    if (is_ident() && (is("^", 1) && is(".", 3))) {
      Chan c = chan_use(vars);
      expect(".");
      Token l = ident("label");
      expect(";");
      return TermBuilder::SendLabel(c, l.text, term(vars), sp);
    }
    if (is_ident() && is("<-", 1)) {
      Token x = take();
      take();
      if (is("recv")) {
        take();
        Chan c = chan_use(vars);
        expect(";");
        return TermBuilder::RecvChan(x.text, c, term(vars), sp);
      }
      Token callee = ident("process name");
      SecSubst s = subst(vars);
      expect("<-");
      std::vector<Chan> as = args(vars);
      if (is(";")) {
        take();
        auto t = TermBuilder::Spawn(x.text, callee.text, s, as, term(vars), sp);
        return t;
      }
      return TermBuilder::TailCall(Chan(x.text), callee.text, s, as, sp);
    }
    fail("expected a process term but found '" + peek().text + "'");
  }

  void resolve_procs() {
    // secrecy used without a lattice
    if (!sig_.has_lattice) {
      for (const auto& p : sig_.procs)
        if (p.offered_sec || p.running || !p.theory.name.empty())
          error(p.span, "secrecy", "secrecy annotations in " + p.name +
                                       " but no secrecy block");
    }
  }
};

}  // namespace

Result<Signature> parse_signature(const std::string& text) {
  Result<Signature> res;
  auto toks = lex(text, res.errors);
  Parser p(std::move(toks), res.errors);
  Signature sig = p.run();
  if (res.errors.empty()) res.value = std::move(sig);
  return res;
}

}  // namespace slr
