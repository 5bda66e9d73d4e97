#include <algorithm>
#include <set>

#include "sessionlr/syntax.hpp"

namespace slr {

TypePtr Type::One() { return std::make_shared<Type>(); }

TypePtr Type::Plus(Choices c) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kPlus;
  t->choices = std::move(c);
  return t;
}

TypePtr Type::With(Choices c) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kWith;
  t->choices = std::move(c);
  return t;
}

TypePtr Type::Tensor(TypePtr a, TypePtr b) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kTensor;
  t->left = std::move(a);
  t->right = std::move(b);
  return t;
}

TypePtr Type::Lolli(TypePtr a, TypePtr b) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kLolli;
  t->left = std::move(a);
  t->right = std::move(b);
  return t;
}

TypePtr Type::Var(std::string n) {
  auto t = std::make_shared<Type>();
  t->kind = Kind::kVar;
  t->name = std::move(n);
  return t;
}

TypePtr Type::branch(const std::string& label) const {
  for (const auto& [l, t] : choices)
    if (l == label) return t;
  return nullptr;
}

std::string to_string(const TypePtr& t) { return print_type(t); }

bool type_syntax_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::kOne:
      return true;
    case Type::Kind::kVar:
      return a->name == b->name;
    case Type::Kind::kTensor:
    case Type::Kind::kLolli:
      return type_syntax_equal(a->left, b->left) &&
             type_syntax_equal(a->right, b->right);
    case Type::Kind::kPlus:
    case Type::Kind::kWith:
      if (a->choices.size() != b->choices.size()) return false;
      for (size_t i = 0; i < a->choices.size(); ++i)
        if (a->choices[i].first != b->choices[i].first ||
            !type_syntax_equal(a->choices[i].second, b->choices[i].second))
          return false;
      return true;
  }
  return false;
}

std::string to_string(const Chan& c) {
  return !c.runtime() ? c.name : c.name + "#" + std::to_string(c.gen);
}

const Term* Term::branch(const std::string& l) const {
  for (const auto& [k, t] : branches)
    if (k == l) return t.get();
  return nullptr;
}

namespace {
std::shared_ptr<Term> make(Term::Kind k, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->span = s;
  return t;
}
}  // namespace

TermPtr TermBuilder::SendLabel(Chan c, std::string label, TermPtr k, Span s) {
  auto t = make(Term::Kind::kSendLabel, s);
  t->chan = std::move(c);
  t->label = std::move(label);
  t->cont = std::move(k);
  return t;
}

TermPtr TermBuilder::Case(Chan c, Branches b, Span s) {
  auto t = make(Term::Kind::kCase, s);
  t->chan = std::move(c);
  t->branches = std::move(b);
  return t;
}

TermPtr TermBuilder::SendChan(Chan sent, Chan carrier, TermPtr k, Span s) {
  auto t = make(Term::Kind::kSendChan, s);
  t->sent = std::move(sent);
  t->chan = std::move(carrier);
  t->cont = std::move(k);
  return t;
}

TermPtr TermBuilder::RecvChan(std::string binder, Chan carrier, TermPtr k, Span s) {
  auto t = make(Term::Kind::kRecvChan, s);
  t->binder = std::move(binder);
  t->chan = std::move(carrier);
  t->cont = std::move(k);
  return t;
}

TermPtr TermBuilder::Close(Chan c, Span s) {
  auto t = make(Term::Kind::kClose, s);
  t->chan = std::move(c);
  return t;
}

TermPtr TermBuilder::Wait(Chan c, TermPtr k, Span s) {
  auto t = make(Term::Kind::kWait, s);
  t->chan = std::move(c);
  t->cont = std::move(k);
  return t;
}

TermPtr TermBuilder::Spawn(std::string binder, std::string proc, SecSubst sub,
                           std::vector<Chan> args, TermPtr k, Span s) {
  auto t = make(Term::Kind::kSpawn, s);
  t->binder = std::move(binder);
  t->proc = std::move(proc);
  t->subst = std::move(sub);
  t->args = std::move(args);
  t->cont = std::move(k);
  return t;
}

TermPtr TermBuilder::Fwd(Chan dst, Chan src, std::string forwarder, Span s) {
  auto t = make(Term::Kind::kFwd, s);
  t->chan = std::move(dst);
  t->sent = std::move(src);
  t->forwarder = std::move(forwarder);
  return t;
}

TermPtr TermBuilder::TailCall(Chan dst, std::string proc, SecSubst sub,
                              std::vector<Chan> args, Span s) {
  auto t = make(Term::Kind::kTailCall, s);
  t->chan = std::move(dst);
  t->proc = std::move(proc);
  t->subst = std::move(sub);
  t->args = std::move(args);
  return t;
}

namespace {

bool chan_equal(const Chan& a, const Chan& b) {
  return a == b && sec_equal(a.annot, b.annot);
}

bool subst_equal(const SecSubst& a, const SecSubst& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first || !sec_equal(ia->second, ib->second)) return false;
  return true;
}

}  // namespace

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (!chan_equal(a->chan, b->chan) || a->label != b->label ||
      !chan_equal(a->sent, b->sent) || a->binder != b->binder ||
      a->proc != b->proc || a->forwarder != b->forwarder ||
      !subst_equal(a->subst, b->subst) || a->args.size() != b->args.size() ||
      a->branches.size() != b->branches.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!chan_equal(a->args[i], b->args[i])) return false;
  for (size_t i = 0; i < a->branches.size(); ++i)
    if (a->branches[i].first != b->branches[i].first ||
        !term_equal(a->branches[i].second, b->branches[i].second))
      return false;
  return term_equal(a->cont, b->cont);
}

namespace {

void free_rec(const TermPtr& t, std::vector<Chan>& bound, std::vector<Chan>& out) {
  auto use = [&](const Chan& c) {
    if (std::find(bound.begin(), bound.end(), c) != bound.end()) return;
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(Chan(c.name, c.gen));
  };
  switch (t->kind) {
    case Term::Kind::kSendLabel:
    case Term::Kind::kWait:
      use(t->chan);
      free_rec(t->cont, bound, out);
      break;
    case Term::Kind::kCase:
      use(t->chan);
      for (const auto& [l, b] : t->branches) free_rec(b, bound, out);
      break;
    case Term::Kind::kSendChan:
      use(t->sent);
      use(t->chan);
      free_rec(t->cont, bound, out);
      break;
    case Term::Kind::kRecvChan:
      use(t->chan);
      bound.push_back(Chan(t->binder));
      free_rec(t->cont, bound, out);
      bound.pop_back();
      break;
    case Term::Kind::kClose:
      use(t->chan);
      break;
    case Term::Kind::kSpawn:
      for (const auto& a : t->args) use(a);
      bound.push_back(Chan(t->binder));
      free_rec(t->cont, bound, out);
      bound.pop_back();
      break;
    case Term::Kind::kFwd:
      use(t->chan);
      use(t->sent);
      break;
    case Term::Kind::kTailCall:
      use(t->chan);
      for (const auto& a : t->args) use(a);
      break;
  }
}

Chan rename_chan(const Chan& c, const std::map<Chan, Chan>& m) {
  auto it = m.find(c);
  if (it == m.end()) return c;
  Chan r = it->second;
  r.annot = c.annot;
  return r;
}

TermPtr rename_rec(const TermPtr& t, std::map<Chan, Chan> m) {
  auto out = std::make_shared<Term>(*t);
  out->chan = rename_chan(t->chan, m);
  out->sent = rename_chan(t->sent, m);
  for (auto& a : out->args) a = rename_chan(a, m);
  if (t->kind == Term::Kind::kRecvChan || t->kind == Term::Kind::kSpawn) {
    // binder shadows: stop renaming it below
    m.erase(Chan(t->binder));
    auto hits = [&](const std::string& n) {
      for (const auto& [from, to] : m)
        if (to.name == n) return true;
      return false;
    };
    if (hits(t->binder)) {
      // a free channel would be captured; move the binder out of the way
      auto fv = t->cont ? free_chans(t->cont) : std::vector<Chan>{};
      std::string b = t->binder;
      auto used = [&](const std::string& n) {
        return hits(n) || std::any_of(fv.begin(), fv.end(), [&](const Chan& c) { return c.name == n; });
      };
      do b += "'";
      while (used(b));
      m[Chan(t->binder)] = Chan(b);
      out->binder = b;
    }
  }
  for (auto& [l, b] : out->branches) b = rename_rec(b, m);
  if (t->cont) out->cont = rename_rec(t->cont, m);
  return out;
}

SecPtr subst_opt(const SecPtr& p, const SecSubst& s) {
  if (!p) return p;
  // variables not mentioned in s are left alone
  std::vector<std::string> vars;
  collect_vars(p, vars);
  SecSubst full = s;
  for (const auto& v : vars)
    if (!full.count(v)) full[v] = SecTerm::Var(v);
  return apply_subst(full, p);
}

}  // namespace

std::vector<Chan> free_chans(const TermPtr& t) {
  std::vector<Chan> bound, out;
  free_rec(t, bound, out);
  return out;
}

TermPtr rename(const TermPtr& t, const std::map<Chan, Chan>& m) {
  if (m.empty()) return t;
  return rename_rec(t, m);
}

TermPtr subst_sec(const TermPtr& t, const SecSubst& s) {
  auto out = std::make_shared<Term>(*t);
  out->chan.annot = subst_opt(t->chan.annot, s);
  out->sent.annot = subst_opt(t->sent.annot, s);
  for (auto& a : out->args) a.annot = subst_opt(a.annot, s);
  for (auto& [v, term] : out->subst) term = subst_opt(term, s);
  for (auto& [l, b] : out->branches) b = subst_sec(b, s);
  if (t->cont) out->cont = subst_sec(t->cont, s);
  return out;
}

bool has_tail_calls(const TermPtr& t) {
  if (t->kind == Term::Kind::kTailCall) return true;
  for (const auto& [l, b] : t->branches)
    if (has_tail_calls(b)) return true;
  return t->cont && has_tail_calls(t->cont);
}

const TypeDef* Signature::find_type(const std::string& n) const {
  for (const auto& d : types)
    if (d.name == n) return &d;
  return nullptr;
}

const ProcDef* Signature::find_proc(const std::string& n) const {
  for (const auto& d : procs)
    if (d.name == n) return &d;
  for (const auto& [ty, d] : forwarders)
    if (d.name == n) return &d;
  return nullptr;
}

const Theory* Signature::find_theory(const std::string& n) const {
  for (const auto& t : theories)
    if (t.name == n) return &t;
  return nullptr;
}

namespace {

bool theory_equal(const Theory& a, const Theory& b) {
  if (a.name != b.name || a.vars != b.vars || a.hyps.size() != b.hyps.size())
    return false;
  for (size_t i = 0; i < a.hyps.size(); ++i)
    if (!sec_equal(a.hyps[i].lo, b.hyps[i].lo) ||
        !sec_equal(a.hyps[i].hi, b.hyps[i].hi))
      return false;
  return true;
}

bool proc_equal(const ProcDef& a, const ProcDef& b) {
  if (a.name != b.name || !theory_equal(a.theory, b.theory) ||
      a.context.size() != b.context.size() || !sec_equal(a.running, b.running) ||
      a.offered != b.offered || !type_syntax_equal(a.offered_type, b.offered_type) ||
      !sec_equal(a.offered_sec, b.offered_sec) || !term_equal(a.body, b.body))
    return false;
  for (size_t i = 0; i < a.context.size(); ++i)
    if (a.context[i].var != b.context[i].var ||
        !type_syntax_equal(a.context[i].type, b.context[i].type) ||
        !sec_equal(a.context[i].sec, b.context[i].sec))
      return false;
  return true;
}

}  // namespace

bool signature_equal(const Signature& a, const Signature& b) {
  if (a.has_lattice != b.has_lattice || a.lattice.rows != b.lattice.rows ||
      a.lattice.leq != b.lattice.leq || a.theories.size() != b.theories.size() ||
      a.types.size() != b.types.size() || a.procs.size() != b.procs.size())
    return false;
  for (size_t i = 0; i < a.theories.size(); ++i)
    if (!theory_equal(a.theories[i], b.theories[i])) return false;
  for (size_t i = 0; i < a.types.size(); ++i)
    if (a.types[i].name != b.types[i].name ||
        !type_syntax_equal(a.types[i].body, b.types[i].body))
      return false;
  for (size_t i = 0; i < a.procs.size(); ++i)
    if (!proc_equal(a.procs[i], b.procs[i])) return false;
  return true;
}

}  // namespace slr
