#include "sessionlr/syntax.hpp"

namespace slr {

std::string forwarder_name(const std::string& type_name) { return "F_" + type_name; }

namespace {

using TB = TermBuilder;

std::string fresh_for_tail(const Term& t) {
  std::string n = t.chan.name + "'";
  auto clash = [&](const std::string& s) {
    if (s == t.chan.name) return true;
    for (const auto& a : t.args)
      if (a.name == s) return true;
    return false;
  };
  while (clash(n)) n += "'";
  return n;
}

TermPtr expand_tail(const TermPtr& t, const Signature& sig) {
  std::string fresh = fresh_for_tail(*t);
  std::string fwd_name;
  if (const ProcDef* callee = sig.find_proc(t->proc))
    if (callee->offered_type->kind == Type::Kind::kVar)
      fwd_name = forwarder_name(callee->offered_type->name);
  Chan dst = t->chan;
  Chan src(fresh);
  src.annot = dst.annot;
  auto fwd = TB::Fwd(dst, src, fwd_name, t->span);
  return TB::Spawn(fresh, t->proc, t->subst, t->args, fwd, t->span);
}

// `offered` is the current type of the offered channel, or null when it is
// no longer tracked.
TermPtr walk(const TermPtr& t, const Signature& sig, const std::string& self,
             TypePtr offered, std::vector<Diagnostic>* errs) {
  auto step = [&](const std::string& label, bool right) -> TypePtr {
    if (!offered) return nullptr;
    TypePtr u = unfold(offered, sig);
    if (!label.empty()) return u->is_choice() ? u->branch(label) : nullptr;
    if (u->kind == Type::Kind::kTensor || u->kind == Type::Kind::kLolli)
      return right ? u->right : u->left;
    return nullptr;
  };
  auto out = std::make_shared<Term>(*t);
  bool on_self = t->chan.name == self && !t->chan.runtime();
  switch (t->kind) {
    case Term::Kind::kTailCall: {
      if (errs && offered && on_self) {
        if (const ProcDef* callee = sig.find_proc(t->proc)) {
          if (!type_equal(offered, callee->offered_type, sig))
            errs->push_back({t->span, "Fwd",
                             "forward between unequal types " + print_type(offered) +
                                 " and " + print_type(callee->offered_type),
                             ""});
        }
      }
      return expand_tail(t, sig);
    }
    case Term::Kind::kFwd:
      if (on_self && offered && offered->kind == Type::Kind::kVar)
        out->forwarder = forwarder_name(offered->name);
      return out;
    case Term::Kind::kSendLabel:
      out->cont = walk(t->cont, sig, self, on_self ? step(t->label, true) : offered, errs);
      return out;
    case Term::Kind::kCase:
      for (auto& [l, b] : out->branches)
        b = walk(b, sig, self, on_self ? step(l, true) : offered, errs);
      return out;
    case Term::Kind::kSendChan:
      out->cont = walk(t->cont, sig, self, on_self ? step("", true) : offered, errs);
      return out;
    case Term::Kind::kRecvChan:
      out->cont = walk(t->cont, sig, t->binder == self ? "" : self,
                       on_self ? step("", true) : offered, errs);
      return out;
    case Term::Kind::kWait:
      out->cont = walk(t->cont, sig, self, offered, errs);
      return out;
    case Term::Kind::kSpawn:
      // the binder may shadow the offered name
      out->cont = walk(t->cont, sig, t->binder == self ? "" : self, offered, errs);
      return out;
    case Term::Kind::kClose:
      return out;
  }
  return out;
}

int fresh_counter(const Chan& a, const Chan& b, int n) {
  std::string cand = "w" + std::to_string(n);
  while (cand == a.name || cand == b.name) cand = "w" + std::to_string(++n);
  return n;
}

TermPtr expand_rec(const TypePtr& type, const Chan& dst, const Chan& src,
                   const Signature& sig, bool tail_leaves, int& counter, bool head) {
  if (type->kind == Type::Kind::kVar && !head) {
    std::string fw = forwarder_name(type->name);
    if (tail_leaves)
      return TB::TailCall(dst, fw, SecSubst{{"psi", SecTerm::Var("psi")}}, {src});
    return TB::Fwd(dst, src, fw);
  }
  TypePtr u = unfold(type, sig);
  switch (u->kind) {
    case Type::Kind::kOne:
      return TB::Wait(src, TB::Close(dst));
    case Type::Kind::kPlus: {
      Branches bs;
      for (const auto& [l, a] : u->choices)
        bs.push_back({l, TB::SendLabel(dst, l, expand_rec(a, dst, src, sig, tail_leaves,
                                                          counter, false))});
      return TB::Case(src, bs);
    }
    case Type::Kind::kWith: {
      Branches bs;
      for (const auto& [l, a] : u->choices)
        bs.push_back({l, TB::SendLabel(src, l, expand_rec(a, dst, src, sig, tail_leaves,
                                                          counter, false))});
      return TB::Case(dst, bs);
    }
    case Type::Kind::kTensor: {
      counter = fresh_counter(dst, src, counter + 1);
      std::string w = "w" + std::to_string(counter);
      auto rest = expand_rec(u->right, dst, src, sig, tail_leaves, counter, false);
      return TB::RecvChan(w, src, TB::SendChan(Chan(w), dst, rest));
    }
    case Type::Kind::kLolli: {
      counter = fresh_counter(dst, src, counter + 1);
      std::string w = "w" + std::to_string(counter);
      auto rest = expand_rec(u->right, dst, src, sig, tail_leaves, counter, false);
      return TB::RecvChan(w, dst, TB::SendChan(Chan(w), src, rest));
    }
    case Type::Kind::kVar:
      break;
  }
  throw Error("identity expansion reached an unfolded type variable");
}

TermPtr strip(const TermPtr& t) {
  auto out = std::make_shared<Term>(*t);
  out->chan.annot = nullptr;
  out->sent.annot = nullptr;
  for (auto& a : out->args) a.annot = nullptr;
  out->subst.clear();
  for (auto& [l, b] : out->branches) b = strip(b);
  if (t->cont) out->cont = strip(t->cont);
  return out;
}

}  // namespace

TermPtr desugar(const TermPtr& t, const Signature& sig) {
  return walk(t, sig, "", nullptr, nullptr);
}

Result<TermPtr> desugar_def(const ProcDef& def, const Signature& sig) {
  Result<TermPtr> res;
  TermPtr out = walk(def.body, sig, def.offered, def.offered_type, &res.errors);
  if (res.errors.empty()) res.value = out;
  return res;
}

TermPtr identity_expansion(const TypePtr& type, const Chan& dst, const Chan& src,
                           const Signature& sig, bool tail_leaves) {
  int counter = 0;
  return expand_rec(type, dst, src, sig, tail_leaves, counter, true);
}

ProcDef erase(const ProcDef& def) {
  ProcDef p = def;
  p.theory = Theory{};
  for (auto& e : p.context) e.sec = nullptr;
  p.running = nullptr;
  p.offered_sec = nullptr;
  p.body = strip(def.body);
  return p;
}

Signature erase(const Signature& sig) {
  Signature out;
  out.types = sig.types;
  for (const auto& p : sig.procs) out.procs.push_back(erase(p));
  for (const auto& [n, p] : sig.forwarders) out.forwarders[n] = erase(p);
  return out;
}

}  // namespace slr
