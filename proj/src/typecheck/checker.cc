#include <algorithm>

#include "sessionlr/typecheck.hpp"

namespace slr {

size_t Derivation::size() const {
  size_t n = 1;
  for (const auto& p : premises) n += p.size();
  return n;
}

namespace {

class Checker {
 public:
  Checker(const Signature& sig, const Semilattice* lat, const Theory* th)
      : sig_(sig), lat_(lat), th_(th) {}

  std::vector<Diagnostic> diags;

  Derivation check(LinCtx ctx, const TermPtr& t, SecPtr running, Offer off) {
    try {
      return go(std::move(ctx), t, std::move(running), std::move(off));
    } catch (const Error& e) {
      report(t->span, "TVar", e.what());
      return {"error", t->span, {}};
    }
  }

  // Presuppositions (i) and (ii) at the entry of a judgment.
  void presuppositions(const LinCtx& ctx, const SecPtr& running, const Offer& off,
                       Span sp) {
    if (!ifc()) return;
    for (const auto& [ch, item] : ctx)
      if (!le(item.sec, off.sec))
        report(sp, "presup(i)",
               "secrecy of " + to_string(ch) + " exceeds offered secrecy",
               {item.sec, off.sec});
    if (!le(running, off.sec))
      report(sp, "presup(ii)", "running secrecy exceeds offered secrecy",
             {running, off.sec});
  }

 private:
  const Signature& sig_;
  const Semilattice* lat_;
  const Theory* th_;

  bool ifc() const { return lat_ != nullptr; }

  bool le(const SecPtr& a, const SecPtr& b) {
    if (!a || !b) return false;
    if (sec_equal(a, b)) return true;
    return entails(*th_, *lat_, {a, b});
  }
  bool eq(const SecPtr& a, const SecPtr& b) { return le(a, b) && le(b, a); }

  // c | d, kept small when one side already bounds the other.
  SecPtr join(const SecPtr& c, const SecPtr& d) {
    if (le(c, d)) return d;
    if (le(d, c)) return c;
    return SecTerm::Join(c, d);
  }

  void report(Span sp, const std::string& rule, const std::string& msg,
              const Constraint& c = {}) {
    diags.push_back({sp, rule, msg, c.lo ? to_string(c) : ""});
  }

  void check_annot(const Chan& use, const SecPtr& actual, Span sp) {
    if (!ifc() || !use.annot) return;
    if (!eq(use.annot, actual))
      report(sp, "annot", "annotation on " + to_string(use) + " does not match its secrecy",
             {use.annot, actual});
  }

  TypePtr expect_kind(const TypePtr& t, Type::Kind k, const std::string& rule,
                      const std::string& what, Span sp) {
    TypePtr u = unfold(t, sig_);
    if (u->kind != k) {
      report(sp, rule, what + " has type " + print_type(t));
      return nullptr;
    }
    return u;
  }

  Derivation leaf(const std::string& rule, Span sp) { return {rule, sp, {}}; }

  Derivation go(LinCtx ctx, const TermPtr& t, SecPtr running, Offer off) {
    const Span sp = t->span;
    const bool on_offer = t->chan == off.chan;
    auto lookup = [&](const Chan& c) -> CtxItem* {
      auto it = ctx.find(c);
      if (it == ctx.end()) {
        report(sp, "linearity", "channel " + to_string(c) + " is not available here");
        return nullptr;
      }
      return &it->second;
    };
    auto fresh_binder = [&](const std::string& b) {
      Chan c(b);
      if (ctx.count(c) || c == off.chan)
        report(sp, "linearity", "binder " + b + " shadows a channel in scope");
      return c;
    };

    switch (t->kind) {
      case Term::Kind::kSendLabel: {
        if (on_offer) {
          check_annot(t->chan, off.sec, sp);
          TypePtr u = expect_kind(off.type, Type::Kind::kPlus, "+R",
                                  "offered channel " + to_string(off.chan), sp);
          if (!u) return leaf("+R", sp);
          TypePtr next = u->branch(t->label);
          if (!next) {
            report(sp, "+R", "unknown label " + t->label);
            return leaf("+R", sp);
          }
          off.type = next;
          return {"+R", sp, {go(std::move(ctx), t->cont, running, off)}};
        }
        CtxItem* it = lookup(t->chan);
        if (!it) return leaf("&L", sp);
        check_annot(t->chan, it->sec, sp);
        TypePtr u = expect_kind(it->type, Type::Kind::kWith, "&L",
                                "channel " + to_string(t->chan), sp);
        if (!u) return leaf("&L", sp);
        TypePtr next = u->branch(t->label);
        if (!next) {
          report(sp, "&L", "unknown label " + t->label);
          return leaf("&L", sp);
        }
        if (ifc() && !le(running, it->sec))
          report(sp, "&L",
                 "running secrecy " + to_string(running) + " is not below " +
                     to_string(it->sec) + " of " + to_string(t->chan) + " when sending " +
                     t->label,
                 {running, it->sec});
        it->type = next;
        return {"&L", sp, {go(std::move(ctx), t->cont, running, off)}};
      }

      case Term::Kind::kCase: {
        Derivation d;
        d.span = sp;
        TypePtr u;
        if (on_offer) {
          d.rule = "&R";
          check_annot(t->chan, off.sec, sp);
          u = expect_kind(off.type, Type::Kind::kWith, "&R",
                          "offered channel " + to_string(off.chan), sp);
        } else {
          d.rule = "+L";
          CtxItem* it = lookup(t->chan);
          if (!it) return leaf("+L", sp);
          check_annot(t->chan, it->sec, sp);
          u = expect_kind(it->type, Type::Kind::kPlus, "+L",
                          "channel " + to_string(t->chan), sp);
        }
        if (!u) return d;
        for (const auto& [l, ty] : u->choices)
          if (!t->branch(l)) report(sp, d.rule, "missing branch " + l);
        for (const auto& [l, body] : t->branches) {
          TypePtr next = u->branch(l);
          if (!next) {
            report(body->span, d.rule, "unknown label " + l);
            continue;
          }
          if (on_offer) {
            Offer o = off;
            o.type = next;
            d.premises.push_back(go(ctx, body, ifc() ? off.sec : running, o));
          } else {
            LinCtx c2 = ctx;
            CtxItem& item = c2[t->chan];
            item.type = next;
            SecPtr r = ifc() ? join(item.sec, running) : running;
            d.premises.push_back(go(std::move(c2), body, r, off));
          }
        }
        return d;
      }

      case Term::Kind::kSendChan: {
        if (t->sent == t->chan) {
          report(sp, "linearity", "cannot send a channel along itself");
          return leaf("send", sp);
        }
        CtxItem* z = lookup(t->sent);
        if (!z) return leaf("send", sp);
        CtxItem zi = *z;
        check_annot(t->sent, zi.sec, sp);
        if (on_offer) {
          check_annot(t->chan, off.sec, sp);
          TypePtr u = expect_kind(off.type, Type::Kind::kTensor, "*R",
                                  "offered channel " + to_string(off.chan), sp);
          if (!u) return leaf("*R", sp);
          if (!type_equal(zi.type, u->left, sig_))
            report(sp, "*R", "sent channel " + to_string(t->sent) + " has type " +
                                 print_type(zi.type) + ", expected " + print_type(u->left));
          if (ifc() && !eq(zi.sec, off.sec))
            report(sp, "*R", "sent channel secrecy differs from carrier",
                   {zi.sec, off.sec});
          ctx.erase(t->sent);
          off.type = u->right;
          return {"*R", sp, {go(std::move(ctx), t->cont, running, off)}};
        }
        CtxItem* x = lookup(t->chan);
        if (!x) return leaf("-oL", sp);
        check_annot(t->chan, x->sec, sp);
        TypePtr u = expect_kind(x->type, Type::Kind::kLolli, "-oL",
                                "channel " + to_string(t->chan), sp);
        if (!u) return leaf("-oL", sp);
        if (!type_equal(zi.type, u->left, sig_))
          report(sp, "-oL", "sent channel " + to_string(t->sent) + " has type " +
                                print_type(zi.type) + ", expected " + print_type(u->left));
        if (ifc()) {
          if (!le(running, x->sec))
            report(sp, "-oL",
                   "running secrecy " + to_string(running) + " is not below " +
                       to_string(x->sec) + " of " + to_string(t->chan),
                   {running, x->sec});
          if (!eq(zi.sec, x->sec))
            report(sp, "-oL", "sent channel secrecy differs from carrier", {zi.sec, x->sec});
        }
        x->type = u->right;
        ctx.erase(t->sent);
        return {"-oL", sp, {go(std::move(ctx), t->cont, running, off)}};
      }

      case Term::Kind::kRecvChan: {
        Chan w = fresh_binder(t->binder);
        if (on_offer) {
          check_annot(t->chan, off.sec, sp);
          TypePtr u = expect_kind(off.type, Type::Kind::kLolli, "-oR",
                                  "offered channel " + to_string(off.chan), sp);
          if (!u) return leaf("-oR", sp);
          ctx[w] = {u->left, off.sec};
          off.type = u->right;
          return {"-oR", sp, {go(std::move(ctx), t->cont, ifc() ? off.sec : running, off)}};
        }
        CtxItem* x = lookup(t->chan);
        if (!x) return leaf("*L", sp);
        check_annot(t->chan, x->sec, sp);
        TypePtr u = expect_kind(x->type, Type::Kind::kTensor, "*L",
                                "channel " + to_string(t->chan), sp);
        if (!u) return leaf("*L", sp);
        x->type = u->right;
        SecPtr c = x->sec;
        ctx[w] = {u->left, c};
        SecPtr r = ifc() ? join(c, running) : running;
        return {"*L", sp, {go(std::move(ctx), t->cont, r, off)}};
      }

      case Term::Kind::kClose: {
        if (!on_offer) {
          report(sp, "1R", "close on " + to_string(t->chan) + ", which is not the offered channel");
          return leaf("1R", sp);
        }
        check_annot(t->chan, off.sec, sp);
        expect_kind(off.type, Type::Kind::kOne, "1R",
                    "offered channel " + to_string(off.chan), sp);
        unconsumed(ctx, sp, "1R");
        return leaf("1R", sp);
      }

      case Term::Kind::kWait: {
        CtxItem* x = lookup(t->chan);
        if (!x) return leaf("1L", sp);
        check_annot(t->chan, x->sec, sp);
        expect_kind(x->type, Type::Kind::kOne, "1L", "channel " + to_string(t->chan), sp);
        ctx.erase(t->chan);
        return {"1L", sp, {go(std::move(ctx), t->cont, running, off)}};
      }

      case Term::Kind::kSpawn:
        return spawn(std::move(ctx), t, std::move(running), std::move(off));

      case Term::Kind::kTailCall: {
        Derivation inner = go(std::move(ctx), desugar(t, sig_), running, off);
        return {"tail", sp, {std::move(inner)}};
      }

      case Term::Kind::kFwd: {
        if (!on_offer) {
          report(sp, "Fwd", "forward must target the offered channel " + to_string(off.chan));
          return leaf("Fwd", sp);
        }
        check_annot(t->chan, off.sec, sp);
        CtxItem* z = lookup(t->sent);
        if (!z) return leaf("Fwd", sp);
        check_annot(t->sent, z->sec, sp);
        if (!type_equal(z->type, off.type, sig_))
          report(sp, "Fwd", "forward between unequal types " + print_type(z->type) +
                                " and " + print_type(off.type));
        if (ifc()) {
          if (!eq(z->sec, off.sec))
            report(sp, "Fwd", "forwarded channels have different secrecy", {z->sec, off.sec});
          if (!le(running, off.sec))
            report(sp, "Fwd", "running secrecy exceeds forwarded secrecy", {running, off.sec});
        }
        ctx.erase(t->sent);
        unconsumed(ctx, sp, "Fwd");
        return leaf("Fwd", sp);
      }
    }
    return leaf("?", sp);
  }

  void unconsumed(const LinCtx& ctx, Span sp, const std::string& rule) {
    if (ctx.empty()) return;
    std::string names;
    for (const auto& [c, item] : ctx) names += (names.empty() ? "" : ", ") + to_string(c);
    report(sp, rule, "unconsumed linear channels: " + names);
  }

  Derivation spawn(LinCtx ctx, const TermPtr& t, SecPtr running, Offer off) {
    const Span sp = t->span;
    const ProcDef* callee = sig_.find_proc(t->proc);
    if (!callee) {
      report(sp, "Spawn", "unknown process " + t->proc);
      return leaf("Spawn", sp);
    }
    if (t->args.size() != callee->context.size()) {
      report(sp, "Spawn", t->proc + " expects " + std::to_string(callee->context.size()) +
                              " arguments, got " + std::to_string(t->args.size()));
      return leaf("Spawn", sp);
    }
    const bool sec_ok = ifc() && callee->secured();
    if (ifc() && !callee->secured())
      report(sp, "Spawn", "callee " + t->proc + " has no secrecy annotations");
    SecPtr gpsi;
    if (sec_ok) {
      for (auto d : check_subst(*th_, t->subst, callee->theory, *lat_)) {
        d.span = sp;
        diags.push_back(std::move(d));
      }
      for (const auto& v : callee->theory.vars)
        if (!t->subst.count(v)) return leaf("Spawn", sp);
      gpsi = apply_subst(t->subst, callee->offered_sec);
      if (!le(gpsi, off.sec))
        report(sp, "Spawn", "spawned secrecy exceeds offered secrecy", {gpsi, off.sec});
      SecPtr g0 = apply_subst(t->subst, callee->running);
      if (!le(running, g0))
        report(sp, "Spawn", "running secrecy exceeds callee running secrecy", {running, g0});
    }
    for (size_t i = 0; i < t->args.size(); ++i) {
      const Chan& a = t->args[i];
      auto it = ctx.find(a);
      if (it == ctx.end()) {
        report(sp, "linearity", "channel " + to_string(a) + " is not available here");
        continue;
      }
      check_annot(a, it->second.sec, sp);
      const CtxEntry& formal = callee->context[i];
      if (!type_equal(it->second.type, formal.type, sig_))
        report(sp, "Spawn", "argument " + to_string(a) + " has type " +
                                print_type(it->second.type) + ", expected " +
                                print_type(formal.type));
      if (sec_ok) {
        SecPtr want = apply_subst(t->subst, formal.sec);
        if (!eq(it->second.sec, want))
          report(sp, "Spawn", "argument " + to_string(a) + " secrecy mismatch",
                 {it->second.sec, want});
      }
      ctx.erase(it);
    }
    Chan x(t->binder);
    if (ctx.count(x) || x == off.chan)
      report(sp, "linearity", "binder " + t->binder + " shadows a channel in scope");
    ctx[x] = {callee->offered_type, gpsi};
    return {"Spawn", sp, {go(std::move(ctx), t->cont, running, off)}};
  }
};

}  // namespace

LinCtx def_context(const ProcDef& def, bool ifc) {
  LinCtx ctx;
  for (const auto& e : def.context) ctx[Chan(e.var)] = {e.type, ifc ? e.sec : nullptr};
  return ctx;
}

Offer def_offer(const ProcDef& def, bool ifc) {
  return {Chan(def.offered), def.offered_type, ifc ? def.offered_sec : nullptr};
}

Result<Derivation> check_proc_structural(const LinCtx& ctx, const TermPtr& term,
                                         const Offer& offered, const Signature& sig) {
  Theory empty;
  Checker ch(sig, nullptr, &empty);
  Derivation d = ch.check(ctx, term, nullptr, offered);
  Result<Derivation> res;
  res.errors = std::move(ch.diags);
  if (res.errors.empty()) res.value = std::move(d);
  return res;
}

Result<Derivation> check_proc_ifc(const Judgment& j, const Signature& sig,
                                  const Semilattice& lat) {
  Checker ch(sig, &lat, &j.theory);
  Result<Derivation> res;
  bool complete = j.running && j.offered.sec;
  for (const auto& [c, item] : j.ctx) complete = complete && item.sec;
  if (!complete) {
    res.errors.push_back({j.term->span, "Sig3", "missing secrecy annotation", ""});
    return res;
  }
  ch.presuppositions(j.ctx, j.running, j.offered, j.term->span);
  Derivation d = ch.check(j.ctx, j.term, j.running, j.offered);
  res.errors = std::move(ch.diags);
  std::stable_sort(res.errors.begin(), res.errors.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
  if (res.errors.empty()) res.value = std::move(d);
  return res;
}

namespace {

std::vector<Diagnostic> check_types(const Signature& sig) {
  std::vector<Diagnostic> out;
  for (const auto& d : sig.types)
    for (auto& e : check_contractive(d, sig)) out.push_back(std::move(e));
  return out;
}

std::vector<const ProcDef*> all_procs(const Signature& sig) {
  std::vector<const ProcDef*> out;
  for (const auto& p : sig.procs) out.push_back(&p);
  for (const auto& [n, p] : sig.forwarders) out.push_back(&p);
  return out;
}

void tag(std::vector<Diagnostic>& ds, const ProcDef& p) {
  for (auto& d : ds) d.message = p.name + ": " + d.message;
}

}  // namespace

std::vector<Diagnostic> check_signature_structural(const Signature& sig) {
  std::vector<Diagnostic> out = check_types(sig);
  if (!out.empty()) return out;
  for (const ProcDef* p : all_procs(sig)) {
    auto r = check_proc_structural(def_context(*p, false), p->body, def_offer(*p, false), sig);
    tag(r.errors, *p);
    out.insert(out.end(), r.errors.begin(), r.errors.end());
  }
  return out;
}

std::vector<Diagnostic> check_signature_ifc(const Signature& sig, const Semilattice& lat) {
  std::vector<Diagnostic> out = check_types(sig);
  if (!out.empty()) return out;
  for (const ProcDef* p : all_procs(sig)) {
    std::vector<Diagnostic> ds;
    if (!satisfiable(p->theory, lat)) {
      ds.push_back({p->span, "Sig3", "theory " + p->theory.name + " is unsatisfiable", ""});
    } else {
      Judgment j{p->theory, def_context(*p, true), p->body, p->running, def_offer(*p, true)};
      auto r = check_proc_ifc(j, sig, lat);
      ds = std::move(r.errors);
    }
    tag(ds, *p);
    out.insert(out.end(), ds.begin(), ds.end());
  }
  return out;
}

ProcDef gen_forwarder(const std::string& type_name, const Signature& sig) {
  if (!sig.find_type(type_name)) throw Error("undefined type " + type_name);
  ProcDef p;
  p.name = forwarder_name(type_name);
  TypePtr y = Type::Var(type_name);
  p.offered = "y";
  p.offered_type = y;
  p.body = identity_expansion(y, Chan("y"), Chan("z"), sig, true);
  p.context.push_back({"z", y, nullptr, {}});
  if (sig.has_lattice) {
    SecPtr psi = SecTerm::Var("psi");
    p.theory.name = p.name;
    p.theory.vars = {"psi"};
    p.context[0].sec = psi;
    p.running = psi;
    p.offered_sec = psi;
  } else {
    p = erase(p);
  }
  return p;
}

void install_forwarders(Signature& sig) {
  sig.forwarders.clear();
  for (const auto& d : sig.types) sig.forwarders[d.name] = gen_forwarder(d.name, sig);
}

}  // namespace slr
