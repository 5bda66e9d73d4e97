#include "sessionlr/runtime.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

namespace slr {
namespace {

SecPtr level(const Semilattice& lat, int i) { return SecTerm::Const(lat.name(i)); }

SecSubst const_subst(const Valuation& val, const Semilattice& lat) {
  SecSubst s;
  for (const auto& [v, i] : val) s[v] = level(lat, i);
  return s;
}

SecPtr eval_level(const SecPtr& t, const Valuation& val, const Semilattice& lat) {
  return level(lat, join_eval(t, val, lat));
}

// Body of `def` with its offered channel and context renamed to runtime
// channels and its secrecy variables fixed by `val`.
TermPtr instantiate(const ProcDef& def, const Chan& self, const std::vector<Chan>& args,
                    const Valuation& val, const Semilattice* lat) {
  if (args.size() != def.context.size())
    throw Error("arity mismatch instantiating " + def.name);
  TermPtr body = def.body;
  if (lat && def.secured()) body = subst_sec(body, const_subst(val, *lat));
  std::map<Chan, Chan> m;
  m[Chan(def.offered)] = self;
  for (size_t i = 0; i < args.size(); ++i) m[Chan(def.context[i].var)] = args[i];
  return rename(body, m);
}

// Valuation of the callee's theory induced by a spawn substitution whose
// right-hand sides are already constants.
Valuation callee_valuation(const ProcDef& callee, const SecSubst& s, const Semilattice& lat) {
  Valuation v;
  for (const auto& name : callee.theory.vars) {
    auto it = s.find(name);
    if (it == s.end()) throw Error("spawn of " + callee.name + " leaves " + name + " unbound");
    v[name] = join_eval(it->second, {}, lat);
  }
  return v;
}

const ProcDef& lookup_proc(const RunContext& rc, const std::string& name) {
  const ProcDef* p = rc.sig->find_proc(name);
  if (!p) throw Error("unknown process " + name);
  return *p;
}

int find_msg(const Configuration& c, const Chan& ch, Dir d) {
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (n.is_msg && n.dir == d && n.chan == ch) return static_cast<int>(i);
  }
  return -1;
}

bool rule_order(const Redex& a, const Redex& b) {
  if (a.principal != b.principal) return a.principal < b.principal;
  if (a.rule != b.rule) return a.rule < b.rule;
  return a.proc < b.proc;
}

}  // namespace

Configuration init_config(const std::string& name, const RunContext& rc,
                          const std::map<std::string, std::string>& providers,
                          const Valuation& given) {
  const ProcDef& def = lookup_proc(rc, name);
  const Semilattice* lat = rc.lat && def.secured() ? rc.lat : nullptr;
  Valuation val = given;
  if (lat && val.empty() && !def.theory.vars.empty()) {
    auto ms = models(def.theory, *lat);
    if (ms.empty()) throw Error("theory of " + name + " is unsatisfiable");
    val = ms.front();
  }
  Configuration c;
  std::vector<Chan> args;
  for (const auto& e : def.context) {
    Chan ch(e.var, 0);
    args.push_back(ch);
    SecPtr sec = lat ? eval_level(e.sec, val, *lat) : nullptr;
    auto pit = providers.find(e.var);
    if (pit == providers.end()) {
      c.clients.push_back({ch, e.type, sec});
      continue;
    }
    const ProcDef& pdef = lookup_proc(rc, pit->second);
    if (!pdef.context.empty())
      throw Error("provider " + pdef.name + " for " + e.var + " is not closed");
    Valuation pval;
    const Semilattice* plat = rc.lat && pdef.secured() ? rc.lat : nullptr;
    if (plat && !pdef.theory.vars.empty()) {
      auto ms = models(pdef.theory, *plat);
      if (ms.empty()) throw Error("theory of " + pdef.name + " is unsatisfiable");
      pval = ms.front();
    }
    c.nodes.push_back(make_proc(ch, instantiate(pdef, ch, {}, pval, plat), pdef.offered_type,
                                plat ? eval_level(pdef.offered_sec, pval, *plat) : nullptr,
                                plat ? eval_level(pdef.running, pval, *plat) : nullptr));
  }
  Chan self(def.offered, 0);
  c.nodes.insert(c.nodes.begin(),
                 make_proc(self, instantiate(def, self, args, val, lat), def.offered_type,
                           lat ? eval_level(def.offered_sec, val, *lat) : nullptr,
                           lat ? eval_level(def.running, val, *lat) : nullptr));
  return c;
}

std::vector<Redex> enabled_redexes(const Configuration& c) {
  std::vector<Redex> out;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (n.is_msg) continue;
    const Term& t = *n.term;
    const bool own = t.chan == n.chan;
    const int pi = static_cast<int>(i);
    switch (t.kind) {
      case Term::Kind::kSendLabel:
        out.push_back({own ? "plus_snd" : "with_snd", pi, -1, t.chan});
        break;
      case Term::Kind::kSendChan:
        out.push_back({own ? "tensor_snd" : "lolli_snd", pi, -1, t.chan});
        break;
      case Term::Kind::kClose:
        out.push_back({"one_snd", pi, -1, t.chan});
        break;
      case Term::Kind::kSpawn:
      case Term::Kind::kTailCall:
        out.push_back({"spawn", pi, -1, n.chan});
        break;
      case Term::Kind::kFwd:
        out.push_back({"fwd", pi, -1, n.chan});
        break;
      case Term::Kind::kCase: {
        int m = find_msg(c, t.chan, own ? Dir::kLeft : Dir::kRight);
        if (m >= 0 && c.nodes[m].mkind == MsgKind::kLabel)
          out.push_back({own ? "with_rcv" : "plus_rcv", pi, m, t.chan});
        break;
      }
      case Term::Kind::kRecvChan: {
        int m = find_msg(c, t.chan, own ? Dir::kLeft : Dir::kRight);
        if (m >= 0 && c.nodes[m].mkind == MsgKind::kChan)
          out.push_back({own ? "lolli_rcv" : "tensor_rcv", pi, m, t.chan});
        break;
      }
      case Term::Kind::kWait: {
        int m = find_msg(c, t.chan, Dir::kRight);
        if (m >= 0 && c.nodes[m].mkind == MsgKind::kClose)
          out.push_back({"one_rcv", pi, m, t.chan});
        break;
      }
    }
  }
  std::sort(out.begin(), out.end(), rule_order);
  return out;
}

Configuration step(const Configuration& c, const Redex& r, const RunContext& rc,
                   TraceEvent* ev) {
  auto en = enabled_redexes(c);
  if (std::find(en.begin(), en.end(), r) == en.end())
    throw Error("stale redex " + r.rule + " at " + to_string(r.principal));
  Configuration out = c;
  Node& p = out.nodes[r.proc];
  const Term& t = *p.term;
  const Semilattice* lat = rc.lat && p.sec ? rc.lat : nullptr;
  if (ev) {
    ev->rule = r.rule;
    ev->channel = r.principal;
    ev->label.clear();
    ev->sent.clear();
  }
  auto subst1 = [](const TermPtr& body, const Chan& from, const Chan& to) {
    return rename(body, {{from, to}});
  };
  auto raise = [&](const SecPtr& by) {
    if (lat && by) p.running = level(*lat, lat->join(lat->index(by->name), lat->index(p.running->name)));
  };
  std::vector<Node> added;
  int remove = -1;

  if (r.rule == "plus_snd" || r.rule == "tensor_snd" || r.rule == "one_snd") {
    // provider sends on its own channel
    Chan y = p.chan;
    TypePtr u = unfold(p.type, *rc.sig);
    if (r.rule == "one_snd") {
      added.push_back(make_msg(MsgKind::kClose, Dir::kRight, y, p.type, "", {}, p.sec));
      remove = r.proc;
    } else if (r.rule == "plus_snd") {
      TypePtr next = u->branch(t.label);
      if (!next) throw Error("label " + t.label + " not in " + print_type(p.type));
      added.push_back(make_msg(MsgKind::kLabel, Dir::kRight, y, p.type, t.label, {}, p.sec));
      p.term = subst1(t.cont, y, y.next());
      p.type = next;
      p.chan = y.next();
      if (ev) ev->label = t.label;
    } else {
      added.push_back(make_msg(MsgKind::kChan, Dir::kRight, y, p.type, "", t.sent, p.sec));
      p.term = subst1(t.cont, y, y.next());
      p.type = u->right;
      p.chan = y.next();
      if (ev) ev->sent = to_string(t.sent);
    }
  } else if (r.rule == "with_snd" || r.rule == "lolli_snd") {
    // client sends on a used channel
    Chan x = t.chan;
    TypePtr xt = chan_type(c, x);
    if (!xt) throw Error("no type for " + to_string(x));
    TypePtr u = unfold(xt, *rc.sig);
    SecPtr xs = chan_sec(c, x);
    if (r.rule == "with_snd") {
      TypePtr next = u->branch(t.label);
      if (!next) throw Error("label " + t.label + " not in " + print_type(xt));
      added.push_back(make_msg(MsgKind::kLabel, Dir::kLeft, x, next, t.label, {}, xs));
      if (ev) ev->label = t.label;
    } else {
      added.push_back(make_msg(MsgKind::kChan, Dir::kLeft, x, u->right, "", t.sent, xs));
      if (ev) ev->sent = to_string(t.sent);
    }
    p.term = subst1(t.cont, x, x.next());
  } else if (r.rule == "plus_rcv" || r.rule == "tensor_rcv" || r.rule == "one_rcv") {
    const Node& m = c.nodes[r.msg];
    Chan x = t.chan;
    if (r.rule == "plus_rcv") {
      auto it = std::find_if(t.branches.begin(), t.branches.end(),
                             [&](const auto& br) { return br.first == m.label; });
      if (it == t.branches.end()) throw Error("no branch for " + m.label);
      p.term = subst1(it->second, x, x.next());
      if (ev) ev->label = m.label;
    } else if (r.rule == "tensor_rcv") {
      p.term = rename(t.cont, {{Chan(t.binder), m.sent}, {x, x.next()}});
      if (ev) ev->sent = to_string(m.sent);
    } else {
      p.term = t.cont;
    }
    raise(m.sec);
    remove = r.msg;
  } else if (r.rule == "with_rcv" || r.rule == "lolli_rcv") {
    const Node& m = c.nodes[r.msg];
    Chan y = p.chan;
    TypePtr u = unfold(p.type, *rc.sig);
    if (r.rule == "with_rcv") {
      auto it = std::find_if(t.branches.begin(), t.branches.end(),
                             [&](const auto& br) { return br.first == m.label; });
      if (it == t.branches.end()) throw Error("no branch for " + m.label);
      p.term = subst1(it->second, y, y.next());
      p.type = u->branch(m.label);
      if (ev) ev->label = m.label;
    } else {
      p.term = rename(t.cont, {{Chan(t.binder), m.sent}, {y, y.next()}});
      p.type = u->right;
      if (ev) ev->sent = to_string(m.sent);
    }
    p.chan = y.next();
    if (lat) p.running = p.sec;
    remove = r.msg;
  } else if (r.rule == "spawn") {
    const ProcDef& callee = lookup_proc(rc, t.proc);
    const Semilattice* clat = lat && callee.secured() ? lat : nullptr;
    Valuation val = clat ? callee_valuation(callee, t.subst, *clat) : Valuation{};
    if (t.kind == Term::Kind::kTailCall && rc.inline_tail_calls) {
      p.term = instantiate(callee, p.chan, t.args, val, clat);
      if (clat) p.running = eval_level(callee.running, val, *clat);
      if (ev) ev->rule = "call";
    } else {
      std::string base =
          (t.kind == Term::Kind::kTailCall ? t.chan.name + "'" : t.binder) + "%" +
          std::to_string(out.next_fresh++);
      Chan fresh(base, 0);
      added.push_back(make_proc(fresh, instantiate(callee, fresh, t.args, val, clat),
                                callee.offered_type,
                                clat ? eval_level(callee.offered_sec, val, *clat) : nullptr,
                                clat ? eval_level(callee.running, val, *clat) : nullptr));
      if (t.kind == Term::Kind::kTailCall)
        p.term = TermBuilder::Fwd(t.chan, fresh, "", t.span);
      else
        p.term = subst1(t.cont, Chan(t.binder), fresh);
      if (ev) ev->sent = to_string(fresh);
    }
  } else if (r.rule == "fwd") {
    p.term = identity_expansion(p.type, t.chan, t.sent, *rc.sig, false);
  } else {
    throw Error("unknown rule " + r.rule);
  }

  if (remove >= 0) out.nodes.erase(out.nodes.begin() + remove);
  for (auto& n : added) out.nodes.push_back(std::move(n));
  return out;
}

RunResult run(const Configuration& c, const RunContext& rc, uint64_t seed, int max_steps) {
  RunResult res{c, {}};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < max_steps; ++i) {
    auto en = enabled_redexes(res.config);
    if (en.empty()) break;
    std::uniform_int_distribution<size_t> pick(0, en.size() - 1);
    TraceEvent ev;
    res.config = step(res.config, en[pick(rng)], rc, &ev);
    ev.step = i;
    res.trace.push_back(std::move(ev));
  }
  return res;
}

Observables observables(const Configuration& c) {
  Observables o;
  std::vector<ChanDecl> off = offered(c);
  auto is_offered = [&](const Chan& ch) {
    return std::any_of(off.begin(), off.end(), [&](const ChanDecl& d) { return d.chan == ch; });
  };
  for (const auto& n : c.nodes) {
    if (n.is_msg) {
      if (n.dir == Dir::kRight ? is_offered(n.chan) : find_client(c, n.chan) != nullptr)
        o.upsilon.push_back(n.chan);
      continue;
    }
    const Term& t = *n.term;
    bool recv = t.kind == Term::Kind::kCase || t.kind == Term::Kind::kRecvChan ||
                t.kind == Term::Kind::kWait;
    if (!recv) continue;
    if (t.chan == n.chan ? is_offered(n.chan) : find_client(c, t.chan) != nullptr)
      o.theta.push_back(t.chan);
  }
  std::sort(o.upsilon.begin(), o.upsilon.end());
  std::sort(o.theta.begin(), o.theta.end());
  return o;
}

std::vector<std::string> interface_messages(const Configuration& c) {
  std::vector<std::string> out;
  auto obs = observables(c);
  for (const auto& n : c.nodes)
    if (n.is_msg && std::find(obs.upsilon.begin(), obs.upsilon.end(), n.chan) != obs.upsilon.end())
      out.push_back(to_string(n.chan) + " ! " + payload_string(n));
  std::sort(out.begin(), out.end());
  return out;
}

Configuration canonicalize(const Configuration& c, bool rebase_gens) {
  std::set<std::string> free_bases;
  for (const auto& d : c.clients) free_bases.insert(d.chan.name);
  std::vector<ChanDecl> off = offered(c);
  std::sort(off.begin(), off.end(),
            [](const ChanDecl& a, const ChanDecl& b) { return a.chan < b.chan; });
  for (const auto& d : off) free_bases.insert(d.chan.name);

  std::map<std::string, std::string> base_map;
  std::map<std::string, int> low;
  std::vector<int> order;
  std::vector<char> seen(c.nodes.size(), 0);
  auto bind = [&](const Chan& ch) {
    if (free_bases.count(ch.name)) return;
    if (!base_map.count(ch.name)) base_map[ch.name] = "%" + std::to_string(base_map.size());
    auto [it, fresh] = low.emplace(ch.name, ch.gen);
    if (!fresh) it->second = std::min(it->second, ch.gen);
  };
  std::function<void(int)> visit = [&](int i) {
    if (i < 0 || seen[i]) return;
    seen[i] = 1;
    order.push_back(i);
    const Node& n = c.nodes[i];
    bind(n.provides());
    if (n.is_msg) bind(n.chan);
    for (const auto& u : n.uses()) {
      bind(u);
      visit(provider_of(c, u));
    }
  };
  for (const auto& d : off) visit(provider_of(c, d.chan));
  for (size_t i = 0; i < c.nodes.size(); ++i) visit(static_cast<int>(i));

  Configuration ordered;
  ordered.clients = c.clients;
  ordered.next_fresh = c.next_fresh;
  for (int i : order) ordered.nodes.push_back(c.nodes[i]);
  return map_chans(ordered, [&](const Chan& ch) {
    auto it = base_map.find(ch.name);
    if (it == base_map.end() || !ch.runtime()) return ch;
    Chan r(it->second, rebase_gens ? ch.gen - low[ch.name] : ch.gen);
    r.annot = ch.annot;
    return r;
  });
}

}  // namespace slr
