#include <algorithm>
#include <string>

#include "internal.hpp"
#include "sessionlr/runtime.hpp"

namespace slr {
namespace {

struct Ob {
  std::string var;
  TypePtr type;
};

using Terms = std::vector<TermPtr>;
using TB = TermBuilder;

// Up to `cap` variants; variant k takes element k (cyclically) of each list.
std::vector<std::vector<TermPtr>> zip(const std::vector<Terms>& lists, size_t cap) {
  size_t n = 0;
  for (const auto& l : lists) {
    if (l.empty()) return {};
    n = std::max(n, l.size());
  }
  n = std::min(n, cap);
  std::vector<std::vector<TermPtr>> out(n);
  for (size_t k = 0; k < n; ++k)
    for (const auto& l : lists) out[k].push_back(l[k % l.size()]);
  return out;
}

// Enumerates small processes that discharge an obligation: provide `offer`
// while using up `clients`. Every communication costs one unit of depth;
// closing and waiting are free. Out of depth, a process that cannot finish
// loops silently forever.
class Gen {
 public:
  Gen(Signature& sig, size_t cap) : sig_(sig), cap_(cap) {}

  Terms gen(const Ob& offer, std::vector<Ob> clients, int d, int spawns = 0) {
    Terms out;
    if (!clients.empty()) {
      Ob c = clients.front();
      std::vector<Ob> rest(clients.begin() + 1, clients.end());
      TypePtr u = unfold(c.type, sig_);
      Chan ch(c.var);
      if (u->kind == Type::Kind::kOne) {
        for (auto& p : gen(offer, rest, d, spawns)) out.push_back(TB::Wait(ch, p));
        return out;
      }
      if (d == 0) return {terminator(offer, clients)};
      auto with_head = [&](TypePtr t) {
        std::vector<Ob> cl{{c.var, t}};
        cl.insert(cl.end(), rest.begin(), rest.end());
        return cl;
      };
      switch (u->kind) {
        case Type::Kind::kPlus: {
          std::vector<Terms> lists;
          for (const auto& [l, t] : u->choices) lists.push_back(gen(offer, with_head(t), d - 1));
          for (auto& row : zip(lists, cap_)) {
            Branches bs;
            for (size_t k = 0; k < row.size(); ++k) bs.emplace_back(u->choices[k].first, row[k]);
            out.push_back(TB::Case(ch, bs));
          }
          break;
        }
        case Type::Kind::kWith:
          for (const auto& [l, t] : u->choices)
            for (auto& p : gen(offer, with_head(t), d - 1)) out.push_back(TB::SendLabel(ch, l, p));
          break;
        case Type::Kind::kTensor: {
          std::string w = fresh_var();
          auto cl = with_head(u->right);
          cl.push_back({w, u->left});
          for (auto& p : gen(offer, cl, d - 1)) out.push_back(TB::RecvChan(w, ch, p));
          break;
        }
        case Type::Kind::kLolli: {
          std::string w = fresh_var();
          auto conts = gen(offer, with_head(u->right), d - 1);
          for (auto& [name, k] : spawned({w, u->left}, conts, d, spawns))
            out.push_back(TB::Spawn(w, name, {}, {}, TB::SendChan(Chan(w), ch, k)));
          break;
        }
        default:
          throw Error("gen: unexpected type " + print_type(u));
      }
      return cap(out);
    }
    TypePtr u = unfold(offer.type, sig_);
    Chan o(offer.var);
    if (u->kind == Type::Kind::kOne) return {TB::Close(o)};
    if (d == 0) return {terminator(offer, clients)};
    switch (u->kind) {
      case Type::Kind::kPlus:
        for (const auto& [l, t] : u->choices)
          for (auto& p : gen({offer.var, t}, {}, d - 1)) out.push_back(TB::SendLabel(o, l, p));
        break;
      case Type::Kind::kWith: {
        std::vector<Terms> lists;
        for (const auto& [l, t] : u->choices) lists.push_back(gen({offer.var, t}, {}, d - 1));
        for (auto& row : zip(lists, cap_)) {
          Branches bs;
          for (size_t k = 0; k < row.size(); ++k) bs.emplace_back(u->choices[k].first, row[k]);
          out.push_back(TB::Case(o, bs));
        }
        break;
      }
      case Type::Kind::kTensor: {
        std::string w = fresh_var();
        auto conts = gen({offer.var, u->right}, {}, d - 1);
        for (auto& [name, k] : spawned({w, u->left}, conts, d, spawns))
          out.push_back(TB::Spawn(w, name, {}, {}, TB::SendChan(Chan(w), o, k)));
        break;
      }
      case Type::Kind::kLolli: {
        std::string w = fresh_var();
        for (auto& p : gen({offer.var, u->right}, {{w, u->left}}, d - 1))
          out.push_back(TB::RecvChan(w, o, p));
        break;
      }
      default:
        throw Error("gen: unexpected type " + print_type(u));
    }
    return cap(out);
  }

  // Adds a definition providing `offer` from `clients` with body `body`.
  std::string define(const std::string& prefix, const Ob& offer, const std::vector<Ob>& clients,
                     TermPtr body) {
    ProcDef def;
    def.name = fresh_name(prefix);
    for (const auto& c : clients) def.context.push_back({c.var, c.type, nullptr, {}});
    def.offered = offer.var;
    def.offered_type = offer.type;
    def.body = std::move(body);
    sig_.procs.push_back(def);
    return def.name;
  }

 private:
  Terms cap(Terms t) {
    if (t.size() > cap_) t.resize(cap_);
    return t;
  }

  // Providers of `ob` at the same depth, paired with continuations.
  std::vector<std::pair<std::string, TermPtr>> spawned(const Ob& ob, const Terms& conts, int d,
                                                       int spawns) {
    // nested spawns at the same depth could go on forever on types like
    // t = t * 1, so they only get a few levels
    Terms provs = spawns < 2 ? gen(ob, {}, d, spawns + 1) : Terms{terminator(ob, {})};
    std::vector<std::pair<std::string, TermPtr>> out;
    for (auto& row : zip({provs, conts}, cap_)) out.emplace_back(define("Gen", ob, {}, row[0]), row[1]);
    return out;
  }

  TermPtr terminator(const Ob& offer, const std::vector<Ob>& clients) {
    bool finishable = unfold(offer.type, sig_)->kind == Type::Kind::kOne;
    for (const auto& c : clients)
      finishable = finishable && unfold(c.type, sig_)->kind == Type::Kind::kOne;
    if (finishable) {
      TermPtr t = TB::Close(Chan(offer.var));
      for (auto it = clients.rbegin(); it != clients.rend(); ++it) t = TB::Wait(Chan(it->var), t);
      return t;
    }
    std::vector<Chan> args;
    for (const auto& c : clients) args.push_back(Chan(c.var));
    std::string name = fresh_name("Omega");
    ProcDef def;
    def.name = name;
    for (const auto& c : clients) def.context.push_back({c.var, c.type, nullptr, {}});
    def.offered = offer.var;
    def.offered_type = offer.type;
    def.body = TB::TailCall(Chan(offer.var), name, {}, args);
    sig_.procs.push_back(def);
    return TB::TailCall(Chan(offer.var), name, {}, args);
  }

  std::string fresh_name(const std::string& prefix) {
    for (;;) {
      std::string n = prefix + "%" + std::to_string(next_def_++);
      if (!sig_.find_proc(n)) return n;
    }
  }
  std::string fresh_var() { return "h" + std::to_string(next_var_++); }

  Signature& sig_;
  size_t cap_;
  int next_def_ = 0;
  int next_var_ = 0;
};

Configuration instantiate_at(const std::string& def, const Chan& root, Signature& sig) {
  RunContext rc = detail::equiv_ctx(sig);
  Configuration c = init_config(def, rc);
  const std::string base = sig.find_proc(def)->offered;
  return map_chans(c, [&](const Chan& ch) { return ch.name == base && ch.gen == 0 ? root : ch; });
}

}  // namespace

std::vector<HighEnv> gen_high_envs(const SecInterface& s, const Semilattice& lat, int depth,
                                   Signature& sig, size_t max_per_channel) {
  Gen g(sig, max_per_channel);
  std::vector<std::vector<std::string>> defs;  // per high channel
  std::vector<Chan> roots;
  for (const auto& e : s.ctx) {
    if (lat.leq(e.level, s.observer)) continue;
    Ob ob{e.chan.name, e.type};
    std::vector<std::string> names;
    for (auto& t : g.gen(ob, {}, depth)) names.push_back(g.define("High", ob, {}, t));
    defs.push_back(names);
    roots.push_back(e.chan);
  }
  bool high_offer = !lat.leq(s.offered.level, s.observer);
  std::vector<std::string> clients;
  if (high_offer) {
    Ob hole{kHole, Type::One()};
    Ob x{s.offered.chan.name, s.offered.type};
    for (auto& t : g.gen(hole, {x}, depth)) clients.push_back(g.define("Observer", hole, {x}, t));
  }
  size_t n = high_offer ? clients.size() : 1;
  for (const auto& d : defs) n = std::max(n, d.size());
  std::vector<HighEnv> out;
  for (size_t k = 0; k < n; ++k) {
    HighEnv env;
    for (size_t i = 0; i < defs.size(); ++i) {
      const std::string& name = defs[i][k % defs[i].size()];
      Configuration p = instantiate_at(name, roots[i], sig);
      env.providers.nodes.insert(env.providers.nodes.end(), p.nodes.begin(), p.nodes.end());
      env.name += (env.name.empty() ? "" : " ") + to_string(roots[i]) + "=" + name;
    }
    if (high_offer) {
      const std::string& name = clients[k % clients.size()];
      env.client = instantiate_at(name, Chan(kHole, 0), sig);
      env.client = map_chans(env.client, [&](const Chan& ch) {
        return ch.name == s.offered.chan.name && ch.gen == 0 ? s.offered.chan : ch;
      });
      env.name += (env.name.empty() ? "" : " ") + std::string(kHole) + "=" + name;
    }
    out.push_back(std::move(env));
  }
  return out;
}

}  // namespace slr
