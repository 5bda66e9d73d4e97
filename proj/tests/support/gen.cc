#include "gen.hpp"

#include <optional>

#include "sessionlr/runtime.hpp"

namespace slr::testing {
namespace {

using TB = TermBuilder;

struct Ob {
  std::string var;
  TypePtr type;
};

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

TermPtr body(Rng& rng, Ob offer, std::vector<Ob> clients) {
  std::vector<int> acts;
  if (offer.type->kind != Type::Kind::kOne) acts.push_back(-1);
  for (size_t i = 0; i < clients.size(); ++i) acts.push_back(static_cast<int>(i));
  if (acts.empty()) return TB::Close(Chan(offer.var));
  int a = acts[pick(rng, static_cast<int>(acts.size()))];
  if (a < 0) {
    Chan o(offer.var);
    const auto& cs = offer.type->choices;
    if (offer.type->kind == Type::Kind::kPlus) {
      const auto& [l, t] = cs[pick(rng, static_cast<int>(cs.size()))];
      return TB::SendLabel(o, l, body(rng, {offer.var, t}, clients));
    }
    Branches bs;
    for (const auto& [l, t] : cs) bs.emplace_back(l, body(rng, {offer.var, t}, clients));
    return TB::Case(o, bs);
  }
  Ob c = clients[a];
  Chan ch(c.var);
  if (c.type->kind == Type::Kind::kOne) {
    clients.erase(clients.begin() + a);
    return TB::Wait(ch, body(rng, offer, clients));
  }
  const auto& cs = c.type->choices;
  if (c.type->kind == Type::Kind::kWith) {
    const auto& [l, t] = cs[pick(rng, static_cast<int>(cs.size()))];
    clients[a].type = t;
    return TB::SendLabel(ch, l, body(rng, offer, clients));
  }
  Branches bs;
  for (const auto& [l, t] : cs) {
    auto next = clients;
    next[a].type = t;
    bs.emplace_back(l, body(rng, offer, next));
  }
  return TB::Case(ch, bs);
}

struct Shape {
  std::vector<std::string> chans;  // chans[i] offered by defs[i]
  std::vector<TypePtr> types;
  std::optional<Ob> free_client;   // used by the last process
};

Chain make_chain(Rng& rng, const Shape& s, const std::string& prefix) {
  Chain ch;
  const size_t k = s.chans.size();
  for (size_t i = 0; i < k; ++i) {
    ProcDef d;
    d.name = prefix + std::to_string(i);
    d.offered = s.chans[i];
    d.offered_type = s.types[i];
    std::vector<std::pair<std::string, TypePtr>> cl;
    if (i + 1 < k) cl.emplace_back(s.chans[i + 1], s.types[i + 1]);
    else if (s.free_client) cl.emplace_back(s.free_client->var, s.free_client->type);
    for (const auto& [v, t] : cl) d.context.push_back({v, t, nullptr, {}});
    d.body = random_body(rng, d.offered, d.offered_type, cl);
    ch.defs.push_back(d);
  }
  return ch;
}

Shape random_shape(Rng& rng, int procs, bool hidden_offer, bool plus_top = false) {
  Shape s;
  for (int i = 0; i < procs; ++i) {
    s.chans.push_back(i == 0 ? (hidden_offer ? "z" : "y") : "c" + std::to_string(i));
    s.types.push_back(i == 0 && hidden_offer ? Type::One() : random_label_type(rng, i == 0 ? 3 : 2));
  }
  if (plus_top && !hidden_offer)
    s.types[0] = Type::Plus({{"a", random_label_type(rng, 2)}, {"b", random_label_type(rng, 2)}});
  // the top channel carries at most three labels, the free client at most
  // two plus the unit exchanges, so four observations cover every run
  if (hidden_offer) s.free_client = Ob{"x", random_label_type(rng, 2)};
  return s;
}

Chain renamed(const Chain& c, const std::string& prefix) {
  Chain out = c;
  for (size_t i = 0; i < out.defs.size(); ++i) out.defs[i].name = prefix + std::to_string(i);
  return out;
}

void add(Signature& sig, const Chain& c) {
  sig.procs.insert(sig.procs.end(), c.defs.begin(), c.defs.end());
}

// Puts an identity process on the channel offered by defs[j].
Chain with_relay(const Chain& c, size_t j, const Signature& sig, const std::string& name) {
  Chain out = c;
  ProcDef& p = out.defs[j];
  const std::string ch = p.offered, inner = ch + "_" + name;
  p.body = rename(p.body, {{Chan(ch), Chan(inner)}});
  p.offered = inner;
  ProcDef relay;
  relay.name = name;
  relay.context.push_back({inner, p.offered_type, nullptr, {}});
  relay.offered = ch;
  relay.offered_type = p.offered_type;
  relay.body = identity_expansion(p.offered_type, Chan(ch), Chan(inner), sig, false);
  out.defs.insert(out.defs.begin() + j, relay);
  return out;
}

}  // namespace

TypePtr random_label_type(Rng& rng, int depth) {
  if (depth <= 0 || pick(rng, 4) == 0) return Type::One();
  Choices cs;
  int n = pick(rng, 3) == 0 ? 1 : 2;
  for (int i = 0; i < n; ++i) cs.emplace_back(std::string(1, 'a' + i), random_label_type(rng, depth - 1));
  return pick(rng, 2) ? Type::Plus(cs) : Type::With(cs);
}

TermPtr random_body(Rng& rng, const std::string& offer, const TypePtr& offer_type,
                    std::vector<std::pair<std::string, TypePtr>> clients) {
  std::vector<Ob> cl;
  for (auto& [v, t] : clients) cl.push_back({v, t});
  return body(rng, {offer, offer_type}, cl);
}

Configuration build_chain(const Chain& ch, const Signature& sig) {
  RunContext rc{&sig, nullptr, true};
  Configuration acc = init_config(ch.defs.back().name, rc);
  for (size_t i = ch.defs.size() - 1; i-- > 0;) acc = link(acc, init_config(ch.defs[i].name, rc), sig);
  return acc;
}

namespace {

// d2 of a pair, derived from c1 according to `kind` (0 relay, 1 mutant,
// 2 fresh, 3 copy).
Chain derive(Rng& rng, int kind, const Chain& c1, const Shape& s, bool hidden,
             const std::string& prefix, const Signature& sig, std::string* name) {
  const int procs = static_cast<int>(c1.defs.size());
  Chain c2;
  switch (kind) {
    case 0:
      *name = "relay";
      c2 = with_relay(renamed(c1, prefix), pick(rng, procs), sig, prefix + "Relay");
      break;
    case 1: {
      *name = "mutant";
      c2 = renamed(c1, prefix);
      // the top process is the one that talks to the outside
      ProcDef& d = c2.defs[hidden ? pick(rng, procs) : 0];
      std::vector<std::pair<std::string, TypePtr>> cl;
      for (const auto& e : d.context) cl.emplace_back(e.var, e.type);
      d.body = random_body(rng, d.offered, d.offered_type, cl);
      break;
    }
    case 2: {
      *name = "fresh";
      Shape s2 = random_shape(rng, 1 + pick(rng, 3), hidden);
      s2.types[0] = s.types[0];
      s2.free_client = s.free_client;
      c2 = make_chain(rng, s2, prefix);
      break;
    }
    default:
      *name = "copy";
      c2 = renamed(c1, prefix);
      break;
  }
  return c2;
}

}  // namespace

std::vector<GenPair> adequacy_pairs(uint64_t seed, int count) {
  std::vector<GenPair> out;
  Rng rng(seed);
  for (int idx = 0; idx < count; ++idx) {
    GenPair g;
    const int kind = idx % 4;
    const bool hidden = (idx / 4) % 2 == 1;
    int procs = 1 + pick(rng, kind == 0 ? 2 : 3);
    Shape s = random_shape(rng, procs, hidden, kind == 1);
    Chain c1 = make_chain(rng, s, "L");
    Chain c2 = derive(rng, kind, c1, s, hidden, "R", g.sig, &g.kind);
    add(g.sig, c1);
    add(g.sig, c2);
    g.d1 = build_chain(c1, g.sig);
    g.d2 = build_chain(c2, g.sig);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GenTriple> per_triples(uint64_t seed, int count) {
  std::vector<GenTriple> out;
  Rng rng(seed);
  for (int idx = 0; idx < count; ++idx) {
    GenTriple g;
    const bool hidden = idx % 2 == 1;
    // relays and copies keep the chain related, mutants may break it
    const int k2 = (idx / 2) % 4 == 3 ? 1 : (idx / 2) % 2 == 0 ? 0 : 3;
    const int k3 = pick(rng, 3) == 0 ? 1 : pick(rng, 2) ? 0 : 3;
    Shape s = random_shape(rng, 1 + pick(rng, 2), hidden);
    Chain c1 = make_chain(rng, s, "A");
    std::string n2, n3;
    Chain c2 = derive(rng, k2, c1, s, hidden, "B", g.sig, &n2);
    Chain c3 = derive(rng, k3, c2, s, hidden, "C", g.sig, &n3);
    g.kind = n2 + "/" + n3;
    add(g.sig, c1);
    add(g.sig, c2);
    add(g.sig, c3);
    g.d1 = build_chain(c1, g.sig);
    g.d2 = build_chain(c2, g.sig);
    g.d3 = build_chain(c3, g.sig);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace slr::testing
