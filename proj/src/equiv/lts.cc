#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "internal.hpp"

namespace slr {

std::string to_string(const Label& l) {
  auto payload = [&] {
    switch (l.payload) {
      case MsgKind::kClose:
        return std::string("close");
      case MsgKind::kLabel:
        return l.label;
      case MsgKind::kChan:
        return to_string(l.sent);
    }
    return std::string("?");
  };
  switch (l.kind) {
    case LabelKind::kTau:
      return "tau(" + l.rule + " " + to_string(l.chan) + ")";
    case LabelKind::kOut:
      return "Out(" + to_string(l.chan) + ", " + payload() + ")";
    case LabelKind::kInL:
      return "InL(" + to_string(l.chan) + ", " + payload() + ")";
    case LabelKind::kInR:
      return "InR(" + to_string(l.chan) + ", " + payload() + ")";
  }
  return "?";
}

std::string to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::kRelated:
      return "related";
    case Verdict::Kind::kDistinguished:
      return "distinguished";
    case Verdict::Kind::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

Interface interface_of(const Configuration& c) {
  Interface i;
  i.clients = c.clients;
  for (auto& d : offered(c))
    if (!detail::is_hole(d.chan)) i.offered.push_back(d);
  auto by_chan = [](const ChanDecl& a, const ChanDecl& b) { return a.chan < b.chan; };
  std::sort(i.clients.begin(), i.clients.end(), by_chan);
  std::sort(i.offered.begin(), i.offered.end(), by_chan);
  return i;
}

std::string to_string(const Interface& i) {
  std::ostringstream os;
  for (size_t k = 0; k < i.clients.size(); ++k)
    os << (k ? ", " : "") << to_string(i.clients[k].chan) << ":" << print_type(i.clients[k].type);
  os << " |- ";
  if (i.offered.empty()) os << kHole;
  for (size_t k = 0; k < i.offered.size(); ++k)
    os << (k ? ", " : "") << to_string(i.offered[k].chan) << ":" << print_type(i.offered[k].type);
  return os.str();
}

bool interface_equal(const Interface& a, const Interface& b, const Signature& sig) {
  auto same = [&](const std::vector<ChanDecl>& x, const std::vector<ChanDecl>& y) {
    if (x.size() != y.size()) return false;
    for (size_t k = 0; k < x.size(); ++k)
      if (x[k].chan != y[k].chan || !type_equal(x[k].type, y[k].type, sig)) return false;
    return true;
  };
  return same(a.clients, b.clients) && same(a.offered, b.offered);
}

namespace detail {

RunContext equiv_ctx(const Signature& sig) {
  RunContext rc;
  rc.sig = &sig;
  rc.inline_tail_calls = true;
  return rc;
}

bool is_hole(const Chan& c) { return c.name == kHole; }

std::vector<Chan> client_chans(const Configuration& c) {
  std::vector<Chan> out;
  for (const auto& d : c.clients) out.push_back(d.chan);
  return out;
}

namespace {

bool receives(const Term& t) {
  return t.kind == Term::Kind::kCase || t.kind == Term::Kind::kRecvChan ||
         t.kind == Term::Kind::kWait;
}

std::set<Chan> observed_offers(const Configuration& c) {
  std::set<Chan> out;
  for (const auto& d : offered(c))
    if (!is_hole(d.chan)) out.insert(d.chan);
  return out;
}

std::set<std::string> all_bases(const Configuration& c) {
  std::set<std::string> out;
  map_chans(c, [&](const Chan& ch) {
    out.insert(ch.name);
    return ch;
  });
  return out;
}

}  // namespace

std::string fresh_base(const Configuration& a, const Configuration& b) {
  std::set<std::string> used = all_bases(a);
  used.merge(all_bases(b));
  for (int k = 0;; ++k) {
    std::string n = "@" + std::to_string(k);
    if (!used.count(n)) return n;
  }
}

std::string fresh_base(const Configuration& c) { return fresh_base(c, c); }

namespace {

void replace_client(Configuration& c, const Chan& from, const Chan& to, TypePtr type) {
  for (auto& d : c.clients)
    if (d.chan == from) {
      d.chan = to;
      d.type = std::move(type);
      return;
    }
}

void drop_client(Configuration& c, const Chan& ch) {
  c.clients.erase(std::remove_if(c.clients.begin(), c.clients.end(),
                                 [&](const ChanDecl& d) { return d.chan == ch; }),
                  c.clients.end());
}

int user_of(const Configuration& c, const Chan& ch) {
  for (size_t i = 0; i < c.nodes.size(); ++i)
    for (const auto& u : c.nodes[i].uses())
      if (u == ch) return static_cast<int>(i);
  return -1;
}

using Visited = std::set<std::pair<std::string, std::string>>;

bool acts_on(const Term& t, const std::string& base, const Signature& sig, Visited& seen);

// Whether definition `proc` may act on its channel `var`. Recursive calls
// already being explored count as no (least fixpoint).
bool def_acts_on(const std::string& proc, const std::string& var, const Signature& sig,
                 Visited& seen) {
  const ProcDef* d = sig.find_proc(proc);
  if (!d || !d->body) return true;
  if (!seen.insert({proc, var}).second) return false;
  return acts_on(*d->body, var, sig, seen);
}

// Whether a process running `t` may ever send or receive on a channel with
// base `base`. Conservative: handing the channel to someone else counts.
bool acts_on(const Term& t, const std::string& base, const Signature& sig, Visited& seen) {
  using K = Term::Kind;
  switch (t.kind) {
    case K::kSendChan:
      if (t.sent.name == base) return true;
      [[fallthrough]];
    case K::kSendLabel:
    case K::kCase:
    case K::kRecvChan:
    case K::kClose:
    case K::kWait:
      if (t.chan.name == base) return true;
      break;
    case K::kFwd:
      return t.chan.name == base || t.sent.name == base;
    case K::kSpawn:
    case K::kTailCall: {
      const ProcDef* d = sig.find_proc(t.proc);
      for (size_t i = 0; i < t.args.size(); ++i) {
        if (t.args[i].name != base) continue;
        if (!d || i >= d->context.size()) return true;
        if (def_acts_on(t.proc, d->context[i].var, sig, seen)) return true;
      }
      if (t.kind == K::kTailCall && t.chan.name == base) {
        if (!d) return true;
        if (def_acts_on(t.proc, d->offered, sig, seen)) return true;
      }
      break;
    }
  }
  // a binder with the same name starts a different channel
  if ((t.kind == K::kRecvChan || t.kind == K::kSpawn) && t.binder == base) return false;
  for (const auto& [l, b] : t.branches)
    if (acts_on(*b, base, sig, seen)) return true;
  return t.cont && acts_on(*t.cont, base, sig, seen);
}

bool may_act_on(const Node& n, const std::string& base, const Signature& sig) {
  Visited seen;
  return acts_on(*n.term, base, sig, seen);
}

// Procs that can step now or may step once a proc they wait on does. A
// waiting proc stays dead when its partner can never act on the channel.
std::vector<char> live_procs(const Configuration& c, const Signature& sig) {
  const size_t n = c.nodes.size();
  std::vector<char> live(n, 0);
  for (const auto& r : enabled_redexes(c)) live[r.proc] = 1;
  // the proc that will eventually answer a receive of node i, or -1
  std::vector<int> partner(n, -1);
  for (size_t i = 0; i < n; ++i) {
    const Node& p = c.nodes[i];
    if (p.is_msg || live[i] || !receives(*p.term)) continue;
    const Chan ch = p.term->chan;
    int j;
    if (ch == p.chan) {
      j = user_of(c, ch);
      while (j >= 0 && c.nodes[j].is_msg && c.nodes[j].dir == Dir::kRight)
        j = user_of(c, c.nodes[j].chan);
    } else {
      j = provider_of(c, ch);
      while (j >= 0 && c.nodes[j].is_msg && c.nodes[j].dir == Dir::kLeft)
        j = provider_of(c, c.nodes[j].chan);
    }
    if (j >= 0 && !c.nodes[j].is_msg && may_act_on(c.nodes[j], ch.name, sig)) partner[i] = j;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < n; ++i)
      if (!live[i] && partner[i] >= 0 && live[partner[i]]) live[i] = changed = true;
  }
  return live;
}

// No internal step can change Υ or Θ any more.
bool resolved(const Configuration& c, const Signature& sig) {
  Obs o = observe(c);
  std::set<Chan> fixed(o.wait.begin(), o.wait.end());
  for (int i : o.out) fixed.insert(c.nodes[i].chan);
  std::set<Chan> iface = observed_offers(c);
  for (const auto& d : c.clients) iface.insert(d.chan);
  std::vector<char> live;
  for (const auto& ch : iface) {
    if (fixed.count(ch)) continue;
    if (live.empty()) live = live_procs(c, sig);
    int h = find_client(c, ch) ? user_of(c, ch) : provider_of(c, ch);
    if (h < 0) continue;
    const Node& hn = c.nodes[h];
    if (!hn.is_msg) {
      if (live[h]) return false;
      continue;
    }
    if (iface.count(hn.chan)) continue;
    int r = hn.dir == Dir::kRight ? user_of(c, hn.chan) : provider_of(c, hn.chan);
    if (r >= 0 && !c.nodes[r].is_msg && live[r]) return false;
  }
  return true;
}

struct RedexId {
  std::string rule;
  Chan principal;
  Chan self;
};

}  // namespace

Obs observe(const Configuration& c) {
  Obs o;
  std::set<Chan> off = observed_offers(c);
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (n.is_msg) {
      if (n.dir == Dir::kRight ? off.count(n.chan) > 0 : find_client(c, n.chan) != nullptr)
        o.out.push_back(static_cast<int>(i));
      continue;
    }
    const Term& t = *n.term;
    if (!receives(t)) continue;
    if (t.chan == n.chan ? off.count(n.chan) > 0 : find_client(c, t.chan) != nullptr)
      o.wait.push_back(t.chan);
  }
  std::sort(o.out.begin(), o.out.end(),
            [&](int a, int b) { return c.nodes[a].chan < c.nodes[b].chan; });
  std::sort(o.wait.begin(), o.wait.end());
  return o;
}

Transition emit(const Configuration& c, int msg) {
  const Node m = c.nodes[msg];
  Transition tr;
  Configuration& out = tr.target;
  out = c;
  out.nodes.erase(out.nodes.begin() + msg);
  Label& l = tr.label;
  l.kind = LabelKind::kOut;
  l.chan = m.chan;
  l.payload = m.mkind;
  l.label = m.label;
  if (m.dir == Dir::kLeft) replace_client(out, m.chan, m.chan.next(), m.type);
  if (m.mkind == MsgKind::kChan) {
    const Chan z = m.sent;
    if (find_client(out, z)) {
      drop_client(out, z);
      l.sent = z;
    } else {
      // the provider of z stays behind and is now offered to the outside
      std::string fresh = fresh_base(out);
      out = map_chans(out, [&](const Chan& ch) {
        if (ch.name != z.name || !ch.runtime()) return ch;
        return Chan(fresh, ch.gen - z.gen);
      });
      l.sent = Chan(fresh, 0);
    }
  }
  return tr;
}

std::vector<Label> input_labels(const Configuration& c, const Chan& ch, const Signature& sig) {
  std::vector<Label> out;
  if (const ChanDecl* d = find_client(c, ch)) {
    TypePtr u = unfold(d->type, sig);
    Label l;
    l.kind = LabelKind::kInL;
    l.chan = ch;
    if (u->kind == Type::Kind::kOne) {
      out.push_back(l);
    } else if (u->kind == Type::Kind::kPlus) {
      l.payload = MsgKind::kLabel;
      for (const auto& [k, t] : u->choices) {
        l.label = k;
        out.push_back(l);
      }
    } else if (u->kind == Type::Kind::kTensor) {
      l.payload = MsgKind::kChan;
      l.sent = Chan(fresh_base(c), 0);
      out.push_back(l);
    }
    return out;
  }
  int p = provider_of(c, ch);
  if (p < 0) return out;
  TypePtr u = unfold(c.nodes[p].type, sig);
  Label l;
  l.kind = LabelKind::kInR;
  l.chan = ch;
  if (u->kind == Type::Kind::kWith) {
    l.payload = MsgKind::kLabel;
    for (const auto& [k, t] : u->choices) {
      l.label = k;
      out.push_back(l);
    }
  } else if (u->kind == Type::Kind::kLolli) {
    l.payload = MsgKind::kChan;
    l.sent = Chan(fresh_base(c), 0);
    out.push_back(l);
  }
  return out;
}

Configuration inject(const Configuration& c, const Label& l, const Signature& sig) {
  Configuration out = c;
  const Chan& ch = l.chan;
  if (l.kind == LabelKind::kInL) {
    const ChanDecl* d = find_client(c, ch);
    if (!d) throw Error("inject: " + to_string(ch) + " is not a client channel");
    TypePtr t = d->type;
    TypePtr u = unfold(t, sig);
    switch (l.payload) {
      case MsgKind::kClose:
        drop_client(out, ch);
        break;
      case MsgKind::kLabel:
        replace_client(out, ch, ch.next(), u->branch(l.label));
        break;
      case MsgKind::kChan:
        replace_client(out, ch, ch.next(), u->right);
        out.clients.push_back({l.sent, u->left, nullptr});
        break;
    }
    out.nodes.push_back(make_msg(l.payload, Dir::kRight, ch, t, l.label, l.sent));
    return out;
  }
  int p = provider_of(c, ch);
  if (p < 0) throw Error("inject: " + to_string(ch) + " is not offered");
  TypePtr u = unfold(c.nodes[p].type, sig);
  if (l.payload == MsgKind::kLabel) {
    out.nodes.push_back(make_msg(MsgKind::kLabel, Dir::kLeft, ch, u->branch(l.label), l.label));
  } else {
    out.clients.push_back({l.sent, u->left, nullptr});
    out.nodes.push_back(make_msg(MsgKind::kChan, Dir::kLeft, ch, u->right, "", l.sent));
  }
  return out;
}

Settled settle(const Configuration& c, const Signature& sig, int max_rounds) {
  RunContext rc = equiv_ctx(sig);
  std::unordered_set<std::string> seen;
  Configuration cur = c;
  for (int round = 0; round <= max_rounds; ++round) {
    cur = collect_garbage(cur, sig);
    auto en = enabled_redexes(cur);
    if (en.empty() || resolved(cur, sig)) return {cur, true};
    if (!seen.insert(state_key(cur)).second) return {cur, true};  // cycling
    if (round == max_rounds) break;
    std::vector<RedexId> ids;
    for (const auto& r : en) ids.push_back({r.rule, r.principal, cur.nodes[r.proc].chan});
    for (const auto& id : ids) {
      for (const auto& r : enabled_redexes(cur)) {
        if (r.rule == id.rule && r.principal == id.principal && cur.nodes[r.proc].chan == id.self) {
          cur = step(cur, r, rc);
          break;
        }
      }
    }
  }
  return {cur, false};
}

std::vector<Configuration> tau_closure(const Configuration& c, const Signature& sig,
                                       int max_states, bool* complete) {
  RunContext rc = equiv_ctx(sig);
  std::vector<Configuration> out;
  std::unordered_set<std::string> seen;
  std::deque<Configuration> queue;
  Configuration start = canonicalize(collect_garbage(c, sig), true);
  seen.insert(state_key(start));
  queue.push_back(start);
  *complete = true;
  while (!queue.empty()) {
    Configuration cur = std::move(queue.front());
    queue.pop_front();
    out.push_back(cur);
    for (const auto& r : enabled_redexes(cur)) {
      Configuration nxt = canonicalize(collect_garbage(step(cur, r, rc), sig), true);
      if (!seen.insert(state_key(nxt)).second) continue;
      if (static_cast<int>(seen.size()) > max_states) {
        *complete = false;
        continue;
      }
      queue.push_back(std::move(nxt));
    }
  }
  return out;
}

Configuration collect_garbage(const Configuration& c, const Signature& sig) {
  Configuration out = c;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < out.nodes.size() && !changed; ++i) {
      const Node m = out.nodes[i];
      if (!m.is_msg || m.mkind != MsgKind::kLabel) continue;
      // the process that would eventually read m
      const Chan at = m.chan;
      int r = m.dir == Dir::kLeft ? provider_of(out, at) : user_of(out, at);
      if (r < 0 || out.nodes[r].is_msg || may_act_on(out.nodes[r], at.name, sig)) continue;
      Node& reader = out.nodes[r];
      reader.term = rename(reader.term, {{at, at.next()}});
      if (m.dir == Dir::kLeft) {
        reader.chan = at.next();
        reader.type = m.type;
      }
      out.nodes.erase(out.nodes.begin() + i);
      changed = true;
    }
  }
  return out;
}

std::string state_key(const Configuration& c) {
  Configuration k = canonicalize(c, true);
  std::string s = to_string(k) + " |";
  for (const auto& d : k.clients) s += " " + to_string(d.chan);
  return s;
}

std::string pair_key(const Configuration& a, const Configuration& b) {
  Configuration ca = canonicalize(a, true), cb = canonicalize(b, true);
  std::set<std::string> free;
  for (const Configuration* c : {&ca, &cb}) {
    for (const auto& d : c->clients) free.insert(d.chan.name);
    for (const auto& d : offered(*c)) free.insert(d.chan.name);
  }
  std::map<std::string, int> low;
  auto record = [&](const Chan& ch) {
    if (free.count(ch.name) && ch.runtime()) {
      auto [it, fresh] = low.emplace(ch.name, ch.gen);
      if (!fresh) it->second = std::min(it->second, ch.gen);
    }
    return ch;
  };
  map_chans(ca, record);
  map_chans(cb, record);
  auto shift = [&](const Chan& ch) {
    auto it = low.find(ch.name);
    if (it == low.end() || !ch.runtime()) return ch;
    return Chan(ch.name, ch.gen - it->second);
  };
  std::string s;
  for (const Configuration* c : {&ca, &cb}) {
    Configuration k = map_chans(*c, shift);
    s += to_string(k) + " |";
    std::vector<Chan> cl = client_chans(k);
    std::sort(cl.begin(), cl.end());
    for (const auto& ch : cl) s += " " + to_string(ch);
    s += " ||";
  }
  return s;
}

std::pair<Configuration, Configuration> split_tree(const Configuration& c, const Chan& root) {
  std::vector<char> in(c.nodes.size(), 0);
  std::vector<int> stack;
  int r = provider_of(c, root);
  if (r >= 0) stack.push_back(r);
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (in[i]) continue;
    in[i] = 1;
    for (const auto& u : c.nodes[i].uses()) {
      int p = provider_of(c, u);
      if (p >= 0) stack.push_back(p);
    }
  }
  Configuration tree, rest;
  tree.next_fresh = rest.next_fresh = c.next_fresh;
  std::set<Chan> tree_uses;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    (in[i] ? tree : rest).nodes.push_back(c.nodes[i]);
    if (in[i])
      for (const auto& u : c.nodes[i].uses()) tree_uses.insert(u);
  }
  for (const auto& d : c.clients) (tree_uses.count(d.chan) ? tree : rest).clients.push_back(d);
  return {tree, rest};
}

}  // namespace detail

std::vector<Transition> lts_transitions(const Configuration& c, const Signature& sig) {
  std::vector<Transition> out;
  RunContext rc = detail::equiv_ctx(sig);
  for (const auto& r : enabled_redexes(c)) {
    Transition t;
    t.label.rule = r.rule;
    t.label.chan = r.principal;
    t.target = step(c, r, rc);
    out.push_back(std::move(t));
  }
  detail::Obs o = detail::observe(c);
  for (int i : o.out) out.push_back(detail::emit(c, i));
  for (const auto& ch : o.wait)
    for (const auto& l : detail::input_labels(c, ch, sig))
      out.push_back({l, detail::inject(c, l, sig)});
  return out;
}

}  // namespace slr
