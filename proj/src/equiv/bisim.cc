#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

#include "internal.hpp"

namespace slr {
namespace {

Verdict make(Verdict::Kind k) {
  Verdict v;
  v.kind = k;
  return v;
}

std::vector<std::pair<std::string, Transition>> outputs(const Configuration& c) {
  std::vector<std::pair<std::string, Transition>> out;
  for (int i : detail::observe(c).out) {
    Transition t = detail::emit(c, i);
    out.emplace_back(to_string(t.label), std::move(t));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

// Settled pairs explored breadth first; the visible outputs of both sides
// have to agree at every pair.
Verdict confluent(const Configuration& d1, const Configuration& d2, const Signature& sig,
                  const Bounds& b) {
  struct Item {
    Configuration a, b;
    int parent;
    std::string label;
  };
  std::vector<Item> items;
  std::deque<int> queue;
  std::set<std::string> seen;
  auto path = [&](int i) {
    std::vector<std::string> p;
    for (; i >= 0 && items[i].parent >= 0; i = items[i].parent) p.push_back(items[i].label);
    std::reverse(p.begin(), p.end());
    return p;
  };
  items.push_back({d1, d2, -1, ""});
  queue.push_back(0);
  bool exhausted = false;
  std::string bound;
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    auto s1 = detail::settle(items[cur].a, sig, b.max_tau);
    auto s2 = detail::settle(items[cur].b, sig, b.max_tau);
    if (!s1.ok || !s2.ok) {
      exhausted = true;
      bound = "max_tau";
      continue;
    }
    if (!seen.insert(detail::pair_key(s1.config, s2.config)).second) continue;
    if (seen.size() > static_cast<size_t>(b.max_states)) {
      exhausted = true;
      bound = "max_states";
      break;
    }
    auto o1 = outputs(s1.config), o2 = outputs(s2.config);
    std::vector<std::string> l1, l2;
    for (auto& [s, t] : o1) l1.push_back(s);
    for (auto& [s, t] : o2) l2.push_back(s);
    if (l1 != l2) {
      Verdict v = make(Verdict::Kind::kDistinguished);
      std::vector<std::string> only1, only2;
      std::set_difference(l1.begin(), l1.end(), l2.begin(), l2.end(), std::back_inserter(only1));
      std::set_difference(l2.begin(), l2.end(), l1.begin(), l1.end(), std::back_inserter(only2));
      v.witness.left = v.witness.right = path(cur);
      if (only1.empty()) only1.push_back("no output");
      if (only2.empty()) only2.push_back("no output");
      v.witness.left.insert(v.witness.left.end(), only1.begin(), only1.end());
      v.witness.right.insert(v.witness.right.end(), only2.begin(), only2.end());
      v.witness.reason = "outputs differ";
      v.states = seen.size();
      return v;
    }
    for (size_t k = 0; k < o1.size(); ++k) {
      items.push_back({o1[k].second.target, o2[k].second.target, cur, o1[k].first});
      queue.push_back(static_cast<int>(items.size()) - 1);
    }
    // Inputs only once every pending output is read. An input and an
    // output commute, and outputs stay pending until read, so states with
    // extra pending outputs on both sides add nothing.
    if (!o1.empty()) continue;
    std::set<Chan> waits;
    for (const auto& ch : detail::observe(s1.config).wait) waits.insert(ch);
    for (const auto& ch : detail::observe(s2.config).wait) waits.insert(ch);
    std::string fresh = detail::fresh_base(s1.config, s2.config);
    for (const auto& ch : waits) {
      const Configuration& src =
          find_client(s1.config, ch) || provider_of(s1.config, ch) >= 0 ? s1.config : s2.config;
      for (Label l : detail::input_labels(src, ch, sig)) {
        if (l.payload == MsgKind::kChan) l.sent = Chan(fresh, 0);
        items.push_back({detail::inject(s1.config, l, sig), detail::inject(s2.config, l, sig), cur,
                         to_string(l)});
        queue.push_back(static_cast<int>(items.size()) - 1);
      }
    }
  }
  Verdict v = make(exhausted ? Verdict::Kind::kInconclusive : Verdict::Kind::kRelated);
  v.bound = bound;
  v.states = seen.size();
  return v;
}

// The literal game, solved as a greatest fixpoint over pairs of interned
// canonical states.
class Game {
 public:
  Game(const Signature& sig, const Bounds& b) : sig_(sig), b_(b) {}

  Verdict run(const Configuration& d1, const Configuration& d2) {
    pair_id(state_id(d1), state_id(d2));
    for (size_t i = 0; i < pairs_.size(); ++i) {
      if (pairs_.size() > static_cast<size_t>(b_.max_states)) break;
      expand(static_cast<int>(i));
    }
    // Unexpanded pairs count as good.
    std::vector<int> dead(pairs_.size(), 0);  // iteration of removal, 0 = alive
    for (int iter = 1;; ++iter) {
      std::vector<int> kill;
      for (size_t i = 0; i < pairs_.size(); ++i) {
        if (dead[i] || !pairs_[i].expanded) continue;
        for (const auto& ch : pairs_[i].challenges) {
          bool ok = ch.open;
          for (int r : ch.responses) ok = ok || !dead[r];
          if (!ok) {
            kill.push_back(static_cast<int>(i));
            break;
          }
        }
      }
      if (kill.empty()) break;
      for (int i : kill) dead[i] = iter;
    }
    Verdict v;
    v.states = pairs_.size();
    if (dead[0]) {
      v.kind = Verdict::Kind::kDistinguished;
      v.witness = witness(dead);
      return v;
    }
    bool partial = incomplete_;
    for (const auto& p : pairs_) partial = partial || !p.expanded;
    if (partial) {
      v.kind = Verdict::Kind::kInconclusive;
      v.bound = incomplete_ ? "max_tau" : "max_states";
    }
    return v;
  }

 private:
  struct Challenge {
    bool from_left;
    std::string label;
    std::vector<int> responses;
    std::vector<std::string> response_labels;
    bool open = false;  // a response may exist beyond the closure bound
  };
  struct Pair {
    int a, b;
    bool expanded = false;
    std::vector<Challenge> challenges;
  };
  struct Move {
    Label label;
    std::string text;
    int target;
  };
  struct State {
    Configuration config;
    bool explored = false;
    std::vector<Move> moves;
    bool closed = false;
    std::vector<int> closure;
    bool complete = true;
  };

  int state_id(const Configuration& c) {
    Configuration k = canonicalize(detail::collect_garbage(c, sig_), true);
    std::string key = detail::state_key(k);
    if (auto it = state_index_.find(key); it != state_index_.end()) return it->second;
    State st;
    st.config = std::move(k);
    states_.push_back(std::move(st));
    state_index_.emplace(std::move(key), static_cast<int>(states_.size()) - 1);
    return static_cast<int>(states_.size()) - 1;
  }

  int pair_id(int a, int b) {
    auto k = std::make_pair(a, b);
    if (auto it = pair_index_.find(k); it != pair_index_.end()) return it->second;
    pairs_.push_back({a, b, false, {}});
    pair_index_.emplace(k, static_cast<int>(pairs_.size()) - 1);
    return static_cast<int>(pairs_.size()) - 1;
  }

  const std::vector<Move>& moves(int s) {
    if (!states_[s].explored) {
      std::vector<Move> ms;
      for (auto& t : lts_transitions(states_[s].config, sig_))
        ms.push_back({t.label, to_string(t.label), state_id(t.target)});
      states_[s].moves = std::move(ms);
      states_[s].explored = true;
    }
    return states_[s].moves;
  }

  const std::vector<int>& closure(int s) {
    if (!states_[s].closed) {
      std::vector<int> out{s};
      std::set<int> seen{s};
      bool complete = true;
      for (size_t i = 0; i < out.size(); ++i) {
        for (const auto& m : moves(out[i])) {
          if (m.label.kind != LabelKind::kTau || seen.count(m.target)) continue;
          if (static_cast<int>(out.size()) >= b_.max_tau) {
            complete = false;
            continue;
          }
          seen.insert(m.target);
          out.push_back(m.target);
        }
      }
      states_[s].closure = std::move(out);
      states_[s].complete = complete;
      states_[s].closed = true;
    }
    return states_[s].closure;
  }

  int injected(int s, const Label& l) {
    std::string key = std::to_string(s) + " " + to_string(l);
    if (auto it = inject_.find(key); it != inject_.end()) return it->second;
    int t = state_id(detail::inject(states_[s].config, l, sig_));
    inject_.emplace(key, t);
    return t;
  }

  void expand(int i) {
    int a = pairs_[i].a, b = pairs_[i].b;
    std::vector<Challenge> chs;
    challenge(a, b, true, chs);
    challenge(b, a, false, chs);
    pairs_[i].challenges = std::move(chs);
    pairs_[i].expanded = true;
  }

  // Moves of `p` answered by `q`.
  void challenge(int p, int q, bool left, std::vector<Challenge>& out) {
    const std::vector<int> qs = closure(q);
    bool full = states_[q].complete;
    if (!full) incomplete_ = true;
    auto add = [&](Challenge& ch, int pn, int qn, const std::string& rl) {
      ch.responses.push_back(left ? pair_id(pn, qn) : pair_id(qn, pn));
      ch.response_labels.push_back(rl);
    };
    const std::vector<Move> pm = moves(p);
    for (const auto& t : pm) {
      Challenge ch{left, t.text, {}, {}, !full};
      switch (t.label.kind) {
        case LabelKind::kTau:
          for (int q2 : qs) add(ch, t.target, q2, "tau*");
          break;
        case LabelKind::kOut:
          for (int q2 : qs) {
            const std::vector<Move> qm = moves(q2);
            for (const auto& r : qm)
              if (r.label.kind == LabelKind::kOut && r.label == t.label)
                add(ch, t.target, r.target, r.text);
          }
          break;
        case LabelKind::kInL:
        case LabelKind::kInR:
          for (int q2 : qs) add(ch, t.target, injected(q2, t.label), t.text);
          break;
      }
      out.push_back(std::move(ch));
    }
  }

  static bool is_tau(const Challenge& c) { return c.label.rfind("tau(", 0) == 0; }

  Witness witness(const std::vector<int>& dead) {
    Witness w;
    int cur = 0;
    for (size_t guard = 0; guard < pairs_.size() + 1; ++guard) {
      const Pair& p = pairs_[cur];
      const Challenge* bad = nullptr;
      for (const auto& ch : p.challenges) {
        bool ok = ch.open;
        for (int r : ch.responses) ok = ok || dead[r] == 0 || dead[r] >= dead[cur];
        // visible challenges make the better witness
        if (!ok && (!bad || is_tau(*bad))) bad = &ch;
      }
      if (!bad) break;
      auto& mine = bad->from_left ? w.left : w.right;
      auto& theirs = bad->from_left ? w.right : w.left;
      if (!is_tau(*bad)) mine.push_back(bad->label);
      if (bad->responses.empty()) {
        theirs.push_back("no matching move");
        w.reason = "unanswered " + bad->label;
        return w;
      }
      int next = bad->responses[0];
      size_t pick = 0;
      for (size_t k = 1; k < bad->responses.size(); ++k)
        if (dead[bad->responses[k]] < dead[next]) next = bad->responses[pick = k];
      if (!is_tau(*bad)) theirs.push_back(bad->response_labels[pick]);
      cur = next;
    }
    w.reason = "no bisimulation contains the pair";
    return w;
  }

  const Signature& sig_;
  Bounds b_;
  std::vector<State> states_;
  std::unordered_map<std::string, int> state_index_;
  std::vector<Pair> pairs_;
  std::map<std::pair<int, int>, int> pair_index_;
  std::unordered_map<std::string, int> inject_;
  bool incomplete_ = false;
};

}  // namespace

Verdict weak_bisim(const Configuration& d1, const Configuration& d2, const Signature& sig,
                   const Bounds& b) {
  Interface i1 = interface_of(d1), i2 = interface_of(d2);
  if (!interface_equal(i1, i2, sig))
    throw Error("weak_bisim: interfaces differ: " + to_string(i1) + " vs " + to_string(i2));
  if (b.strategy == Strategy::kConfluent) return confluent(d1, d2, sig, b);
  return Game(sig, b).run(d1, d2);
}

}  // namespace slr
