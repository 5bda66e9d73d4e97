#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "internal.hpp"

namespace slr {
namespace {

using detail::Obs;

Verdict related() { return {}; }

Verdict inconclusive(std::string bound) {
  Verdict v;
  v.kind = Verdict::Kind::kInconclusive;
  v.bound = std::move(bound);
  return v;
}

Verdict distinguished(std::vector<std::string> left, std::vector<std::string> right,
                      std::string reason) {
  Verdict v;
  v.kind = Verdict::Kind::kDistinguished;
  v.witness = {std::move(left), std::move(right), std::move(reason)};
  return v;
}

Verdict prefixed(Verdict v, const std::string& step) {
  if (v.distinguished()) {
    v.witness.left.insert(v.witness.left.begin(), step);
    v.witness.right.insert(v.witness.right.begin(), step);
  }
  return v;
}

// Distinguished beats inconclusive beats related.
void combine(Verdict& acc, Verdict v) {
  if (acc.distinguished()) return;
  if (v.distinguished() || (v.kind == Verdict::Kind::kInconclusive && acc.related())) {
    acc = std::move(v);
  }
}

bool same_payload(const Node& a, const Node& b) {
  return a.mkind == b.mkind && (a.mkind != MsgKind::kLabel || a.label == b.label);
}

std::vector<ChanDecl> sorted_clients(const Configuration& c) {
  auto out = c.clients;
  std::sort(out.begin(), out.end(),
            [](const ChanDecl& a, const ChanDecl& b) { return a.chan < b.chan; });
  return out;
}

class Rslr {
 public:
  Rslr(const Signature& sig, const Bounds& b) : sig_(sig), b_(b) {}

  Verdict check(const Configuration& d1, const Configuration& d2, int m) {
    if (m <= 0) return related();
    std::string key = detail::pair_key(d1, d2) + "@" + std::to_string(m);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= static_cast<size_t>(b_.max_states)) return inconclusive("max_states");
    Verdict v = b_.strategy == Strategy::kConfluent ? confluent(d1, d2, m) : enumerate(d1, d2, m);
    memo_[key] = v;
    return v;
  }

  size_t states() const { return memo_.size(); }

 private:
  Verdict confluent(const Configuration& d1, const Configuration& d2, int m) {
    auto s1 = detail::settle(d1, sig_, b_.max_tau);
    auto s2 = detail::settle(d2, sig_, b_.max_tau);
    if (!s1.ok || !s2.ok) return inconclusive("max_tau");
    return observe(s1.config, s2.config, m);
  }

  Verdict enumerate(const Configuration& d1, const Configuration& d2, int m) {
    bool full1 = true, full2 = true;
    auto c1 = detail::tau_closure(d1, sig_, b_.max_tau, &full1);
    auto c2 = detail::tau_closure(d2, sig_, b_.max_tau, &full2);
    Verdict acc = related();
    if (!full1) acc = inconclusive("max_tau");
    for (const auto& p : c1) {
      Verdict best;
      bool have = false;
      for (const auto& q : c2) {
        Verdict v = observe(p, q, m);
        if (!have || rank(v) < rank(best) || (v.distinguished() && vague(best) && !vague(v))) {
          best = v;
          have = true;
        }
        if (best.related()) break;
      }
      if (!best.related() && !full2) best = inconclusive("max_tau");
      combine(acc, best);
      if (acc.distinguished()) break;
    }
    return acc;
  }

  // Witness that only says the other side had not produced anything yet.
  static bool vague(const Verdict& v) {
    return !v.witness.right.empty() && v.witness.right.back().rfind("no output", 0) == 0;
  }

  static int rank(const Verdict& v) {
    return v.related() ? 0 : v.kind == Verdict::Kind::kInconclusive ? 1 : 2;
  }

  // Clauses for a pair of states whose observables are taken as they are.
  Verdict observe(const Configuration& s1, const Configuration& s2, int m) {
    Obs o1 = detail::observe(s1), o2 = detail::observe(s2);
    Verdict acc = related();
    std::set<int> used;
    for (int i : o1.out) {
      const Node& n1 = s1.nodes[i];
      int j = -1;
      for (int k : o2.out)
        if (!used.count(k) && s2.nodes[k].chan == n1.chan && same_payload(n1, s2.nodes[k])) {
          j = k;
          break;
        }
      Transition t1 = detail::emit(s1, i);
      std::string step = to_string(t1.label);
      if (j < 0) {
        std::vector<std::string> right;
        for (int k : o2.out)
          if (s2.nodes[k].chan == n1.chan) right.push_back(to_string(detail::emit(s2, k).label));
        if (right.empty()) right.push_back("no output on " + to_string(n1.chan));
        return distinguished({step}, right, "unmatched output");
      }
      used.insert(j);
      Transition t2 = detail::emit(s2, j);
      combine(acc, prefixed(output(t1, t2, m), step));
      if (acc.distinguished()) return acc;
    }
    for (const auto& ch : o1.wait) {
      std::string fresh = detail::fresh_base(s1, s2);
      for (Label l : detail::input_labels(s1, ch, sig_)) {
        if (l.payload == MsgKind::kChan) l.sent = Chan(fresh, 0);
        Verdict v = check(detail::inject(s1, l, sig_), detail::inject(s2, l, sig_), m - 1);
        combine(acc, prefixed(std::move(v), to_string(l)));
        if (acc.distinguished()) return acc;
      }
    }
    return acc;
  }

  Verdict output(const Transition& t1, const Transition& t2, int m) {
    const Label& l1 = t1.label;
    const Label& l2 = t2.label;
    if (l1.payload != MsgKind::kChan) return check(t1.target, t2.target, m - 1);
    // an extruded channel is still provided inside, a free one is gone
    bool bound1 = provider_of(t1.target, l1.sent) >= 0;
    bool bound2 = provider_of(t2.target, l2.sent) >= 0;
    if (bound1 != bound2 || l1.sent != l2.sent)
      return distinguished({}, {to_string(l2)}, "different channel sent");
    if (!bound1) return check(t1.target, t2.target, m - 1);
    auto [tree1, rest1] = detail::split_tree(t1.target, l1.sent);
    auto [tree2, rest2] = detail::split_tree(t2.target, l2.sent);
    auto same_chans = [](const Configuration& a, const Configuration& b) {
      auto x = sorted_clients(a), y = sorted_clients(b);
      if (x.size() != y.size()) return false;
      for (size_t k = 0; k < x.size(); ++k)
        if (x[k].chan != y[k].chan) return false;
      return true;
    };
    if (!same_chans(tree1, tree2) || !same_chans(rest1, rest2))
      return distinguished({}, {to_string(l2)}, "split mismatch");
    Verdict acc = check(tree1, tree2, m - 1);
    if (!acc.distinguished()) combine(acc, check(rest1, rest2, m - 1));
    return acc;
  }

  const Signature& sig_;
  Bounds b_;
  std::map<std::string, Verdict> memo_;
};

}  // namespace

Verdict rslr_check(const Configuration& d1, const Configuration& d2, const Signature& sig, int m,
                   const Bounds& b) {
  Rslr r(sig, b);
  Verdict v = r.check(d1, d2, m);
  v.states = r.states();
  return v;
}

Verdict rslr_equiv(const Configuration& d1, const Configuration& d2, const Signature& sig, int m,
                   const Bounds& b) {
  Verdict v = rslr_check(d1, d2, sig, m, b);
  if (v.distinguished()) return v;
  Verdict w = rslr_check(d2, d1, sig, m, b);
  w.states += v.states;
  if (w.distinguished()) {
    std::swap(w.witness.left, w.witness.right);
    return w;
  }
  if (v.kind == Verdict::Kind::kInconclusive) {
    v.states = w.states;
    return v;
  }
  return w;
}

}  // namespace slr
