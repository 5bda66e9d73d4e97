#include <algorithm>
#include <map>

#include "sessionlr/typecheck.hpp"

namespace slr {
namespace {

class ConfigChecker {
 public:
  ConfigChecker(const Configuration& c, const Signature& sig, const Semilattice* lat)
      : c_(c), sig_(sig), lat_(lat) {}

  std::vector<Diagnostic> diags;

  void run(const std::vector<ChanDecl>& provided, const std::vector<ChanDecl>& want) {
    index(provided);
    if (!diags.empty()) return;
    interface(want);
    forest();
    for (size_t i = 0; i < c_.nodes.size(); ++i) node(i);
  }

 private:
  const Configuration& c_;
  const Signature& sig_;
  const Semilattice* lat_;
  Theory empty_;
  std::map<Chan, int> provider_, user_;
  std::map<Chan, ChanDecl> external_;

  void report(const std::string& rule, const std::string& msg) {
    diags.push_back({{}, rule, msg, ""});
  }

  bool le(const SecPtr& a, const SecPtr& b) {
    return a && b && entails(empty_, *lat_, {a, b});
  }

  void index(const std::vector<ChanDecl>& provided) {
    for (const auto& d : provided) {
      if (external_.count(d.chan)) report("comp", "client channel " + to_string(d.chan) + " listed twice");
      external_[d.chan] = d;
    }
    for (size_t i = 0; i < c_.nodes.size(); ++i) {
      const Node& n = c_.nodes[i];
      Chan p = n.provides();
      if (provider_.count(p))
        report("comp", "two providers for channel " + to_string(p));
      provider_[p] = static_cast<int>(i);
      if (external_.count(p))
        report("comp", "channel " + to_string(p) + " is both provided and free");
      for (const auto& u : n.uses()) {
        if (!u.runtime()) {
          report("proc", "node " + to_string(n) + " mentions unbound variable " + u.name);
          continue;
        }
        if (user_.count(u)) report("comp", "two clients for channel " + to_string(u));
        user_[u] = static_cast<int>(i);
      }
    }
    for (const auto& [ch, i] : user_) {
      if (provider_.count(ch) || external_.count(ch)) continue;
      const Node& n = c_.nodes[i];
      if (n.is_msg)
        report("msg", "generation mismatch: no continuation for " + to_string(ch) +
                          " used by " + to_string(n));
      else
        report("comp", "unprovided client channel " + to_string(ch));
    }
    for (const auto& [ch, d] : external_)
      if (!user_.count(ch)) report("comp", "free channel " + to_string(ch) + " is never used");
  }

  void interface(const std::vector<ChanDecl>& want) {
    std::vector<Chan> have;
    for (const auto& [ch, i] : provider_)
      if (!user_.count(ch)) have.push_back(ch);
    for (const auto& w : want) {
      auto it = provider_.find(w.chan);
      if (it == provider_.end() || user_.count(w.chan)) {
        report("comp", "offered channel " + to_string(w.chan) + " is not provided");
        continue;
      }
      const Node& n = c_.nodes[it->second];
      if (!type_equal(n.type, w.type, sig_))
        report("comp", "offered channel " + to_string(w.chan) + " has type " +
                           print_type(n.type) + ", expected " + print_type(w.type));
      if (lat_ && w.sec && !(le(n.sec, w.sec) && le(w.sec, n.sec)))
        report("comp", "offered channel " + to_string(w.chan) + " has secrecy " +
                           to_string(n.sec) + ", expected " + to_string(w.sec));
    }
    for (const auto& h : have) {
      bool listed = std::any_of(want.begin(), want.end(), [&](const ChanDecl& d) { return d.chan == h; });
      if (!listed) report("comp", "channel " + to_string(h) + " is offered but not in the interface");
    }
  }

  // provider -> client edges must not form a cycle
  void forest() {
    const size_t n = c_.nodes.size();
    for (size_t start = 0; start < n; ++start) {
      size_t cur = start;
      for (size_t hops = 0; hops <= n; ++hops) {
        auto it = user_.find(c_.nodes[cur].provides());
        if (it == user_.end()) break;
        cur = static_cast<size_t>(it->second);
        if (cur == start) {
          report("comp", "configuration is not a forest (cycle through " +
                             to_string(c_.nodes[start]) + ")");
          return;
        }
      }
    }
  }

  TypePtr type_of(const Chan& ch) {
    auto p = provider_.find(ch);
    if (p != provider_.end()) return c_.nodes[p->second].type;
    auto e = external_.find(ch);
    return e != external_.end() ? e->second.type : nullptr;
  }
  SecPtr sec_of(const Chan& ch) {
    auto p = provider_.find(ch);
    if (p != provider_.end()) return c_.nodes[p->second].sec;
    auto e = external_.find(ch);
    return e != external_.end() ? e->second.sec : nullptr;
  }

  void node(size_t i) {
    const Node& n = c_.nodes[i];
    if (!n.type) {
      report(n.is_msg ? "msg" : "proc", "node without a type: " + to_string(n));
      return;
    }
    if (lat_ && !n.sec) {
      report(n.is_msg ? "msg" : "proc", "node without secrecy: " + to_string(n));
      return;
    }
    // secured rules: every client d' below d
    if (lat_)
      for (const auto& u : n.uses()) {
        SecPtr s = sec_of(u);
        if (s && !le(s, n.sec))
          report(n.is_msg ? "msg" : "proc", "client " + to_string(u) + " of " + to_string(n) +
                                                " has secrecy above " + to_string(n.sec));
      }
    if (n.is_msg) {
      message(n);
      return;
    }
    LinCtx ctx;
    for (const auto& u : n.uses()) {
      TypePtr t = type_of(u);
      if (!t) return;  // already reported
      ctx[u] = {t, lat_ ? sec_of(u) : nullptr};
    }
    Offer off{n.chan, n.type, lat_ ? n.sec : nullptr};
    std::vector<Diagnostic> ds;
    if (lat_) {
      if (!n.running) {
        report("proc", "process without running secrecy: " + to_string(n));
        return;
      }
      Judgment j{empty_, ctx, n.term, n.running, off};
      ds = check_proc_ifc(j, sig_, *lat_).errors;
    } else {
      ds = check_proc_structural(ctx, n.term, off, sig_).errors;
    }
    for (auto& d : ds) {
      d.message = "in " + to_string(n) + ": " + d.message;
      diags.push_back(std::move(d));
    }
  }

  void message(const Node& m) {
    auto bad = [&](const std::string& rule, const std::string& why) {
      report(rule, to_string(m) + ": " + why);
    };
    auto same_sec = [&](const Chan& ch, const std::string& rule) {
      if (!lat_) return;
      SecPtr s = sec_of(ch);
      if (!s || !(le(s, m.sec) && le(m.sec, s)))
        bad(rule, "secrecy of " + to_string(ch) + " differs from the message");
    };
    TypePtr u = unfold(m.type, sig_);
    switch (m.mkind) {
      case MsgKind::kClose:
        if (m.dir != Dir::kRight || u->kind != Type::Kind::kOne)
          bad("m_1R", "close message must provide a channel of type 1");
        return;
      case MsgKind::kLabel:
        if (m.dir == Dir::kRight) {
          if (u->kind != Type::Kind::kPlus || !u->branch(m.label))
            return bad("m_+R", "provided type " + print_type(m.type) + " has no internal choice " + m.label);
          TypePtr cont = type_of(m.chan.next());
          if (cont && !type_equal(cont, u->branch(m.label), sig_))
            bad("m_+R", "continuation " + to_string(m.chan.next()) + " has type " +
                            print_type(cont));
          same_sec(m.chan.next(), "m_+R");
        } else {
          TypePtr carrier = type_of(m.chan);
          if (!carrier) return;
          TypePtr cu = unfold(carrier, sig_);
          if (cu->kind != Type::Kind::kWith || !cu->branch(m.label))
            return bad("m_&L", "channel " + to_string(m.chan) + " of type " + print_type(carrier) +
                                   " offers no " + m.label);
          if (!type_equal(m.type, cu->branch(m.label), sig_))
            bad("m_&L", "provided type " + print_type(m.type) + " does not match branch " + m.label);
          same_sec(m.chan, "m_&L");
        }
        return;
      case MsgKind::kChan: {
        TypePtr sent = type_of(m.sent);
        if (m.dir == Dir::kRight) {
          if (u->kind != Type::Kind::kTensor) return bad("m_*R", "provided type is not a tensor");
          if (sent && !type_equal(sent, u->left, sig_)) bad("m_*R", "sent channel has wrong type");
          TypePtr cont = type_of(m.chan.next());
          if (cont && !type_equal(cont, u->right, sig_)) bad("m_*R", "continuation has wrong type");
          same_sec(m.sent, "m_*R");
          same_sec(m.chan.next(), "m_*R");
        } else {
          TypePtr carrier = type_of(m.chan);
          if (!carrier) return;
          TypePtr cu = unfold(carrier, sig_);
          if (cu->kind != Type::Kind::kLolli) return bad("m_-oL", "carrier is not a linear implication");
          if (sent && !type_equal(sent, cu->left, sig_)) bad("m_-oL", "sent channel has wrong type");
          if (!type_equal(m.type, cu->right, sig_)) bad("m_-oL", "provided type has wrong type");
          same_sec(m.sent, "m_-oL");
          same_sec(m.chan, "m_-oL");
        }
        return;
      }
    }
  }
};

}  // namespace

std::vector<Diagnostic> check_config(const std::vector<ChanDecl>& provided,
                                     const Configuration& config,
                                     const std::vector<ChanDecl>& want,
                                     const Signature& sig, const Semilattice* lat) {
  ConfigChecker ck(config, sig, lat);
  try {
    ck.run(provided, want);
  } catch (const Error& e) {
    ck.diags.push_back({{}, "TVar", e.what(), ""});
  }
  return ck.diags;
}

std::vector<Diagnostic> check_config(const Configuration& config, const Signature& sig,
                                     const Semilattice* lat) {
  return check_config(config.clients, config, offered(config), sig, lat);
}

}  // namespace slr
