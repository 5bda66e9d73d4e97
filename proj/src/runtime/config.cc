#include <algorithm>
#include <map>
#include <sstream>

#include "sessionlr/config.hpp"

namespace slr {

std::vector<Chan> Node::uses() const {
  if (!is_msg) {
    std::vector<Chan> out;
    for (const auto& c : free_chans(term))
      if (c != chan) out.push_back(c);
    return out;
  }
  switch (mkind) {
    case MsgKind::kClose:
      return {};
    case MsgKind::kLabel:
      return {dir == Dir::kRight ? chan.next() : chan};
    case MsgKind::kChan:
      return {sent, dir == Dir::kRight ? chan.next() : chan};
  }
  return {};
}

Node make_proc(Chan chan, TermPtr term, TypePtr type, SecPtr sec, SecPtr running) {
  Node n;
  n.chan = std::move(chan);
  n.term = std::move(term);
  n.type = std::move(type);
  n.sec = std::move(sec);
  n.running = std::move(running);
  return n;
}

Node make_msg(MsgKind k, Dir d, Chan chan, TypePtr type, std::string label, Chan sent,
              SecPtr sec) {
  Node n;
  n.is_msg = true;
  n.mkind = k;
  n.dir = d;
  n.chan = std::move(chan);
  n.type = std::move(type);
  n.label = std::move(label);
  n.sent = std::move(sent);
  n.sec = std::move(sec);
  return n;
}

std::vector<ChanDecl> offered(const Configuration& c) {
  std::vector<Chan> used;
  for (const auto& n : c.nodes)
    for (const auto& u : n.uses()) used.push_back(u);
  std::vector<ChanDecl> out;
  for (const auto& n : c.nodes) {
    Chan p = n.provides();
    if (std::find(used.begin(), used.end(), p) == used.end())
      out.push_back({p, n.type, n.sec});
  }
  return out;
}

const ChanDecl* find_client(const Configuration& c, const Chan& ch) {
  for (const auto& d : c.clients)
    if (d.chan == ch) return &d;
  return nullptr;
}

int provider_of(const Configuration& c, const Chan& ch) {
  for (size_t i = 0; i < c.nodes.size(); ++i)
    if (c.nodes[i].provides() == ch) return static_cast<int>(i);
  return -1;
}

TypePtr chan_type(const Configuration& c, const Chan& ch) {
  int p = provider_of(c, ch);
  if (p >= 0) return c.nodes[p].type;
  const ChanDecl* d = find_client(c, ch);
  return d ? d->type : nullptr;
}

SecPtr chan_sec(const Configuration& c, const Chan& ch) {
  int p = provider_of(c, ch);
  if (p >= 0) return c.nodes[p].sec;
  const ChanDecl* d = find_client(c, ch);
  return d ? d->sec : nullptr;
}

std::string payload_string(const Node& m) {
  switch (m.mkind) {
    case MsgKind::kClose:
      return "close";
    case MsgKind::kLabel:
      return m.label;
    case MsgKind::kChan:
      return "send " + to_string(m.sent);
  }
  return "?";
}

std::string to_string(const Node& n) {
  if (n.is_msg) {
    std::string s = "msg(";
    switch (n.mkind) {
      case MsgKind::kClose:
        s += "close " + to_string(n.chan);
        break;
      case MsgKind::kLabel:
        s += to_string(n.chan) + "." + n.label;
        break;
      case MsgKind::kChan:
        s += "send " + to_string(n.sent) + " " + to_string(n.chan);
        break;
    }
    return s + ")";
  }
  std::string body = print_term(n.term);
  // single line for display
  std::string flat;
  bool space = false;
  for (char ch : body) {
    if (ch == '\n' || ch == ' ') {
      space = !flat.empty();
      continue;
    }
    if (space) flat += ' ';
    space = false;
    flat += ch;
  }
  return "proc(" + to_string(n.chan) + ", " + flat + ")";
}

std::string to_string(const Configuration& c) {
  std::ostringstream os;
  for (size_t i = 0; i < c.nodes.size(); ++i) os << (i ? " " : "") << to_string(c.nodes[i]);
  return os.str();
}

Configuration map_chans(const Configuration& c, const std::function<Chan(const Chan&)>& f) {
  Configuration out;
  out.next_fresh = c.next_fresh;
  for (const auto& d : c.clients) out.clients.push_back({f(d.chan), d.type, d.sec});
  for (const auto& n0 : c.nodes) {
    Node n = n0;
    n.chan = f(n.chan);
    if (n.is_msg) {
      if (n.mkind == MsgKind::kChan) n.sent = f(n.sent);
    } else {
      std::map<Chan, Chan> m;
      for (const auto& x : free_chans(n.term)) {
        Chan y = f(x);
        if (y != x) m[x] = y;
      }
      if (!m.empty()) n.term = rename(n.term, m);
    }
    out.nodes.push_back(std::move(n));
  }
  return out;
}

bool node_equal(const Node& a, const Node& b) {
  if (a.is_msg != b.is_msg || a.chan != b.chan || !sec_equal(a.sec, b.sec)) return false;
  if (a.is_msg)
    return a.mkind == b.mkind && a.dir == b.dir && a.label == b.label && a.sent == b.sent &&
           type_syntax_equal(a.type, b.type);
  return sec_equal(a.running, b.running) && type_syntax_equal(a.type, b.type) &&
         term_equal(a.term, b.term);
}

bool config_equal(const Configuration& a, const Configuration& b) {
  if (a.nodes.size() != b.nodes.size() || a.clients.size() != b.clients.size()) return false;
  for (size_t i = 0; i < a.nodes.size(); ++i)
    if (!node_equal(a.nodes[i], b.nodes[i])) return false;
  for (size_t i = 0; i < a.clients.size(); ++i)
    if (a.clients[i].chan != b.clients[i].chan ||
        !type_syntax_equal(a.clients[i].type, b.clients[i].type))
      return false;
  return true;
}

}  // namespace slr
