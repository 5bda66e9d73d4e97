#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sessionlr/syntax.hpp"

namespace slr {

enum class MsgKind { kClose, kLabel, kChan };
// kRight travels provider -> client (+, *, 1); kLeft client -> provider (&, -o).
enum class Dir { kRight, kLeft };

struct Node {
  bool is_msg = false;
  Chan chan;     // proc: offered channel; msg: the channel named in the message
  TermPtr term;  // proc only
  TypePtr type;  // type of the provided channel
  SecPtr sec;      // maximal secrecy (levels are constants); null in plain mode
  SecPtr running;  // proc only; null in plain mode
  MsgKind mkind = MsgKind::kClose;
  Dir dir = Dir::kRight;
  std::string label;
  Chan sent;

  // A left message x.k provides x_{a+1} and is a client of x_a.
  Chan provides() const { return is_msg && dir == Dir::kLeft ? chan.next() : chan; }
  std::vector<Chan> uses() const;
};

Node make_proc(Chan chan, TermPtr term, TypePtr type, SecPtr sec = nullptr,
               SecPtr running = nullptr);
Node make_msg(MsgKind k, Dir d, Chan chan, TypePtr type, std::string label = "",
              Chan sent = {}, SecPtr sec = nullptr);

struct ChanDecl {
  Chan chan;
  TypePtr type;
  SecPtr sec;
};

struct Configuration {
  std::vector<Node> nodes;
  std::vector<ChanDecl> clients;  // free client channels (Delta_0)
  int next_fresh = 0;
};

// Channels provided by some node and used by none, in node order.
std::vector<ChanDecl> offered(const Configuration& c);
// Type / secrecy of a channel as seen by its client; null when unknown.
const ChanDecl* find_client(const Configuration& c, const Chan& ch);
int provider_of(const Configuration& c, const Chan& ch);  // node index or -1
TypePtr chan_type(const Configuration& c, const Chan& ch);
SecPtr chan_sec(const Configuration& c, const Chan& ch);

std::string to_string(const Node& n);
std::string to_string(const Configuration& c);
// Payload text of a message, e.g. "close", "tok1", "send z#0".
std::string payload_string(const Node& msg);

// Applies `f` to every channel occurrence (nodes, payloads, free term
// channels, client declarations). `f` must be injective on the channels
// present.
Configuration map_chans(const Configuration& c, const std::function<Chan(const Chan&)>& f);

bool node_equal(const Node& a, const Node& b);
bool config_equal(const Configuration& a, const Configuration& b);

}  // namespace slr
