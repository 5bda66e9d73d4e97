#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sessionlr/equiv.hpp"
#include "sessionlr/runtime.hpp"

namespace slr::detail {

RunContext equiv_ctx(const Signature& sig);
bool is_hole(const Chan& c);

struct Obs {
  std::vector<int> out;    // message nodes on interface channels
  std::vector<Chan> wait;  // interface channels with a blocked receive
};
Obs observe(const Configuration& c);

// Output transition consuming interface message `msg`.
Transition emit(const Configuration& c, int msg);
// Inputs that make sense on interface channel `ch` (labels, close, or one
// fresh channel), whether or not anyone is waiting there yet.
std::vector<Label> input_labels(const Configuration& c, const Chan& ch, const Signature& sig);
Configuration inject(const Configuration& c, const Label& l, const Signature& sig);

struct Settled {
  Configuration config;
  bool ok = true;  // false when the round budget ran out
};
// Fires every enabled redex round by round until the interface can no
// longer change without outside input.
Settled settle(const Configuration& c, const Signature& sig, int max_rounds);

// All tau-reachable states (canonical representatives), BFS order.
std::vector<Configuration> tau_closure(const Configuration& c, const Signature& sig,
                                       int max_states, bool* complete);

// Drops label messages whose reader can never act on their channel; the
// reader moves on to the next generation. Only used on states under
// comparison, the result may not be well typed.
Configuration collect_garbage(const Configuration& c, const Signature& sig);

std::string state_key(const Configuration& c);
// Key of an ordered pair; free generations are shifted jointly.
std::string pair_key(const Configuration& a, const Configuration& b);

// (subtree providing `root`, everything else)
std::pair<Configuration, Configuration> split_tree(const Configuration& c, const Chan& root);

// Smallest @k base unused in both configurations.
std::string fresh_base(const Configuration& a, const Configuration& b);
std::string fresh_base(const Configuration& c);

std::vector<Chan> client_chans(const Configuration& c);

}  // namespace slr::detail
