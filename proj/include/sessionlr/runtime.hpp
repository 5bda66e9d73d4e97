#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sessionlr/config.hpp"
#include "sessionlr/lattice.hpp"
#include "sessionlr/syntax.hpp"

namespace slr {

struct RunContext {
  const Signature* sig = nullptr;
  const Semilattice* lat = nullptr;  // secrecy tracking when set
  // Execute `tail X(..)` in place instead of spawn + forward. The two differ
  // only by an internal forwarder node.
  bool inline_tail_calls = false;
};

struct Redex {
  std::string rule;
  int proc = -1;  // node index of the acting process
  int msg = -1;   // consumed message, receives only
  Chan principal;

  bool operator==(const Redex&) const = default;
};

struct TraceEvent {
  int step = 0;
  std::string rule;
  Chan channel;
  std::string label;
  std::string sent;
};

struct RunResult {
  Configuration config;
  std::vector<TraceEvent> trace;
};

// Root process `name` at generation 0. Context variables listed in
// `providers` are served by spawning the named closed definitions; the rest
// stay free client channels. `val` fixes the secrecy variables (first model
// of the theory when empty).
Configuration init_config(const std::string& name, const RunContext& rc,
                          const std::map<std::string, std::string>& providers = {},
                          const Valuation& val = {});

std::vector<Redex> enabled_redexes(const Configuration& c);
Configuration step(const Configuration& c, const Redex& r, const RunContext& rc,
                   TraceEvent* ev = nullptr);
RunResult run(const Configuration& c, const RunContext& rc, uint64_t seed, int max_steps);

struct Observables {
  std::vector<Chan> upsilon;  // interface channels with a pending message
  std::vector<Chan> theta;    // interface channels a process waits on
};
Observables observables(const Configuration& c);

// Renames bound channel bases to %0, %1, ... in forest traversal order and
// orders nodes the same way. Free channels are untouched. With
// `rebase_gens` the generations of each bound base are also shifted to
// start at 0, which identifies states that differ only in how many internal
// messages have been exchanged.
Configuration canonicalize(const Configuration& c, bool rebase_gens = false);

// Interface messages left at quiescence, as "channel ! payload" strings.
std::vector<std::string> interface_messages(const Configuration& c);

}  // namespace slr
