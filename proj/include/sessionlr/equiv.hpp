#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sessionlr/config.hpp"
#include "sessionlr/lattice.hpp"
#include "sessionlr/syntax.hpp"

namespace slr {

// Channels whose base is kHole are provided but never observed; this is how
// an interface with `_` on the right is represented.
inline constexpr const char* kHole = "_";

// ---- labelled transitions ----

enum class LabelKind { kTau, kOut, kInL, kInR };

struct Label {
  LabelKind kind = LabelKind::kTau;
  Chan chan;
  MsgKind payload = MsgKind::kClose;
  std::string label;  // kLabel payloads
  Chan sent;          // kChan payloads
  std::string rule;   // kTau: the reduction rule

  bool operator==(const Label& o) const {
    return kind == o.kind && chan == o.chan && payload == o.payload && label == o.label &&
           sent == o.sent;
  }
};
std::string to_string(const Label& l);

struct Transition {
  Label label;
  Configuration target;
};

// Free client channels and observed offered channels of a configuration.
struct Interface {
  std::vector<ChanDecl> clients;
  std::vector<ChanDecl> offered;
};
Interface interface_of(const Configuration& c);
std::string to_string(const Interface& i);
bool interface_equal(const Interface& a, const Interface& b, const Signature& sig);

// Tau for every redex (tail calls run in place), outputs for messages on
// interface channels and inputs for receives blocked on interface channels.
// Received channels get the first unused base of the form @k.
std::vector<Transition> lts_transitions(const Configuration& c, const Signature& sig);

// ---- bounded equivalence checks ----

enum class Strategy {
  // Runs each side to a settled state (no internal step can change what is
  // observable on the interface) and compares those. Sound because internal
  // steps commute with everything else.
  kConfluent,
  // Enumerates tau-closures literally; only for small finite systems.
  kEnumerate,
};

struct Bounds {
  int max_tau = 64;         // settle rounds, or tau-closure size per hop
  int max_states = 20000;   // explored state pairs
  Strategy strategy = Strategy::kConfluent;
};

struct Witness {
  std::vector<std::string> left;   // visible labels of the first configuration
  std::vector<std::string> right;  // what the second one does instead
  std::string reason;
};

struct Verdict {
  enum class Kind { kRelated, kDistinguished, kInconclusive };
  Kind kind = Kind::kRelated;
  Witness witness;
  std::string bound;  // exhausted bound when inconclusive
  size_t states = 0;

  bool related() const { return kind == Kind::kRelated; }
  bool distinguished() const { return kind == Kind::kDistinguished; }
};
std::string to_string(Verdict::Kind k);

// Weak asynchronous bisimilarity. Throws Error on an interface mismatch.
Verdict weak_bisim(const Configuration& d1, const Configuration& d2, const Signature& sig,
                   const Bounds& b = {});

// One direction of the term interpretation at observation index m.
Verdict rslr_check(const Configuration& d1, const Configuration& d2, const Signature& sig,
                   int m, const Bounds& b = {});
// Both directions.
Verdict rslr_equiv(const Configuration& d1, const Configuration& d2, const Signature& sig,
                   int m, const Bounds& b = {});

// ---- composition ----

// Plugs `provider` into the free client channel it offers. Bound bases of
// the provider are renamed apart; throws Error on a type mismatch or a
// clash between free channels.
Configuration link(const Configuration& provider, const Configuration& client,
                   const Signature& sig);
// Renames a free channel base everywhere.
Configuration rename_base(const Configuration& c, const std::string& from, const std::string& to);

// ---- noninterference harness ----

struct SecEntry {
  Chan chan;
  TypePtr type;
  int level = 0;  // index into the semilattice
};

struct SecInterface {
  std::vector<SecEntry> ctx;
  SecEntry offered;
  int observer = 0;
};

// Drops context channels above the observer; an offered channel above it
// becomes the hidden `_ : 1`.
Interface project_context(const SecInterface& s, const Semilattice& lat);

struct HighEnv {
  Configuration providers;  // closed trees for the hidden context channels
  Configuration client;     // tree using the hidden offered channel, rooted at _
  std::string name;
};

// Depth-bounded high providers and clients. Helper definitions they spawn
// are added to `sig`.
std::vector<HighEnv> gen_high_envs(const SecInterface& s, const Semilattice& lat, int depth,
                                   Signature& sig, size_t max_per_channel = 6);

struct NiResult {
  Verdict verdict;
  std::string env_left, env_right;  // the high environments of a counterexample
  size_t pairs = 0;
};

// d1 under s1 against d2 under s2 for every pair of generated environments,
// checked with rslr_check in both directions at index m. Throws Error when
// the projections differ.
NiResult ni_check(const Configuration& d1, const Configuration& d2, const SecInterface& s1,
                  const SecInterface& s2, const Signature& sig, const Semilattice& lat, int m,
                  int depth, const Bounds& b = {});

// Self-check of a secured definition for every model of its theory.
NiResult ni_check_proc(const Signature& sig, const Semilattice& lat, const std::string& proc,
                       int observer, int m, int depth, const Bounds& b = {});

}  // namespace slr
