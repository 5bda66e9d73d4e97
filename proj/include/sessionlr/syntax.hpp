#pragma once

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sessionlr/common.hpp"
#include "sessionlr/lattice.hpp"

namespace slr {

// ---- session types ----

struct Type;
using TypePtr = std::shared_ptr<const Type>;
using Choices = std::vector<std::pair<std::string, TypePtr>>;

struct Type {
  enum class Kind { kOne, kPlus, kWith, kTensor, kLolli, kVar };
  Kind kind = Kind::kOne;
  Choices choices;       // kPlus / kWith, source order
  TypePtr left, right;   // kTensor / kLolli
  std::string name;      // kVar
  Span span;

  static TypePtr One();
  static TypePtr Plus(Choices c);
  static TypePtr With(Choices c);
  static TypePtr Tensor(TypePtr a, TypePtr b);
  static TypePtr Lolli(TypePtr a, TypePtr b);
  static TypePtr Var(std::string n);

  bool is_choice() const { return kind == Kind::kPlus || kind == Kind::kWith; }
  TypePtr branch(const std::string& label) const;  // nullptr if absent
};

std::string to_string(const TypePtr& t);
// Syntactic equality, no unfolding.
bool type_syntax_equal(const TypePtr& a, const TypePtr& b);

// ---- channels and process terms ----

// A channel reference. gen == kSource marks a source-level variable, any
// other value a runtime channel base_gen (extruded channels get renumbered,
// which can leave older generations negative). Identity ignores the
// annotation.
struct Chan {
  static constexpr int kSource = std::numeric_limits<int>::min();
  std::string name;
  int gen = kSource;
  SecPtr annot;  // optional x^c

  Chan() = default;
  Chan(std::string n, int g = kSource, SecPtr a = nullptr)
      : name(std::move(n)), gen(g), annot(std::move(a)) {}
  bool runtime() const { return gen != kSource; }
  Chan next() const { return Chan(name, gen + 1); }
  bool operator==(const Chan& o) const { return name == o.name && gen == o.gen; }
  bool operator!=(const Chan& o) const { return !(*this == o); }
  bool operator<(const Chan& o) const {
    return name != o.name ? name < o.name : gen < o.gen;
  }
};

std::string to_string(const Chan& c);

struct Term;
using TermPtr = std::shared_ptr<const Term>;
using Branches = std::vector<std::pair<std::string, TermPtr>>;

struct Term {
  enum class Kind {
    kSendLabel,  // chan.label; cont
    kCase,       // case chan { branches }
    kSendChan,   // send sent chan; cont
    kRecvChan,   // binder <- recv chan; cont
    kClose,      // close chan
    kWait,       // wait chan; cont
    kSpawn,      // binder <- proc[subst] <- (args); cont
    kFwd,        // fwd chan sent
    kTailCall,   // chan <- proc[subst] <- (args)
  };
  Kind kind = Kind::kClose;
  Chan chan;  // carrier / subject; fwd destination; tail-call target
  std::string label;
  Branches branches;
  Chan sent;  // kSendChan payload; kFwd source
  std::string binder;
  std::string proc;
  SecSubst subst;
  std::vector<Chan> args;
  TermPtr cont;
  std::string forwarder;  // kFwd: generated forwarder name when at a TVar
  Span span;

  const Term* branch(const std::string& l) const;
};

struct TermBuilder {
  static TermPtr SendLabel(Chan c, std::string label, TermPtr k, Span s = {});
  static TermPtr Case(Chan c, Branches b, Span s = {});
  static TermPtr SendChan(Chan sent, Chan carrier, TermPtr k, Span s = {});
  static TermPtr RecvChan(std::string binder, Chan carrier, TermPtr k, Span s = {});
  static TermPtr Close(Chan c, Span s = {});
  static TermPtr Wait(Chan c, TermPtr k, Span s = {});
  static TermPtr Spawn(std::string binder, std::string proc, SecSubst sub,
                       std::vector<Chan> args, TermPtr k, Span s = {});
  static TermPtr Fwd(Chan dst, Chan src, std::string forwarder = "", Span s = {});
  static TermPtr TailCall(Chan dst, std::string proc, SecSubst sub,
                          std::vector<Chan> args, Span s = {});
};

bool term_equal(const TermPtr& a, const TermPtr& b);
// Free channels in order of first occurrence.
std::vector<Chan> free_chans(const TermPtr& t);
// Capture-free renaming of free channels (keys compared by name and gen).
TermPtr rename(const TermPtr& t, const std::map<Chan, Chan>& m);
// Replaces secrecy variables in annotations and spawn substitutions.
TermPtr subst_sec(const TermPtr& t, const SecSubst& s);
bool has_tail_calls(const TermPtr& t);

// ---- signature ----

struct TypeDef {
  std::string name;
  TypePtr body;
  Span span;
};

struct CtxEntry {
  std::string var;
  TypePtr type;
  SecPtr sec;  // null in plain programs
  Span span;
};

struct ProcDef {
  std::string name;
  Theory theory;  // empty name for the empty theory
  std::vector<CtxEntry> context;
  SecPtr running;  // null in plain programs
  std::string offered;
  TypePtr offered_type;
  SecPtr offered_sec;
  TermPtr body;
  Span span;

  bool secured() const { return offered_sec != nullptr; }
};

struct Signature {
  bool has_lattice = false;
  SemilatticeSpec lattice;
  std::vector<Theory> theories;
  std::vector<TypeDef> types;
  std::vector<ProcDef> procs;
  std::map<std::string, ProcDef> forwarders;  // keyed by type name

  const TypeDef* find_type(const std::string& n) const;
  const ProcDef* find_proc(const std::string& n) const;  // includes forwarders
  const Theory* find_theory(const std::string& n) const;
};

bool signature_equal(const Signature& a, const Signature& b);

// ---- text format ----

Result<Signature> parse_signature(const std::string& text);
std::string print_type(const TypePtr& t);
std::string print_term(const TermPtr& t, int indent = 0);
std::string print_proc(const ProcDef& p);
std::string print_signature(const Signature& sig);

// ---- equi-recursive type utilities ----

std::vector<Diagnostic> check_contractive(const TypeDef& def,
                                          const Signature& sig);
TypePtr unfold(const TypePtr& t, const Signature& sig);
bool type_equal(const TypePtr& a, const TypePtr& b, const Signature& sig);

// ---- desugaring ----

std::string forwarder_name(const std::string& type_name);
// Tail calls become spawn + forward; forwards whose callee offers a type
// name point at the generated forwarder.
TermPtr desugar(const TermPtr& t, const Signature& sig);
// Same, but also tracks the offered type so user-written forwards are
// checked and annotated. Errors on forwards between unequal types.
Result<TermPtr> desugar_def(const ProcDef& def, const Signature& sig);

// Identity expansion of `dst <- src` at `type`. Type names met below the
// head become tail calls to their forwarders when `tail_leaves`, otherwise
// forwards annotated with the forwarder.
TermPtr identity_expansion(const TypePtr& type, const Chan& dst, const Chan& src,
                           const Signature& sig, bool tail_leaves);

// Drops lattice, theories, secrecy annotations and substitutions.
Signature erase(const Signature& sig);
ProcDef erase(const ProcDef& def);

}  // namespace slr
