#pragma once

#include <map>
#include <string>
#include <vector>

#include "sessionlr/config.hpp"
#include "sessionlr/lattice.hpp"
#include "sessionlr/syntax.hpp"

namespace slr {

struct CtxItem {
  TypePtr type;
  SecPtr sec;  // maximal secrecy; null in structural mode
};
using LinCtx = std::map<Chan, CtxItem>;

struct Offer {
  Chan chan;
  TypePtr type;
  SecPtr sec;
};

struct Judgment {
  Theory theory;
  LinCtx ctx;
  TermPtr term;
  SecPtr running;
  Offer offered;
};

struct Derivation {
  std::string rule;
  Span span;
  std::vector<Derivation> premises;

  size_t size() const;
};

Result<Derivation> check_proc_structural(const LinCtx& ctx, const TermPtr& term,
                                         const Offer& offered, const Signature& sig);
std::vector<Diagnostic> check_signature_structural(const Signature& sig);

Result<Derivation> check_proc_ifc(const Judgment& j, const Signature& sig,
                                  const Semilattice& lat);
std::vector<Diagnostic> check_signature_ifc(const Signature& sig,
                                            const Semilattice& lat);

// z:Y |- F_Y :: y:Y by identity expansion; recursive occurrences are tail
// calls to the forwarder of the referenced type.
ProcDef gen_forwarder(const std::string& type_name, const Signature& sig);
void install_forwarders(Signature& sig);

// Context and offered interface of a process definition at its own names.
LinCtx def_context(const ProcDef& def, bool ifc);
Offer def_offer(const ProcDef& def, bool ifc);

// Delta_0 |- config :: Delta. With `lat` non-null the secrecy premises of the
// secured rules are checked too.
std::vector<Diagnostic> check_config(const std::vector<ChanDecl>& provided,
                                     const Configuration& config,
                                     const std::vector<ChanDecl>& offered,
                                     const Signature& sig,
                                     const Semilattice* lat = nullptr);
// Checks against the configuration's own recorded interface.
std::vector<Diagnostic> check_config(const Configuration& config, const Signature& sig,
                                     const Semilattice* lat = nullptr);

}  // namespace slr
