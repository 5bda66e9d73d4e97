#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "sessionlr/equiv.hpp"
#include "sessionlr/runtime.hpp"
#include "sessionlr/typecheck.hpp"

namespace py = pybind11;

namespace slr {
namespace {

Signature parse_or_throw(const std::string& src) {
  auto r = parse_signature(src);
  if (!r.ok()) throw py::value_error(to_string(r.errors.front()));
  Signature sig = *r;
  install_forwarders(sig);
  return sig;
}

Signature plain_of(const Signature& sig) {
  Signature p = erase(sig);
  install_forwarders(p);
  return p;
}

Semilattice lattice_of(const Signature& sig) {
  auto r = validate_semilattice(sig.lattice);
  if (!r.ok()) throw py::value_error("invalid secrecy lattice");
  return *r;
}

// "A|B" links A into B.
Configuration build(const std::string& expr, const Signature& sig, bool inline_tail_calls) {
  RunContext rc{&sig, nullptr, inline_tail_calls};
  std::optional<Configuration> acc;
  std::stringstream ss(expr);
  for (std::string name; std::getline(ss, name, '|');) {
    if (!sig.find_proc(name)) throw py::key_error("unknown process " + name);
    Configuration c = init_config(name, rc);
    acc = acc ? link(*acc, c, sig) : c;
  }
  if (!acc) throw py::value_error("empty configuration expression");
  return *acc;
}

py::dict diag_dict(const Diagnostic& d) {
  py::dict o;
  o["line"] = d.span.line;
  o["col"] = d.span.col;
  o["rule"] = d.rule;
  o["message"] = d.message;
  o["constraint"] = d.constraint;
  return o;
}

std::vector<py::dict> check(const std::string& src, bool ifc) {
  auto r = parse_signature(src);
  std::vector<py::dict> out;
  if (!r.ok()) {
    for (const auto& d : r.errors) out.push_back(diag_dict(d));
    return out;
  }
  Signature sig = *r;
  install_forwarders(sig);
  auto ds = ifc ? check_signature_ifc(sig, lattice_of(sig))
                : check_signature_structural(plain_of(sig));
  for (const auto& d : ds) out.push_back(diag_dict(d));
  return out;
}

py::dict run_main(const std::string& src, const std::string& main, uint64_t seed, int max_steps) {
  Signature plain = plain_of(parse_or_throw(src));
  RunContext rc{&plain, nullptr, false};
  RunResult r = run(build(main, plain, false), rc, seed, max_steps);
  py::dict o;
  o["steps"] = r.trace.size();
  o["quiescent"] = enabled_redexes(r.config).empty();
  o["messages"] = interface_messages(r.config);
  std::vector<std::string> rules;
  for (const auto& e : r.trace) rules.push_back(e.rule);
  o["rules"] = rules;
  return o;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict o;
  o["verdict"] = to_string(v.kind);
  o["states"] = v.states;
  o["left"] = v.witness.left;
  o["right"] = v.witness.right;
  o["reason"] = v.witness.reason;
  o["bound"] = v.bound;
  return o;
}

Bounds bounds_of(int max_tau, int max_states, const std::string& strategy) {
  Bounds b;
  b.max_tau = max_tau;
  b.max_states = max_states;
  if (strategy == "enumerate") b.strategy = Strategy::kEnumerate;
  else if (strategy != "confluent") throw py::value_error("strategy is confluent or enumerate");
  return b;
}

py::dict equiv(const std::string& src, const std::string& left, const std::string& right, int m,
               bool bisim, int max_tau, int max_states, const std::string& strategy) {
  Signature plain = plain_of(parse_or_throw(src));
  Configuration d1 = build(left, plain, true), d2 = build(right, plain, true);
  Bounds b = bounds_of(max_tau, max_states, strategy);
  try {
    return verdict_dict(bisim ? weak_bisim(d1, d2, plain, b) : rslr_equiv(d1, d2, plain, m, b));
  } catch (const Error& e) {
    throw py::value_error(e.what());
  }
}

py::dict ni(const std::string& src, const std::string& proc, const std::string& observer, int m,
            int depth) {
  Signature sig = parse_or_throw(src);
  Semilattice lat = lattice_of(sig);
  int obs = lat.index(observer);
  if (obs < 0) throw py::key_error("unknown secrecy level " + observer);
  NiResult r;
  try {
    r = ni_check_proc(sig, lat, proc, obs, m, depth);
  } catch (const Error& e) {
    throw py::value_error(e.what());
  }
  py::dict o = verdict_dict(r.verdict);
  o["pairs"] = r.pairs;
  o["env_left"] = r.env_left;
  o["env_right"] = r.env_right;
  return o;
}

std::string join(const std::string& src, const std::string& a, const std::string& b) {
  Semilattice lat = lattice_of(parse_or_throw(src));
  int ia = lat.index(a), ib = lat.index(b);
  if (ia < 0 || ib < 0) throw py::key_error("unknown secrecy level");
  return lat.name(lat.join(ia, ib));
}

}  // namespace
}  // namespace slr

PYBIND11_MODULE(_core, m) {
  m.doc() = "Checker and interpreter for secrecy-typed session programs";
  m.def("check", &slr::check, py::arg("source"), py::arg("ifc") = false,
        "Diagnostics of a source text; empty when it checks");
  m.def("run", &slr::run_main, py::arg("source"), py::arg("main"), py::arg("seed") = 0,
        py::arg("max_steps") = 10000);
  m.def("equiv", &slr::equiv, py::arg("source"), py::arg("left"), py::arg("right"),
        py::arg("m") = 3, py::arg("bisim") = false, py::arg("max_tau") = 64,
        py::arg("max_states") = 20000, py::arg("strategy") = "confluent");
  m.def("ni", &slr::ni, py::arg("source"), py::arg("proc"), py::arg("observer"),
        py::arg("m") = 3, py::arg("depth") = 2);
  m.def("join", &slr::join, py::arg("source"), py::arg("a"), py::arg("b"));
}
