// Command-line front end: check, run, equiv, ni and lattice subcommands.
//
// Exit codes: 0 accepted / related, 1 rejected / distinguished,
// 2 usage errors, unreadable input or inconclusive verdicts.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sessionlr/equiv.hpp"
#include "sessionlr/runtime.hpp"
#include "sessionlr/typecheck.hpp"

namespace {

using json = nlohmann::json;
using namespace slr;

constexpr int kOk = 0;
constexpr int kReject = 1;
constexpr int kUsage = 2;
constexpr const char* kSeedEnv = "SILL_SEED";

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Usage("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json diag_json(const Diagnostic& d) {
  json j{{"rule", d.rule},
         {"span", {{"line", d.span.line}, {"col", d.span.col}}},
         {"message", d.message}};
  if (!d.constraint.empty()) j["constraint"] = d.constraint;
  return j;
}

void print_diags(const std::vector<Diagnostic>& ds, bool as_json) {
  for (const auto& d : ds) {
    if (as_json)
      std::cout << diag_json(d).dump() << "\n";
    else
      std::cerr << to_string(d) << "\n";
  }
}

// Parses FILE; on syntax errors prints them and returns nullopt.
std::optional<Signature> load(const std::string& path, bool as_json) {
  auto r = parse_signature(read_file(path));
  if (!r.ok()) {
    print_diags(r.errors, as_json);
    return std::nullopt;
  }
  Signature sig = *r;
  install_forwarders(sig);
  return sig;
}

Semilattice lattice_of(const Signature& sig, bool as_json) {
  if (!sig.has_lattice) throw Usage("file declares no secrecy lattice");
  auto lat = validate_semilattice(sig.lattice);
  if (!lat.ok()) {
    print_diags(lat.errors, as_json);
    throw Usage("invalid secrecy lattice");
  }
  return *lat;
}

// "A|B|C" links A into B, the result into C.
Configuration build(const std::string& expr, const Signature& sig, bool inline_tail_calls = true) {
  RunContext rc{&sig, nullptr, inline_tail_calls};
  Configuration acc;
  bool first = true;
  std::stringstream ss(expr);
  for (std::string name; std::getline(ss, name, '|');) {
    if (!sig.find_proc(name)) throw Usage("unknown process " + name);
    Configuration c = init_config(name, rc);
    acc = first ? c : link(acc, c, sig);
    first = false;
  }
  if (first) throw Usage("empty configuration expression");
  return acc;
}

json verdict_json(const Verdict& v) {
  json j{{"verdict", to_string(v.kind)}, {"states", v.states}};
  if (v.distinguished())
    j["witness"] = {{"left", v.witness.left}, {"right", v.witness.right},
                    {"reason", v.witness.reason}};
  if (!v.bound.empty()) j["exhausted"] = v.bound;
  return j;
}

void print_verdict(const Verdict& v) {
  std::cout << to_string(v.kind) << " (" << v.states << " states)\n";
  if (v.distinguished()) {
    auto line = [](const std::vector<std::string>& xs) {
      std::string s;
      for (const auto& x : xs) s += (s.empty() ? "" : " ; ") + x;
      return s.empty() ? std::string("(nothing)") : s;
    };
    std::cout << "  left:  " << line(v.witness.left) << "\n"
              << "  right: " << line(v.witness.right) << "\n"
              << "  reason: " << v.witness.reason << "\n";
  } else if (!v.bound.empty()) {
    std::cout << "  exhausted bound: " << v.bound << "\n";
  }
}

int verdict_code(const Verdict& v) {
  return v.related() ? kOk : v.distinguished() ? kReject : kUsage;
}

Strategy parse_strategy(const std::string& s) {
  if (s == "confluent") return Strategy::kConfluent;
  if (s == "enumerate") return Strategy::kEnumerate;
  throw Usage("unknown strategy " + s);
}

int cmd_check(const std::string& file, bool ifc, bool as_json) {
  auto sig = load(file, as_json);
  if (!sig) return kReject;
  std::vector<Diagnostic> ds;
  if (ifc) {
    Semilattice lat = lattice_of(*sig, as_json);
    ds = check_signature_ifc(*sig, lat);
  } else {
    Signature plain = erase(*sig);
    install_forwarders(plain);
    ds = check_signature_structural(plain);
  }
  print_diags(ds, as_json);
  if (!as_json && ds.empty())
    std::cout << "ok: " << sig->procs.size() << " definitions" << (ifc ? " (ifc)" : "") << "\n";
  return ds.empty() ? kOk : kReject;
}

int cmd_run(const std::string& file, const std::string& main_proc, uint64_t seed, int max_steps,
            const std::string& trace_out, bool as_json) {
  auto sig = load(file, as_json);
  if (!sig) return kReject;
  Signature plain = erase(*sig);
  install_forwarders(plain);
  RunContext rc{&plain, nullptr, false};
  RunResult r = run(build(main_proc, plain, false), rc, seed, max_steps);
  json trace = json::array();
  for (const auto& e : r.trace) {
    json j{{"step", e.step}, {"rule", e.rule}, {"channel", to_string(e.channel)}};
    if (!e.label.empty()) j["label"] = e.label;
    if (!e.sent.empty()) j["sent"] = e.sent;
    trace.push_back(j);
  }
  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    if (!out) throw Usage("cannot write " + trace_out);
    out << trace.dump(2) << "\n";
  }
  auto msgs = interface_messages(r.config);
  bool quiescent = enabled_redexes(r.config).empty();
  if (as_json) {
    std::cout << json{{"steps", r.trace.size()}, {"quiescent", quiescent}, {"messages", msgs},
                      {"seed", seed}}
                     .dump()
              << "\n";
  } else {
    for (const auto& m : msgs) std::cout << m << "\n";
    if (!quiescent) std::cerr << "stopped after " << r.trace.size() << " steps\n";
  }
  return kOk;
}

int cmd_equiv(const std::string& file, const std::string& left, const std::string& right, int m,
              const Bounds& b, bool bisim, bool as_json) {
  auto sig = load(file, as_json);
  if (!sig) return kReject;
  Signature plain = erase(*sig);
  install_forwarders(plain);
  Configuration d1 = build(left, plain), d2 = build(right, plain);
  Verdict v = bisim ? weak_bisim(d1, d2, plain, b) : rslr_equiv(d1, d2, plain, m, b);
  if (as_json) {
    json j = verdict_json(v);
    j["check"] = bisim ? "weak_bisim" : "rslr";
    j["bounds"] = {{"m", m}, {"max_tau", b.max_tau}, {"max_states", b.max_states}};
    std::cout << j.dump() << "\n";
  } else {
    print_verdict(v);
  }
  return verdict_code(v);
}

int cmd_ni(const std::string& file, const std::string& proc, const std::string& observer, int m,
           int depth, const Bounds& b, bool as_json) {
  auto sig = load(file, as_json);
  if (!sig) return kReject;
  Semilattice lat = lattice_of(*sig, as_json);
  int xi = lat.index(observer);
  if (xi < 0) throw Usage("unknown level " + observer);
  if (!sig->find_proc(proc)) throw Usage("unknown process " + proc);
  NiResult r = ni_check_proc(*sig, lat, proc, xi, m, depth, b);
  if (as_json) {
    json j = verdict_json(r.verdict);
    j["pairs"] = r.pairs;
    if (r.verdict.distinguished()) j["environments"] = {r.env_left, r.env_right};
    j["bounds"] = {{"m", m}, {"depth", depth}, {"max_tau", b.max_tau}};
    std::cout << j.dump() << "\n";
  } else {
    print_verdict(r.verdict);
    if (r.verdict.distinguished())
      std::cout << "  environments: " << r.env_left << " vs " << r.env_right << "\n";
    std::cout << "  " << r.pairs << " environment pairs\n";
  }
  return verdict_code(r.verdict);
}

int cmd_lattice(const std::string& file, bool validate, bool as_json) {
  auto sig = load(file, as_json);
  if (!sig) return kReject;
  if (!sig->has_lattice) throw Usage("file declares no secrecy lattice");
  auto lat = validate_semilattice(sig->lattice);
  if (!lat.ok()) {
    print_diags(lat.errors, as_json);
    return kReject;
  }
  if (!validate) return kOk;
  const int n = lat->size();
  if (as_json) {
    json table = json::object();
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) table[lat->name(a)][lat->name(c)] = lat->name(lat->join(a, c));
    std::cout << json{{"elements", lat->elements()}, {"top", lat->name(lat->top())},
                      {"join", table}}
                     .dump()
              << "\n";
    return kOk;
  }
  size_t w = 4;
  for (const auto& e : lat->elements()) w = std::max(w, e.size() + 1);
  auto cell = [&](const std::string& s) { return s + std::string(w - s.size(), ' '); };
  std::cout << cell("join");
  for (int c = 0; c < n; ++c) std::cout << cell(lat->name(c));
  std::cout << "\n";
  for (int a = 0; a < n; ++a) {
    std::cout << cell(lat->name(a));
    for (int c = 0; c < n; ++c) std::cout << cell(lat->name(lat->join(a, c)));
    std::cout << "\n";
  }
  std::cout << "top: " << lat->name(lat->top()) << "\n";
  return kOk;
}

uint64_t default_seed() {
  const char* s = std::getenv(kSeedEnv);
  if (!s) return 0;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Usage(std::string(kSeedEnv) + " is not a number");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checker and interpreter for secrecy-typed session programs"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  std::string file, main_proc, trace_out, left, right, proc, observer, strategy = "confluent";
  bool ifc = false, validate = false, bisim = false;
  int max_steps = 1000, m = 2, depth = 1;
  uint64_t seed = 0;
  Bounds bounds;

  auto* check = app.add_subcommand("check", "Type-check a file");
  check->add_option("file", file)->required();
  check->add_flag("--ifc", ifc, "Check secrecy annotations too");
  check->add_flag("--json", as_json);

  auto* runc = app.add_subcommand("run", "Run a closed process");
  runc->add_option("file", file)->required();
  runc->add_option("--main", main_proc, "Process, or A|B to link A into B")->required();
  auto* seed_opt = runc->add_option("--seed", seed, "Scheduler seed (default from SILL_SEED)");
  runc->add_option("--max-steps", max_steps)->check(CLI::NonNegativeNumber);
  runc->add_option("--trace", trace_out, "Write the trace as JSON");
  runc->add_flag("--json", as_json);

  auto add_bounds = [&](CLI::App* c) {
    c->add_option("--max-tau", bounds.max_tau, "Internal steps per observation")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--max-states", bounds.max_states)->check(CLI::NonNegativeNumber);
    c->add_option("--strategy", strategy, "confluent or enumerate");
    c->add_flag("--json", as_json);
  };
  auto* eq = app.add_subcommand("equiv", "Compare two configurations");
  eq->add_option("file", file)->required();
  eq->add_option("--left", left, "Process, or A|B to link A into B")->required();
  eq->add_option("--right", right)->required();
  eq->add_option("--m", m, "Observation index")->check(CLI::NonNegativeNumber);
  eq->add_flag("--bisim", bisim, "Weak bisimilarity instead of the logical relation");
  add_bounds(eq);

  auto* ni = app.add_subcommand("ni", "Noninterference self-check");
  ni->add_option("file", file)->required();
  ni->add_option("--proc", proc)->required();
  ni->add_option("--observer", observer)->required();
  ni->add_option("--m", m)->check(CLI::NonNegativeNumber);
  ni->add_option("--depth", depth)->check(CLI::NonNegativeNumber);
  add_bounds(ni);

  auto* lat = app.add_subcommand("lattice", "Validate the secrecy lattice");
  lat->add_option("file", file)->required();
  lat->add_flag("--validate", validate, "Print the join table");
  lat->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    bounds.strategy = parse_strategy(strategy);
    if (*check) return cmd_check(file, ifc, as_json);
    if (*runc) {
      if (!*seed_opt) seed = default_seed();
      return cmd_run(file, main_proc, seed, max_steps, trace_out, as_json);
    }
    if (*eq) return cmd_equiv(file, left, right, m, bounds, bisim, as_json);
    if (*ni) return cmd_ni(file, proc, observer, m, depth, bounds, as_json);
    if (*lat) return cmd_lattice(file, validate, as_json);
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const slr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
