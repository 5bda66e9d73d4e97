#include "criteria.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>

#include "gen.hpp"
#include "json.hpp"
#include "oracle.hpp"
#include "testing.hpp"

namespace slr::testing {
namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunContext plain_ctx(const Signature& sig) { return RunContext{&sig, nullptr, false}; }

bool has(const std::string& s, const std::string& sub) { return s.find(sub) != std::string::npos; }

const char* kind_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::kRelated:
      return "R";
    case Verdict::Kind::kDistinguished:
      return "D";
    default:
      return "?";
  }
}

}  // namespace

Bounds enumerate_bounds() {
  Bounds b;
  b.strategy = Strategy::kEnumerate;
  b.max_tau = 4096;
  b.max_states = 200000;
  return b;
}

CorpusConfigs::CorpusConfigs() : files_(corpus_files()) {
  for (const auto& f : files_) plain_.push_back(load_plain(f));
}

const Signature& CorpusConfigs::plain(const std::string& file) const {
  for (size_t i = 0; i < files_.size(); ++i)
    if (files_[i] == file) return plain_[i];
  throw Error("no corpus file " + file);
}

Configuration xx_link(const Signature& plain, const std::string& xx, const std::string& token) {
  return link(closed(plain, xx), closed(plain, token), plain);
}

std::vector<NamedConfig> CorpusConfigs::closed_procs() const {
  std::vector<NamedConfig> out;
  for (size_t i = 0; i < files_.size(); ++i)
    for (const auto& p : plain_[i].procs)
      out.push_back({files_[i] + ":" + p.name, &plain_[i], closed(plain_[i], p.name)});
  return out;
}

std::vector<NamedConfig> CorpusConfigs::terminating() const {
  std::vector<NamedConfig> out;
  for (size_t i = 0; i < files_.size(); ++i) {
    const Signature& sig = plain_[i];
    RunContext rc = plain_ctx(sig);
    for (const auto& p : sig.procs) {
      Configuration c = init_config(p.name, rc);
      if (enabled_redexes(run(c, rc, 0, 2000).config).empty())
        out.push_back({files_[i] + ":" + p.name, &sig, c});
    }
  }
  for (const char* xx : {"XX", "XXzero"}) {
    const Signature& sig = plain(std::string(xx) == "XX" ? "xx.sill" : "xx_zero.sill");
    for (const char* t : {"T1", "T2"}) {
      RunContext rc = plain_ctx(sig);
      Configuration c = link(init_config(xx, rc), init_config(t, rc), sig);
      out.push_back({std::string(xx) + "|" + t, &sig, c});
    }
  }
  return out;
}

json manifest() {
  return json::parse(read_file(corpus_path("manifest.json")));
}

Outcome corpus_checks() {
  json man = manifest();
  auto t0 = Clock::now();
  int bad = 0, ifc = 0, files = 0;
  for (const auto& f : corpus_files()) {
    const json& e = man.at(f);
    Signature sig = load(f);
    if (e.at("ifc") == "accept") {
      ++ifc;
      bad += !check_signature_ifc(sig, lattice(sig)).empty();
    }
    ++files;
    bool ok = check_signature_structural(load_plain(f)).empty();
    bad += ok != (e.at("structural") == "accept");
  }
  double secs = since(t0);
  return {bad == 0 && ifc >= 2 && secs < kCheckSeconds,
          fmt("%d mismatches over %d secured files (ifc) and %d erased files, %.3fs", bad, ifc,
              files, secs)};
}

Outcome rejections(const std::string& sill) {
  json man = manifest();
  int rejected = 0, expected = 0, diag_bad = 0;
  std::string codes;
  bool exits = true;
  for (const auto& f : corpus_files()) {
    const json& e = man.at(f);
    if (e.at("ifc") != "reject") continue;
    ++expected;
    Signature sig = load(f);
    auto ds = check_signature_ifc(sig, lattice(sig));
    rejected += !ds.empty();
    if (e.contains("diagnostics")) {
      const json& want = e["diagnostics"];
      if (want.size() != ds.size()) {
        ++diag_bad;
      } else {
        for (size_t i = 0; i < ds.size(); ++i) {
          const json& w = want[i];
          diag_bad += ds[i].span.line != w.at("line").get<int>() || ds[i].rule != w.at("rule") ||
                      !has(ds[i].message, w.at("message")) ||
                      ds[i].constraint != w.at("constraint");
        }
      }
    }
    if (!sill.empty()) {
      std::string cmd = "\"" + sill + "\" check --ifc \"" + corpus_path(f) + "\" > /dev/null 2>&1";
      int st = std::system(cmd.c_str());
      int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
      codes += fmt(" %s=%d", f.c_str(), code);
      exits = exits && code == 1;
    }
  }
  if (sill.empty()) codes = " (cli not run)";
  return {rejected == expected && expected >= 3 && diag_bad == 0 && exits,
          fmt("%d/%d expected rejections, %d diagnostic mismatches, exit codes:", rejected,
              expected, diag_bad) +
              codes};
}

Outcome preservation() {
  int steps = 0, violations = 0;
  std::mt19937_64 pick(7);
  auto drive = [&](const Signature& sig, const Semilattice* lat, Configuration c, int n) {
    RunContext rc{&sig, lat, false};
    for (int i = 0; i < n; ++i) {
      auto en = enabled_redexes(c);
      if (en.empty()) return;
      c = step(c, en[pick() % en.size()], rc);
      ++steps;
      if (!check_config(c, sig, lat).empty()) ++violations;
    }
  };
  Signature bank = load("bank.sill");
  Semilattice lat = lattice(bank);
  for (int r = 0; r < 4; ++r)
    drive(bank, &lat, init_config("BankMain", RunContext{&bank, &lat, false}), 250);
  Signature plain = load_plain("bank.sill");
  drive(plain, nullptr, init_config("BankMain", plain_ctx(plain)), 200);
  Signature xx = load_plain("xx.sill");
  for (const char* t : {"T1", "T2"}) drive(xx, nullptr, xx_link(xx, "XX", t), 50);
  return {steps >= kPreservationSteps && violations == 0,
          fmt("%d random steps, %d ill-typed configurations", steps, violations)};
}

Outcome confluence() {
  CorpusConfigs cc;
  auto configs = cc.terminating();
  int diverging = 0, stuck = 0;
  for (const auto& nc : configs) {
    RunContext rc = plain_ctx(*nc.sig);
    std::vector<std::string> first;
    for (int seed = 0; seed < kConfluenceSeeds; ++seed) {
      RunResult r = run(nc.config, rc, seed, 5000);
      if (!enabled_redexes(r.config).empty()) {
        ++stuck;
        break;
      }
      auto msgs = interface_messages(r.config);
      if (seed == 0) first = msgs;
      else if (msgs != first) {
        ++diverging;
        break;
      }
    }
  }
  return {diverging == 0 && stuck == 0 && configs.size() >= 4,
          fmt("%zu configurations x %d seeds, %d with differing messages, %d not quiescent",
              configs.size(), kConfluenceSeeds, diverging, stuck)};
}

Outcome xx_distinguished() {
  Signature xx = load_plain("xx.sill");
  Signature zero = load_plain("xx_zero.sill");
  Configuration a = xx_link(xx, "XX", "T1"), b = xx_link(xx, "XX", "T2");
  Configuration za = xx_link(zero, "XXzero", "T1"), zb = xx_link(zero, "XXzero", "T2");
  bool ok = true;
  double worst = 0;
  auto timed = [&](auto f) {
    auto t0 = Clock::now();
    Verdict v = f();
    worst = std::max(worst, since(t0));
    return v;
  };
  auto zero_one = [](const Verdict& v) {
    auto has_label = [](const std::vector<std::string>& ls, const char* l) {
      for (const auto& s : ls)
        if (has(s, l)) return true;
      return false;
    };
    return v.distinguished() && has_label(v.witness.left, "zero") &&
           has_label(v.witness.right, "one");
  };
  std::string verdicts;
  for (Bounds bd : {Bounds{}, enumerate_bounds()}) {
    Verdict bis = timed([&] { return weak_bisim(a, b, xx, bd); });
    Verdict rs = timed([&] { return rslr_equiv(a, b, xx, 2, bd); });
    Verdict zbis = timed([&] { return weak_bisim(za, zb, zero, bd); });
    Verdict zrs = timed([&] { return rslr_equiv(za, zb, zero, 2, bd); });
    // the enumerating game may answer with "no matching move" for T2
    bool bis_ok = bd.strategy == Strategy::kConfluent ? zero_one(bis) : bis.distinguished();
    ok = ok && bis_ok && zero_one(rs) && zbis.related() && zrs.related();
    verdicts += fmt(" %s:%s%s%s%s", bd.strategy == Strategy::kConfluent ? "confluent" : "enumerate",
                    kind_name(bis.kind), kind_name(rs.kind), kind_name(zbis.kind),
                    kind_name(zrs.kind));
  }
  return {ok && worst < kXXSeconds,
          "bisim/rslr2 on XX then XX-zero" + verdicts + fmt(", slowest %.3fs", worst)};
}

Outcome adequacy() {
  auto pairs = adequacy_pairs(7, kAdequacyPairs);
  int agree = 0, total = 0, related = 0, inconclusive = 0;
  for (const auto& g : pairs) {
    for (Bounds bd : {Bounds{}, enumerate_bounds()}) {
      ++total;
      Verdict bis = weak_bisim(g.d1, g.d2, g.sig, bd);
      bool all = true, unknown = bis.kind == Verdict::Kind::kInconclusive;
      for (int m = 0; m <= kAdequacyMaxM; ++m) {
        Verdict v = rslr_equiv(g.d1, g.d2, g.sig, m, bd);
        unknown = unknown || v.kind == Verdict::Kind::kInconclusive;
        all = all && v.related();
      }
      inconclusive += unknown;
      agree += !unknown && all == bis.related();
      related += bd.strategy == Strategy::kConfluent && bis.related();
    }
  }
  return {agree == total && static_cast<int>(pairs.size()) >= 50,
          fmt("%d/%d agree over %zu pairs and both strategies (%d related, %d inconclusive)", agree,
              total, pairs.size(), related, inconclusive)};
}

Outcome per_laws() {
  CorpusConfigs cc;
  auto procs = cc.closed_procs();
  int reflexive = 0, tried = 0;
  for (const auto& nc : procs) {
    if (tried == kReflexiveConfigs) break;
    ++tried;
    reflexive += rslr_equiv(nc.config, nc.config, *nc.sig, 3).related() &&
                 weak_bisim(nc.config, nc.config, *nc.sig).related();
  }
  // symmetry and transitivity for weak bisimilarity and for the logical
  // relation at each index
  auto relations = [](const Configuration& x, const Configuration& y, const Signature& sig) {
    std::vector<Verdict::Kind> out{weak_bisim(x, y, sig).kind};
    for (int m = 1; m <= 3; ++m) out.push_back(rslr_equiv(x, y, sig, m).kind);
    return out;
  };
  int sym_bad = 0, related_pairs = 0, unknown = 0;
  for (const auto& g : adequacy_pairs(11, 40)) {
    auto ab = relations(g.d1, g.d2, g.sig), ba = relations(g.d2, g.d1, g.sig);
    for (size_t r = 0; r < ab.size(); ++r) {
      unknown += ab[r] == Verdict::Kind::kInconclusive;
      if (ab[r] != Verdict::Kind::kRelated) continue;
      ++related_pairs;
      sym_bad += ba[r] != Verdict::Kind::kRelated;
    }
  }
  int trans_bad = 0, chains = 0;
  for (const auto& t : per_triples(13, 40)) {
    auto ab = relations(t.d1, t.d2, t.sig), bc = relations(t.d2, t.d3, t.sig);
    auto ac = relations(t.d1, t.d3, t.sig);
    for (size_t r = 0; r < ab.size(); ++r) {
      if (ab[r] != Verdict::Kind::kRelated || bc[r] != Verdict::Kind::kRelated) continue;
      ++chains;
      trans_bad += ac[r] != Verdict::Kind::kRelated;
    }
  }
  return {tried == kReflexiveConfigs && reflexive == tried && sym_bad == 0 && trans_bad == 0 &&
              unknown == 0 && related_pairs >= 40 && chains >= 40,
          fmt("reflexive %d/%d, symmetry failures %d/%d related pairs, transitivity failures "
              "%d/%d chains, %d inconclusive",
              reflexive, tried, sym_bad, related_pairs, trans_bad, chains, unknown)};
}

namespace {

// Distinct generated providers of `type` at depths 1 and 2, rooted at z.
std::vector<Configuration> high_providers(const std::string& type, Signature& scratch,
                                          const Semilattice& lat) {
  std::vector<Configuration> out;
  std::set<std::string> seen;
  for (int depth : {1, 2}) {
    SecInterface s;
    s.ctx.push_back({Chan("z", 0), Type::Var(type), lat.top()});
    s.observer = lat.index("guest");
    s.offered = {Chan("w", 0), Type::One(), s.observer};
    for (const auto& env : gen_high_envs(s, lat, depth, scratch)) {
      std::string key = to_string(canonicalize(env.providers));
      if (seen.insert(key).second) out.push_back(env.providers);
    }
  }
  // Types like &{a: 1, b: 1} have a single terminating provider; the one
  // that never answers is a provider too.
  ProcDef silent;
  silent.name = "Silent_" + type;
  silent.offered = "z";
  silent.offered_type = Type::Var(type);
  silent.body = TermBuilder::TailCall(Chan("z"), silent.name, {}, {});
  scratch.procs.push_back(silent);
  out.push_back(init_config(silent.name, RunContext{&scratch, nullptr, true}));
  return out;
}

}  // namespace

Outcome forwarder_identity() {
  int types = 0, checked = 0, failed = 0, thin = 0;
  std::string first_fail;
  for (const auto& f : corpus_files()) {
    Signature secured = load(f);
    Semilattice lat = lattice(secured);
    Signature sig = load_plain(f);
    for (const auto& td : secured.types) {
      ++types;
      Signature scratch = sig;
      auto providers = high_providers(td.name, scratch, lat);
      if (providers.size() < 2) ++thin;
      RunContext rc{&scratch, nullptr, true};
      Configuration fwd = init_config(forwarder_name(td.name), rc);
      for (const auto& p : providers) {
        ++checked;
        Configuration linked = link(p, fwd, scratch);
        Configuration direct = rename_base(p, "z", "y");
        bool ok = rslr_equiv(linked, direct, scratch, 3).related() &&
                  weak_bisim(linked, direct, scratch).related();
        if (!ok && first_fail.empty()) first_fail = " first failure " + f + ":" + td.name;
        failed += !ok;
      }
    }
  }
  return {failed == 0 && thin == 0 && types > 0,
          fmt("%d corpus types, %d providers, %d not equivalent, %d types with <2 providers", types,
              checked, failed, thin) +
              first_fail};
}

Outcome ftlr() {
  int related = 0, runs = 0, other = 0;
  std::string first_bad;
  for (const char* f : {"bank.sill", "verifier.sill"}) {
    Signature sig = load(f);
    Semilattice lat = lattice(sig);
    for (const auto& p : sig.procs) {
      if (!p.secured()) continue;
      for (const char* obs : {"guest", "alice"})
        for (int m = 1; m <= 3; ++m)
          for (int depth = 1; depth <= 2; ++depth) {
            ++runs;
            auto r = ni_check_proc(sig, lat, p.name, lat.index(obs), m, depth);
            if (r.verdict.related()) ++related;
            else if (first_bad.empty())
              first_bad = fmt(" first failure %s@%s m=%d depth=%d: %s", p.name.c_str(), obs, m,
                              depth, to_string(r.verdict.kind).c_str());
          }
    }
  }
  int caught = 0;
  {
    Signature sig = load("sneaky.sill");
    Semilattice lat = lattice(sig);
    caught += ni_check_proc(sig, lat, "SneakyVerifier", lat.index("guest"), 3, 2)
                  .verdict.distinguished();
  }
  {
    Signature sig = load("xx.sill");
    Semilattice lat = lattice(sig);
    caught += ni_check_proc(sig, lat, "XX", lat.index("guest"), 3, 2).verdict.distinguished();
  }
  other = runs - related;
  return {other == 0 && caught == 2 && runs > 0,
          fmt("%d/%d accepted runs related, %d/2 rejected definitions distinguished", related, runs,
              caught) +
              first_bad};
}

Outcome lattice_checks() {
  auto lat = validate_semilattice({{{"bank"}, {"alice", "bob"}, {"guest"}}, {}});
  if (!lat.ok()) return {false, "banking lattice rejected"};
  BankOracle o;
  std::mt19937_64 rng(2024);
  int agree = 0;
  for (int q = 0; q < kEntailmentQueries; ++q) {
    Theory th;
    int nv = rng() % 4;
    for (int i = 0; i < nv; ++i) th.vars.push_back("v" + std::to_string(i));
    int nh = rng() % 4;
    for (int i = 0; i < nh; ++i)
      th.hyps.push_back({random_sec_term(rng, th.vars), random_sec_term(rng, th.vars)});
    Constraint goal{random_sec_term(rng, th.vars), random_sec_term(rng, th.vars)};
    agree += entails(th, *lat, goal) == o.entails(th, goal);
  }
  int rejected = 0;
  for (const SemilatticeSpec& bad :
       {SemilatticeSpec{{{"a", "b"}}, {}}, SemilatticeSpec{{{"top"}, {"c", "d"}, {"a", "b"}}, {}},
        SemilatticeSpec{{{"top"}, {"a", "b"}}, {{"a", "b"}, {"b", "a"}}}})
    rejected += !validate_semilattice(bad).ok();
  return {agree == kEntailmentQueries && rejected == 3,
          fmt("%d/%d entailment queries agree with brute force, %d/3 invalid specs rejected", agree,
              kEntailmentQueries, rejected)};
}

}  // namespace slr::testing
