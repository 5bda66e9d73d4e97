#include <string>

#include "internal.hpp"
#include "sessionlr/runtime.hpp"

namespace slr {
namespace {

Configuration plug(const Configuration& d, const HighEnv& env, const Signature& sig) {
  Configuration c = d;
  for (const Node& n : env.providers.nodes) {
    Configuration one;
    one.nodes.push_back(n);
    one.next_fresh = env.providers.next_fresh;
    c = link(one, c, sig);
  }
  if (!env.client.nodes.empty()) c = link(c, env.client, sig);
  return c;
}

}  // namespace

NiResult ni_check(const Configuration& d1, const Configuration& d2, const SecInterface& s1,
                  const SecInterface& s2, const Signature& sig, const Semilattice& lat, int m,
                  int depth, const Bounds& b) {
  Interface p1 = project_context(s1, lat), p2 = project_context(s2, lat);
  if (s1.observer != s2.observer || !interface_equal(p1, p2, sig))
    throw Error("ni_check: projections differ: " + to_string(p1) + " vs " + to_string(p2));
  Signature g = sig;
  auto envs1 = gen_high_envs(s1, lat, depth, g);
  auto envs2 = gen_high_envs(s2, lat, depth, g);
  NiResult res;
  for (const auto& e1 : envs1) {
    Configuration c1 = plug(d1, e1, g);
    for (const auto& e2 : envs2) {
      Configuration c2 = plug(d2, e2, g);
      Verdict v = rslr_equiv(c1, c2, g, m, b);
      ++res.pairs;
      res.verdict.states += v.states;
      if (v.distinguished()) {
        v.states = res.verdict.states;
        res.verdict = v;
        res.env_left = e1.name;
        res.env_right = e2.name;
        return res;
      }
      if (v.kind == Verdict::Kind::kInconclusive && res.verdict.related()) {
        res.verdict.kind = v.kind;
        res.verdict.bound = v.bound;
      }
    }
  }
  return res;
}

NiResult ni_check_proc(const Signature& sig, const Semilattice& lat, const std::string& proc,
                       int observer, int m, int depth, const Bounds& b) {
  const ProcDef* def = sig.find_proc(proc);
  if (!def) throw Error("unknown process " + proc);
  if (!def->secured()) throw Error(proc + " has no secrecy annotations");
  Signature plain = erase(sig);
  Configuration d = init_config(proc, detail::equiv_ctx(plain));
  std::vector<Valuation> vals{{}};
  if (!def->theory.vars.empty()) vals = models(def->theory, lat);
  NiResult res;
  for (const auto& val : vals) {
    SecInterface s;
    s.observer = observer;
    for (const auto& e : def->context)
      s.ctx.push_back({Chan(e.var, 0), e.type, join_eval(e.sec, val, lat)});
    s.offered = {Chan(def->offered, 0), def->offered_type, join_eval(def->offered_sec, val, lat)};
    NiResult r = ni_check(d, d, s, s, plain, lat, m, depth, b);
    res.pairs += r.pairs;
    res.verdict.states += r.verdict.states;
    if (r.verdict.distinguished()) {
      r.pairs = res.pairs;
      r.verdict.states = res.verdict.states;
      return r;
    }
    if (r.verdict.kind == Verdict::Kind::kInconclusive && res.verdict.related()) {
      res.verdict.kind = r.verdict.kind;
      res.verdict.bound = r.verdict.bound;
    }
  }
  return res;
}

}  // namespace slr
