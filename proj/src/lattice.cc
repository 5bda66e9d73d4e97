#include "sessionlr/lattice.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace slr {

std::string to_string(const Diagnostic& d) {
  std::string s = std::to_string(d.span.line) + ":" +
                  std::to_string(d.span.col) + ": [" + d.rule + "] " +
                  d.message;
  if (!d.constraint.empty()) s += " (" + d.constraint + ")";
  return s;
}

SecPtr SecTerm::Const(std::string n) {
  auto t = std::make_shared<SecTerm>();
  t->kind = Kind::kConst;
  t->name = std::move(n);
  return t;
}

SecPtr SecTerm::Var(std::string n) {
  auto t = std::make_shared<SecTerm>();
  t->kind = Kind::kVar;
  t->name = std::move(n);
  return t;
}

SecPtr SecTerm::Join(SecPtr a, SecPtr b) {
  auto t = std::make_shared<SecTerm>();
  t->kind = Kind::kJoin;
  t->lhs = std::move(a);
  t->rhs = std::move(b);
  return t;
}

std::string to_string(const SecTerm& t) {
  switch (t.kind) {
    case SecTerm::Kind::kConst:
    case SecTerm::Kind::kVar:
      return t.name;
    case SecTerm::Kind::kJoin:
      return to_string(*t.lhs) + " | " + to_string(*t.rhs);
  }
  return "?";
}

std::string to_string(const SecPtr& t) { return t ? to_string(*t) : "<none>"; }

bool sec_equal(const SecPtr& a, const SecPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->kind == SecTerm::Kind::kJoin)
    return sec_equal(a->lhs, b->lhs) && sec_equal(a->rhs, b->rhs);
  return a->name == b->name;
}

void collect_vars(const SecPtr& t, std::vector<std::string>& out) {
  if (!t) return;
  if (t->kind == SecTerm::Kind::kVar) {
    if (std::find(out.begin(), out.end(), t->name) == out.end())
      out.push_back(t->name);
  } else if (t->kind == SecTerm::Kind::kJoin) {
    collect_vars(t->lhs, out);
    collect_vars(t->rhs, out);
  }
}

std::string to_string(const Constraint& c) {
  return to_string(c.lo) + " <= " + to_string(c.hi);
}

bool Theory::has_var(const std::string& v) const {
  return std::find(vars.begin(), vars.end(), v) != vars.end();
}

Semilattice::Semilattice(std::vector<std::string> elems,
                         std::vector<std::vector<char>> le,
                         std::vector<std::vector<int>> join, int top)
    : elems_(std::move(elems)),
      le_(std::move(le)),
      join_(std::move(join)),
      top_(top) {}

int Semilattice::index(const std::string& n) const {
  for (size_t i = 0; i < elems_.size(); ++i)
    if (elems_[i] == n) return static_cast<int>(i);
  return -1;
}

Result<Semilattice> validate_semilattice(const SemilatticeSpec& spec) {
  Result<Semilattice> res;
  std::vector<std::string> names;
  auto idx = [&](const std::string& n) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it != names.end()) return static_cast<int>(it - names.begin());
    names.push_back(n);
    return static_cast<int>(names.size() - 1);
  };
  std::vector<std::pair<int, int>> edges;
  for (size_t r = 0; r < spec.rows.size(); ++r) {
    for (const auto& n : spec.rows[r]) idx(n);
    if (r + 1 < spec.rows.size())
      for (const auto& hi : spec.rows[r])
        for (const auto& lo : spec.rows[r + 1]) edges.push_back({idx(lo), idx(hi)});
  }
  for (const auto& [lo, hi] : spec.leq) edges.push_back({idx(lo), idx(hi)});

  const int n = static_cast<int>(names.size());
  if (n == 0) {
    res.errors.push_back({{}, "lattice", "empty security lattice", ""});
    return res;
  }
  std::vector<std::vector<char>> le(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) le[i][i] = 1;
  for (auto [a, b] : edges) le[a][b] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (le[i][k])
        for (int j = 0; j < n; ++j)
          if (le[k][j]) le[i][j] = 1;

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (le[i][j] && le[j][i])
        res.errors.push_back({{}, "lattice.cycle",
                              "order cycle between " + names[i] + " and " +
                                  names[j],
                              ""});
  if (!res.errors.empty()) return res;

  std::vector<std::vector<int>> join(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      std::vector<int> ubs;
      for (int u = 0; u < n; ++u)
        if (le[a][u] && le[b][u]) ubs.push_back(u);
      if (ubs.empty()) {
        res.errors.push_back({{}, "lattice.no_upper_bound",
                              "no upper bound for " + names[a] + " and " +
                                  names[b],
                              ""});
        continue;
      }
      std::vector<int> minimal;
      for (int u : ubs) {
        bool is_min = true;
        for (int v : ubs)
          if (v != u && le[v][u]) is_min = false;
        if (is_min) minimal.push_back(u);
      }
      if (minimal.size() != 1) {
        std::string which;
        for (int u : minimal) which += (which.empty() ? "" : ", ") + names[u];
        res.errors.push_back({{}, "lattice.ambiguous_join",
                              "join of " + names[a] + " and " + names[b] +
                                  " is ambiguous: {" + which + "}",
                              ""});
        continue;
      }
      join[a][b] = join[b][a] = minimal[0];
    }
  }
  if (!res.errors.empty()) return res;

  int top = -1;
  for (int t = 0; t < n && top < 0; ++t) {
    bool all = true;
    for (int i = 0; i < n; ++i) all = all && le[i][t];
    if (all) top = t;
  }
  if (top < 0) {
    res.errors.push_back({{}, "lattice.no_top", "lattice has no top element", ""});
    return res;
  }
  res.value = Semilattice(names, le, join, top);
  return res;
}

int join_eval(const SecPtr& t, const Valuation& val, const Semilattice& lat) {
  switch (t->kind) {
    case SecTerm::Kind::kConst: {
      int i = lat.index(t->name);
      if (i < 0) throw Error("unknown security level " + t->name);
      return i;
    }
    case SecTerm::Kind::kVar: {
      auto it = val.find(t->name);
      if (it == val.end()) throw Error("unbound security variable " + t->name);
      return it->second;
    }
    case SecTerm::Kind::kJoin:
      return lat.join(join_eval(t->lhs, val, lat), join_eval(t->rhs, val, lat));
  }
  return -1;
}

bool holds(const Constraint& c, const Valuation& val, const Semilattice& lat) {
  return lat.leq(join_eval(c.lo, val, lat), join_eval(c.hi, val, lat));
}

namespace {

// Flattened join: constants folded, variables kept as a set.
struct Atoms {
  int konst = -1;
  std::vector<std::string> vars;
};

void flatten(const SecPtr& t, const Semilattice& lat, Atoms& out) {
  switch (t->kind) {
    case SecTerm::Kind::kConst: {
      int i = lat.index(t->name);
      if (i < 0) throw Error("unknown security level " + t->name);
      out.konst = out.konst < 0 ? i : lat.join(out.konst, i);
      break;
    }
    case SecTerm::Kind::kVar:
      if (std::find(out.vars.begin(), out.vars.end(), t->name) == out.vars.end())
        out.vars.push_back(t->name);
      break;
    case SecTerm::Kind::kJoin:
      flatten(t->lhs, lat, out);
      flatten(t->rhs, lat, out);
      break;
  }
}

// Sound fast path: closure over atom <= atom facts read off the hypotheses.
bool saturate(const Theory& th, const Semilattice& lat, const Constraint& goal) {
  // nodes: lattice elements first, then theory vars
  const int nl = lat.size();
  std::vector<std::string> vars = th.vars;
  collect_vars(goal.lo, vars);
  collect_vars(goal.hi, vars);
  const int n = nl + static_cast<int>(vars.size());
  auto node_of_var = [&](const std::string& v) {
    return nl + static_cast<int>(std::find(vars.begin(), vars.end(), v) -
                                 vars.begin());
  };
  std::vector<std::vector<char>> le(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) le[i][i] = 1;
  for (int a = 0; a < nl; ++a)
    for (int b = 0; b < nl; ++b) le[a][b] = lat.leq(a, b);
  for (const auto& h : th.hyps) {
    Atoms lo, hi;
    flatten(h.lo, lat, lo);
    flatten(h.hi, lat, hi);
    int target;
    if (hi.vars.empty() && hi.konst >= 0) {
      target = hi.konst;
    } else if (hi.vars.size() == 1 && hi.konst < 0) {
      target = node_of_var(hi.vars[0]);
    } else {
      continue;
    }
    if (lo.konst >= 0) le[lo.konst][target] = 1;
    for (const auto& v : lo.vars) le[node_of_var(v)][target] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (le[i][k])
        for (int j = 0; j < n; ++j)
          if (le[k][j]) le[i][j] = 1;

  Atoms glo, ghi;
  flatten(goal.lo, lat, glo);
  flatten(goal.hi, lat, ghi);
  std::vector<int> rhs;
  if (ghi.konst >= 0) rhs.push_back(ghi.konst);
  for (const auto& v : ghi.vars) rhs.push_back(node_of_var(v));
  auto below = [&](int a) {
    for (int b : rhs)
      if (le[a][b]) return true;
    return false;
  };
  if (glo.konst >= 0 && !below(glo.konst)) return false;
  for (const auto& v : glo.vars)
    if (!below(node_of_var(v))) return false;
  return true;
}

// Enumerates valuations of `vars` satisfying `hyps`; `visit` returns false to
// stop. Hypotheses are checked as soon as all their variables are bound.
void enumerate(const std::vector<std::string>& vars,
               const std::vector<Constraint>& hyps, const Semilattice& lat,
               const std::function<bool(const Valuation&)>& visit) {
  std::vector<std::vector<const Constraint*>> ready(vars.size() + 1);
  for (const auto& h : hyps) {
    std::vector<std::string> hv;
    collect_vars(h.lo, hv);
    collect_vars(h.hi, hv);
    size_t last = 0;
    for (const auto& v : hv) {
      auto it = std::find(vars.begin(), vars.end(), v);
      if (it == vars.end()) throw Error("undeclared security variable " + v);
      last = std::max(last, static_cast<size_t>(it - vars.begin()) + 1);
    }
    ready[last].push_back(&h);
  }
  Valuation val;
  for (const auto* h : ready[0])
    if (!holds(*h, val, lat)) return;
  bool stop = false;
  std::function<void(size_t)> go = [&](size_t i) {
    if (stop) return;
    if (i == vars.size()) {
      if (!visit(val)) stop = true;
      return;
    }
    for (int e = 0; e < lat.size() && !stop; ++e) {
      val[vars[i]] = e;
      bool ok = true;
      for (const auto* h : ready[i + 1])
        if (!holds(*h, val, lat)) {
          ok = false;
          break;
        }
      if (ok) go(i + 1);
    }
    val.erase(vars[i]);
  };
  go(0);
}

}  // namespace

bool entails(const Theory& th, const Semilattice& lat, const Constraint& goal) {
  if (saturate(th, lat, goal)) return true;
  std::vector<std::string> vars = th.vars;
  collect_vars(goal.lo, vars);
  collect_vars(goal.hi, vars);
  bool refuted = false;
  enumerate(vars, th.hyps, lat, [&](const Valuation& v) {
    if (!holds(goal, v, lat)) refuted = true;
    return !refuted;
  });
  return !refuted;
}

bool entails_eq(const Theory& th, const Semilattice& lat, const SecPtr& a,
                const SecPtr& b) {
  return entails(th, lat, {a, b}) && entails(th, lat, {b, a});
}

std::vector<Valuation> models(const Theory& th, const Semilattice& lat) {
  std::vector<Valuation> out;
  enumerate(th.vars, th.hyps, lat, [&](const Valuation& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

bool satisfiable(const Theory& th, const Semilattice& lat) {
  bool found = false;
  enumerate(th.vars, th.hyps, lat, [&](const Valuation&) {
    found = true;
    return false;
  });
  return found;
}

SecPtr apply_subst(const SecSubst& s, const SecPtr& t) {
  switch (t->kind) {
    case SecTerm::Kind::kConst:
      return t;
    case SecTerm::Kind::kVar: {
      auto it = s.find(t->name);
      if (it == s.end()) throw Error("substitution has no binding for " + t->name);
      return it->second;
    }
    case SecTerm::Kind::kJoin:
      return SecTerm::Join(apply_subst(s, t->lhs), apply_subst(s, t->rhs));
  }
  return t;
}

std::vector<Diagnostic> check_subst(const Theory& caller, const SecSubst& s,
                                    const Theory& callee,
                                    const Semilattice& lat) {
  std::vector<Diagnostic> out;
  for (const auto& v : callee.vars)
    if (!s.count(v))
      out.push_back({{}, "Spawn.subst", "missing binding for " + v, ""});
  if (!out.empty()) return out;
  for (const auto& h : callee.hyps) {
    Constraint inst{apply_subst(s, h.lo), apply_subst(s, h.hi)};
    if (!entails(caller, lat, inst))
      out.push_back({{}, "Spawn.subst",
                     "caller cannot assert callee hypothesis " + to_string(h),
                     to_string(inst)});
  }
  return out;
}

}  // namespace slr
