#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sessionlr/common.hpp"

namespace slr {

struct SecTerm;
using SecPtr = std::shared_ptr<const SecTerm>;

struct SecTerm {
  enum class Kind { kConst, kVar, kJoin };
  Kind kind = Kind::kConst;
  std::string name;  // kConst / kVar
  SecPtr lhs, rhs;   // kJoin

  static SecPtr Const(std::string n);
  static SecPtr Var(std::string n);
  static SecPtr Join(SecPtr a, SecPtr b);
};

std::string to_string(const SecTerm& t);
std::string to_string(const SecPtr& t);
bool sec_equal(const SecPtr& a, const SecPtr& b);
void collect_vars(const SecPtr& t, std::vector<std::string>& out);

// lo <= hi
struct Constraint {
  SecPtr lo, hi;
};
std::string to_string(const Constraint& c);

struct Theory {
  std::string name;
  std::vector<std::string> vars;
  std::vector<Constraint> hyps;

  bool has_var(const std::string& v) const;
};

using SecSubst = std::map<std::string, SecPtr>;

// Surface description of a lattice. `rows` lists levels top-down; every
// element of a row sits above every element of the next row. Extra `leq`
// pairs (lo, hi) may be given directly.
struct SemilatticeSpec {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> leq;
};

class Semilattice {
 public:
  Semilattice() = default;
  Semilattice(std::vector<std::string> elems, std::vector<std::vector<char>> le,
              std::vector<std::vector<int>> join, int top);

  int size() const { return static_cast<int>(elems_.size()); }
  const std::vector<std::string>& elements() const { return elems_; }
  const std::string& name(int i) const { return elems_[i]; }
  int index(const std::string& n) const;  // -1 when absent
  bool contains(const std::string& n) const { return index(n) >= 0; }
  bool leq(int a, int b) const { return le_[a][b] != 0; }
  int join(int a, int b) const { return join_[a][b]; }
  int top() const { return top_; }

 private:
  std::vector<std::string> elems_;
  std::vector<std::vector<char>> le_;
  std::vector<std::vector<int>> join_;
  int top_ = -1;
};

Result<Semilattice> validate_semilattice(const SemilatticeSpec& spec);

using Valuation = std::map<std::string, int>;

int join_eval(const SecPtr& t, const Valuation& val, const Semilattice& lat);
bool holds(const Constraint& c, const Valuation& val, const Semilattice& lat);

bool entails(const Theory& th, const Semilattice& lat, const Constraint& goal);
bool entails_eq(const Theory& th, const Semilattice& lat, const SecPtr& a,
                const SecPtr& b);

// All valuations of th.vars satisfying th.hyps, in lexicographic order.
std::vector<Valuation> models(const Theory& th, const Semilattice& lat);
bool satisfiable(const Theory& th, const Semilattice& lat);

SecPtr apply_subst(const SecSubst& s, const SecPtr& t);
std::vector<Diagnostic> check_subst(const Theory& caller, const SecSubst& s,
                                    const Theory& callee,
                                    const Semilattice& lat);

}  // namespace slr
