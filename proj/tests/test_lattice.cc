#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "testing.hpp"

namespace slr {
namespace {

SemilatticeSpec banking_spec() { return {{{"bank"}, {"alice", "bob"}, {"guest"}}, {}}; }

Semilattice banking() {
  auto r = validate_semilattice(banking_spec());
  EXPECT_TRUE(r.ok());
  return *r;
}

TEST(Lattice, BankingOrderAndJoins) {
  Semilattice lat = banking();
  testing::BankOracle o;
  ASSERT_EQ(lat.size(), 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      int ia = lat.index(o.names[a]), ib = lat.index(o.names[b]);
      EXPECT_EQ(lat.leq(ia, ib), o.le(a, b)) << o.names[a] << " <= " << o.names[b];
      EXPECT_EQ(lat.name(lat.join(ia, ib)), o.names[o.join(a, b)]);
    }
  EXPECT_EQ(lat.name(lat.top()), "bank");
  EXPECT_EQ(lat.name(lat.join(lat.index("alice"), lat.index("bob"))), "bank");
}

TEST(Lattice, JoinLaws) {
  Semilattice lat = banking();
  const int n = lat.size();
  for (int a = 0; a < n; ++a) {
    EXPECT_EQ(lat.join(a, a), a);
    for (int b = 0; b < n; ++b) {
      EXPECT_EQ(lat.join(a, b), lat.join(b, a));
      EXPECT_EQ(lat.leq(a, b), lat.join(a, b) == b);
      for (int c = 0; c < n; ++c)
        EXPECT_EQ(lat.join(lat.join(a, b), c), lat.join(a, lat.join(b, c)));
    }
  }
}

TEST(Lattice, RejectsInvalidSpecs) {
  SemilatticeSpec no_top{{{"a", "b"}}, {}};
  EXPECT_FALSE(validate_semilattice(no_top).ok());
  SemilatticeSpec ambiguous{{{"top"}, {"c", "d"}, {"a", "b"}}, {}};
  EXPECT_FALSE(validate_semilattice(ambiguous).ok());
  SemilatticeSpec cycle{{{"top"}, {"a", "b"}}, {{"a", "b"}, {"b", "a"}}};
  EXPECT_FALSE(validate_semilattice(cycle).ok());
  EXPECT_TRUE(validate_semilattice(banking_spec()).ok());
}

TEST(Lattice, EntailmentMatchesBruteForce) {
  Semilattice lat = banking();
  testing::BankOracle o;
  std::mt19937_64 rng(2024);
  int yes = 0;
  for (int q = 0; q < 200; ++q) {
    Theory th;
    th.name = "T";
    int nv = rng() % 4;
    for (int i = 0; i < nv; ++i) th.vars.push_back("v" + std::to_string(i));
    int nh = rng() % 4;
    for (int i = 0; i < nh; ++i) th.hyps.push_back({testing::random_sec_term(rng, th.vars), testing::random_sec_term(rng, th.vars)});
    Constraint goal{testing::random_sec_term(rng, th.vars), testing::random_sec_term(rng, th.vars)};
    bool expect = o.entails(th, goal);
    yes += expect;
    EXPECT_EQ(entails(th, lat, goal), expect) << "query " << q << ": " << to_string(goal);
  }
  // both outcomes must be exercised
  EXPECT_GT(yes, 20);
  EXPECT_LT(yes, 180);
}

TEST(Lattice, EntailmentIsMonotone) {
  Semilattice lat = banking();
  std::mt19937_64 rng(99);
  for (int q = 0; q < 100; ++q) {
    Theory th;
    th.vars = {"p", "q"};
    th.hyps.push_back({testing::random_sec_term(rng, th.vars), testing::random_sec_term(rng, th.vars)});
    Constraint goal{testing::random_sec_term(rng, th.vars), testing::random_sec_term(rng, th.vars)};
    if (!entails(th, lat, goal)) continue;
    th.hyps.push_back({testing::random_sec_term(rng, th.vars), testing::random_sec_term(rng, th.vars)});
    EXPECT_TRUE(entails(th, lat, goal));
  }
}

TEST(Lattice, ModelsOfCorpusTheories) {
  Signature sig = testing::load("bank.sill");
  Semilattice lat = testing::lattice(sig);
  const Theory* psi2 = sig.find_theory("Psi2");
  ASSERT_NE(psi2, nullptr);
  // psi = alice, psi' <= psi: psi' ranges over alice and guest
  auto ms = models(*psi2, lat);
  ASSERT_EQ(ms.size(), 2u);
  for (const auto& m : ms) EXPECT_EQ(lat.name(m.at("psi")), "alice");
}

TEST(Lattice, SubstitutionChecks) {
  Semilattice lat = banking();
  Theory psi1{"Psi1", {"psi", "psi'"}, {{SecTerm::Var("psi'"), SecTerm::Var("psi")}}};
  Theory caller{"Main", {}, {}};
  SecSubst good{{"psi", SecTerm::Const("bank")}, {"psi'", SecTerm::Const("guest")}};
  EXPECT_TRUE(check_subst(caller, good, psi1, lat).empty());
  SecSubst bad{{"psi", SecTerm::Const("guest")}, {"psi'", SecTerm::Const("alice")}};
  EXPECT_FALSE(check_subst(caller, bad, psi1, lat).empty());
  SecSubst ab{{"psi", SecTerm::Join(SecTerm::Const("alice"), SecTerm::Const("bob"))}};
  EXPECT_EQ(lat.name(join_eval(apply_subst(ab, SecTerm::Var("psi")), {}, lat)), "bank");
}

}  // namespace
}  // namespace slr
