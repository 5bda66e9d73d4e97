#include <gtest/gtest.h>

#include "criteria.hpp"
#include "testing.hpp"

namespace slr {
namespace {

NiResult self_check(const std::string& file, const std::string& proc, const std::string& obs,
                    int m = 3, int depth = 2) {
  Signature sig = testing::load(file);
  Semilattice lat = testing::lattice(sig);
  return ni_check_proc(sig, lat, proc, lat.index(obs), m, depth);
}

TEST(Ni, LeakyXXObservableByGuest) {
  NiResult r = self_check("xx.sill", "XX", "guest");
  ASSERT_TRUE(r.verdict.distinguished());
  EXPECT_NE(r.env_left, r.env_right);
  std::string left, right;
  for (const auto& s : r.verdict.witness.left) left += s;
  for (const auto& s : r.verdict.witness.right) right += s;
  EXPECT_NE(left.find("zero"), std::string::npos) << left;
  EXPECT_NE(right.find("one"), std::string::npos) << right;
}

TEST(Ni, LeakyXXFineForAlice) {
  EXPECT_TRUE(self_check("xx.sill", "XX", "alice").verdict.related());
}

TEST(Ni, AlwaysZeroVariantIsNoninterfering) {
  EXPECT_TRUE(self_check("xx_zero.sill", "XXzero", "guest").verdict.related());
}

TEST(Ni, SneakyVerifierLeaksThroughObserver) {
  NiResult r = self_check("sneaky.sill", "SneakyVerifier", "guest");
  ASSERT_TRUE(r.verdict.distinguished());
  EXPECT_GT(r.pairs, 0u);
}

TEST(Ni, VerifierRelatedForGuestAndAlice) {
  for (const char* obs : {"guest", "alice"}) {
    NiResult r = self_check("verifier.sill", "aVerifier", obs);
    EXPECT_TRUE(r.verdict.related()) << obs << " " << to_string(r.verdict.kind);
  }
}

TEST(Ni, UnsecuredDefinitionThrows) {
  Signature sig = testing::load("xx.sill");
  Semilattice lat = testing::lattice(sig);
  EXPECT_THROW(ni_check_proc(sig, lat, "NoSuchProc", 0, 1, 1), Error);
}

TEST(Ni, DifferentProjectionsThrow) {
  Signature sig = testing::load_plain("xx.sill");
  Semilattice lat = testing::lattice(testing::load("xx.sill"));
  Configuration a = testing::closed(sig, "XX");
  SecInterface s1;
  s1.observer = lat.index("guest");
  s1.ctx.push_back({Chan("y", 0), Type::Var("bit"), s1.observer});
  s1.offered = {Chan("x", 0), Type::Var("pin"), lat.index("alice")};
  SecInterface s2 = s1;
  s2.offered.level = s1.observer;
  EXPECT_THROW(ni_check(a, a, s1, s2, sig, lat, 1, 1), Error);
}

TEST(NiProperties, AcceptedDefinitionsAreNoninterfering) {
  auto o = testing::ftlr();
  EXPECT_TRUE(o.pass) << o.detail;
}

}  // namespace
}  // namespace slr
