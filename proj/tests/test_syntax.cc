#include <gtest/gtest.h>

#include "testing.hpp"

namespace slr {
namespace {

Signature parse_ok(const std::string& src) {
  auto r = parse_signature(src);
  EXPECT_TRUE(r.ok()) << (r.errors.empty() ? "" : to_string(r.errors.front()));
  return r.ok() ? *r : Signature{};
}

TEST(Syntax, CorpusRoundTrips) {
  for (const auto& f : testing::corpus_files()) {
    SCOPED_TRACE(f);
    auto first = parse_signature(testing::read_file(testing::corpus_path(f)));
    ASSERT_TRUE(first.ok());
    std::string printed = print_signature(*first);
    auto second = parse_signature(printed);
    ASSERT_TRUE(second.ok()) << printed;
    EXPECT_TRUE(signature_equal(*first, *second));
    EXPECT_EQ(print_signature(*second), printed);
  }
}

TEST(Syntax, ReportsParseErrorsWithPosition) {
  auto r = parse_signature("type pin = +{tok1: pin\nproc P (x: pin) :: (y: 1) = { close y }");
  ASSERT_FALSE(r.ok());
  EXPECT_GT(r.errors.front().span.line, 0);
}

TEST(Syntax, Contractivity) {
  Signature ok = parse_ok("type pin = +{tok1: pin, tok2: pin}");
  EXPECT_TRUE(check_contractive(ok.types[0], ok).empty());

  Signature loop = parse_ok("type t = t");
  EXPECT_FALSE(check_contractive(loop.types[0], loop).empty());

  Signature mutual = parse_ok("type a = b\ntype b = a");
  EXPECT_FALSE(check_contractive(mutual.types[0], mutual).empty());
}

TEST(Syntax, EquiRecursiveTypeEquality) {
  Signature sig = parse_ok(
      "type a = +{x: a}\n"
      "type b = +{x: +{x: b}}\n"
      "type c = +{x: 1}\n"
      "type d = &{x: d}\n");
  auto var = [](const char* n) { return Type::Var(n); };
  EXPECT_TRUE(type_equal(var("a"), var("b"), sig));
  EXPECT_TRUE(type_equal(var("b"), var("a"), sig));
  EXPECT_FALSE(type_equal(var("a"), var("c"), sig));
  EXPECT_FALSE(type_equal(var("a"), var("d"), sig));
  EXPECT_TRUE(type_equal(unfold(var("a"), sig), var("a"), sig));
  EXPECT_EQ(unfold(var("a"), sig)->kind, Type::Kind::kPlus);
}

TEST(Syntax, DesugarRemovesTailCalls) {
  Signature sig = testing::load("bank.sill");
  for (const auto& p : sig.procs) {
    auto d = desugar_def(p, sig);
    ASSERT_TRUE(d.ok()) << p.name;
    EXPECT_FALSE(has_tail_calls(*d)) << p.name;
  }
}

TEST(Syntax, RenameAvoidsCapture) {
  // renaming the free z to w must not touch the bound w
  TermPtr t = TermBuilder::RecvChan("w", Chan("x"), TermBuilder::SendChan(Chan("z"), Chan("x"),
                                                                          TermBuilder::Fwd(Chan("x"), Chan("w"))));
  TermPtr r = rename(t, {{Chan("z"), Chan("w")}});
  auto fv = free_chans(r);
  EXPECT_NE(std::find(fv.begin(), fv.end(), Chan("w")), fv.end());
  EXPECT_EQ(std::find(fv.begin(), fv.end(), Chan("z")), fv.end());
  EXPECT_FALSE(term_equal(t, r));
}

TEST(Syntax, EraseDropsSecrecy) {
  Signature sig = testing::load("bank.sill");
  Signature plain = erase(sig);
  EXPECT_FALSE(plain.has_lattice);
  EXPECT_TRUE(plain.theories.empty());
  for (const auto& p : plain.procs) {
    EXPECT_FALSE(p.secured()) << p.name;
    EXPECT_EQ(p.running, nullptr);
  }
}

}  // namespace
}  // namespace slr
