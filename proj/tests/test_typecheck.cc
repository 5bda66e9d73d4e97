#include <gtest/gtest.h>

#include <chrono>

#include "testing.hpp"

namespace slr {
namespace {

using testing::load;

std::vector<Diagnostic> ifc_diags(const Signature& sig) {
  return check_signature_ifc(sig, testing::lattice(sig));
}

std::vector<Diagnostic> structural_diags(const Signature& sig) {
  Signature plain = erase(sig);
  install_forwarders(plain);
  return check_signature_structural(plain);
}

TEST(Typecheck, BankingCorpusAccepted) {
  auto t0 = std::chrono::steady_clock::now();
  for (const char* f : {"bank.sill", "verifier.sill"}) {
    Signature sig = load(f);
    auto ds = ifc_diags(sig);
    EXPECT_TRUE(ds.empty()) << f << ": " << (ds.empty() ? "" : to_string(ds.front()));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 1.0);
}

TEST(Typecheck, ErasedCorpusAcceptedStructurally) {
  for (const auto& f : testing::corpus_files()) {
    auto ds = structural_diags(load(f));
    EXPECT_TRUE(ds.empty()) << f << ": " << (ds.empty() ? "" : to_string(ds.front()));
  }
}

TEST(Typecheck, SneakyVerifierRejectedAtObserverSends) {
  auto ds = ifc_diags(load("sneaky.sill"));
  ASSERT_EQ(ds.size(), 2u);
  // y.s and y.f in the source
  EXPECT_EQ(ds[0].span.line, 16);
  EXPECT_EQ(ds[1].span.line, 21);
  for (const auto& d : ds) {
    EXPECT_EQ(d.rule, "&L");
    EXPECT_NE(d.message.find("running secrecy"), std::string::npos) << d.message;
    EXPECT_EQ(d.constraint, "psi <= guest");
  }
}

TEST(Typecheck, LeakyAndAlwaysZeroVariantsRejected) {
  auto xx = ifc_diags(load("xx.sill"));
  ASSERT_EQ(xx.size(), 2u);
  EXPECT_EQ(xx[0].span.line, 10);
  EXPECT_EQ(xx[0].rule, "&L");
  EXPECT_EQ(xx[0].constraint, "alice <= guest");
  auto zero = ifc_diags(load("xx_zero.sill"));
  ASSERT_FALSE(zero.empty());
  for (const auto& d : zero) EXPECT_EQ(d.rule, "&L");
}

TEST(Typecheck, IfcAcceptanceImpliesStructuralAcceptance) {
  for (const auto& f : testing::corpus_files()) {
    Signature sig = load(f);
    if (!ifc_diags(sig).empty()) continue;
    EXPECT_TRUE(structural_diags(sig).empty()) << f;
  }
}

TEST(Typecheck, ForgottenWaitIsALinearityError) {
  std::string src = testing::read_file(testing::corpus_path("bank.sill"));
  auto pos = src.find("  wait y1;\n");
  ASSERT_NE(pos, std::string::npos);
  src.erase(pos, std::string("  wait y1;\n").size());
  auto r = parse_signature(src);
  ASSERT_TRUE(r.ok());
  Signature sig = *r;
  install_forwarders(sig);
  EXPECT_FALSE(structural_diags(sig).empty());
  EXPECT_FALSE(ifc_diags(sig).empty());
}

TEST(Typecheck, StructuralRuleExamples) {
  Signature empty;
  Offer x1{Chan("x"), Type::One(), nullptr};
  EXPECT_TRUE(check_proc_structural({}, TermBuilder::Close(Chan("x")), x1, empty).ok());
  EXPECT_TRUE(check_signature_structural(empty).empty());

  Signature sig = load("verifier.sill");
  LinCtx with_u{{Chan("u"), {Type::Var("pin"), nullptr}}};
  auto r = check_proc_structural(with_u, TermBuilder::Close(Chan("x")), x1, sig);
  EXPECT_FALSE(r.ok());

  const ProcDef* av = sig.find_proc("aVerifier");
  ASSERT_NE(av, nullptr);
  auto body = desugar_def(erase(*av), sig);
  ASSERT_TRUE(body.ok());
  EXPECT_TRUE(check_proc_structural(def_context(*av, false), *body, def_offer(*av, false), sig).ok());
}

TEST(Typecheck, AlphaRenamedDefinitionStillChecks) {
  Signature sig = erase(load("bank.sill"));
  install_forwarders(sig);
  const ProcDef* p = sig.find_proc("Auth_in");
  ASSERT_NE(p, nullptr);
  ProcDef q = *p;
  std::map<Chan, Chan> m{{Chan("x"), Chan("x_renamed")}, {Chan("z"), Chan("z_renamed")}};
  q.body = rename(q.body, m);
  q.context[0].var = "x_renamed";
  q.offered = "z_renamed";
  auto body = desugar_def(q, sig);
  ASSERT_TRUE(body.ok());
  EXPECT_TRUE(check_proc_structural(def_context(q, false), *body, def_offer(q, false), sig).ok());
}

TEST(Typecheck, ContextAboveOfferedSecrecyRejected) {
  auto r = parse_signature(
      "secrecy { alice; guest }\n"
      "type pin = +{tok: pin}\n"
      "proc Leak (u: pin[alice]) @guest :: (y: 1[guest]) = {\n"
      "  y <- Leak <- (u)\n"
      "}\n");
  ASSERT_TRUE(r.ok());
  Signature sig = *r;
  install_forwarders(sig);
  EXPECT_FALSE(ifc_diags(sig).empty());
}

TEST(Typecheck, ForwarderShapes) {
  auto parsed = parse_signature("type unit = 1");
  ASSERT_TRUE(parsed.ok());
  Signature sig = *parsed;
  ProcDef f1 = gen_forwarder("unit", sig);
  EXPECT_EQ(print_term(f1.body), print_term(TermBuilder::Wait(Chan("z"), TermBuilder::Close(Chan("y")))));

  Signature v = load("verifier.sill");
  ProcDef fp = gen_forwarder("pin", v);
  ASSERT_EQ(fp.body->kind, Term::Kind::kCase);
  EXPECT_EQ(fp.body->chan, Chan("z"));
  EXPECT_EQ(fp.body->branches.size(), 2u);
  for (const auto& [l, t] : fp.body->branches) {
    EXPECT_EQ(t->kind, Term::Kind::kSendLabel);
    EXPECT_EQ(t->label, l);
    EXPECT_EQ(t->cont->kind, Term::Kind::kTailCall);
    EXPECT_EQ(t->cont->proc, fp.name);
  }
  EXPECT_TRUE(check_signature_structural(erase(v)).empty());
}

TEST(Typecheck, ConfigurationTyping) {
  Signature empty;
  Configuration one;
  one.nodes.push_back(make_msg(MsgKind::kClose, Dir::kRight, Chan("y", 0), Type::One()));
  EXPECT_TRUE(check_config({}, one, {{Chan("y", 0), Type::One(), nullptr}}, empty).empty());

  Configuration twice;
  auto p = make_proc(Chan("y", 0), TermBuilder::Close(Chan("y", 0)), Type::One());
  twice.nodes = {p, p};
  EXPECT_FALSE(check_config(twice, empty).empty());

  // a client nobody provides
  Configuration dangling;
  dangling.nodes.push_back(make_proc(Chan("y", 0),
                                     TermBuilder::Wait(Chan("x", 0), TermBuilder::Close(Chan("y", 0))),
                                     Type::One()));
  EXPECT_FALSE(check_config({}, dangling, {{Chan("y", 0), Type::One(), nullptr}}, empty).empty());
}

}  // namespace
}  // namespace slr
