#include <gtest/gtest.h>

#include "narrex/bundle_io.hpp"
#include "narrex/error.hpp"
#include "narrex/reasoner.hpp"
#include "support/fixtures.hpp"

namespace narrex {
namespace {

using testing::lit;

Rule rule(std::string id, RuleKind kind, std::vector<std::string> ants, std::string head) {
  Rule r;
  r.id = std::move(id);
  r.kind = kind;
  for (const std::string& a : ants) r.antecedents.push_back(lit(a));
  r.consequent = lit(head);
  return r;
}

std::set<Literal> facts(std::initializer_list<const char*> texts) {
  std::set<Literal> out;
  for (const char* t : texts) out.insert(lit(t));
  return out;
}

TEST(Reasoner, GdprCaseRejectsTheParentRequest) {
  Derivation d = derive(testing::gdpr_bundle());
  const Literal decision = lit("reject_parent_deletion(giulio,marco)");
  EXPECT_EQ(d.status(decision).defeasible_tag(), ProofTag::defeasibly_provable);
  EXPECT_EQ(d.status(decision).definite_tag(), ProofTag::definitely_refuted);
  EXPECT_TRUE(d.provable(lit("valid_consent(marco)")));
  EXPECT_FALSE(d.provable(lit("~valid_consent(marco)")));

  const Justification& j = justify(d, lit("valid_consent(marco)"));
  ASSERT_TRUE(j.winning_rule);
  EXPECT_EQ(*j.winning_rule, "r_it");
  ASSERT_EQ(j.defeated_rules.size(), 1u);
  EXPECT_EQ(j.defeated_rules[0].rule, "r_gdpr");
  EXPECT_EQ(j.defeated_rules[0].reason, DefeatReason::beaten_by_superiority);
  ASSERT_EQ(j.superiority_used.size(), 1u);
  EXPECT_EQ(j.superiority_used[0].note, "Lex specialis derogat generali");

  ASSERT_EQ(d.causal_chain.size(), 2u);
  EXPECT_EQ(d.causal_chain[0].rule, "r_it");
  EXPECT_EQ(d.causal_chain[0].step, 1u);
  EXPECT_EQ(d.causal_chain[1].rule, "r_rej");
  EXPECT_EQ(d.causal_chain[1].step, 2u);
  EXPECT_TRUE(d.fired("r_it"));
  EXPECT_FALSE(d.fired("r_gdpr"));
  EXPECT_EQ(deciding_rules(d, decision), std::vector<std::string>{"r_it"});
}

TEST(Reasoner, WithoutSuperiorityTheConflictBlocksBothSides) {
  ExplanandumBundle b = testing::gdpr_bundle();
  b.process.function.superiority.clear();
  Derivation d = derive(b);
  EXPECT_FALSE(d.provable(lit("valid_consent(marco)")));
  EXPECT_FALSE(d.provable(lit("~valid_consent(marco)")));
  EXPECT_FALSE(d.provable(lit("reject_parent_deletion(giulio,marco)")));
}

TEST(Reasoner, EveryLiteralHasExactlyOneTagOfEachKind) {
  Derivation d = derive(testing::gdpr_bundle());
  for (const auto& [l, st] : d.conclusions) {
    EXPECT_NE(st.definite_tag() == ProofTag::definitely_provable, st.definite_tag() == ProofTag::definitely_refuted);
    if (st.definite) EXPECT_TRUE(st.defeasible) << to_string(l);
  }
}

TEST(Reasoner, ConsistencyNoLiteralAndComplementBothDefeasible) {
  Derivation d = derive(testing::gdpr_bundle());
  for (const auto& [l, st] : d.conclusions) {
    EXPECT_FALSE(st.defeasible && d.provable(l.complement())) << to_string(l);
  }
}

TEST(Reasoner, StrictRulesChainDefinitely) {
  Theory t;
  t.rules = {rule("s1", RuleKind::strict, {"a"}, "b"), rule("s2", RuleKind::strict, {"b"}, "c")};
  Derivation d = derive(t, facts({"a"}));
  EXPECT_TRUE(d.status(lit("c")).definite);
  EXPECT_TRUE(d.status(lit("c")).defeasible);
  EXPECT_EQ(d.causal_chain.size(), 2u);
}

TEST(Reasoner, DefinitelyProvableOverridesDefeasibleAttack) {
  Theory t;
  t.rules = {rule("s", RuleKind::strict, {"a"}, "p"), rule("d", RuleKind::defeasible, {"a"}, "~p")};
  t.superiority = {{"d", "s", ""}};
  Derivation d = derive(t, facts({"a"}));
  EXPECT_TRUE(d.status(lit("p")).definite);
  EXPECT_FALSE(d.provable(lit("~p")));
  const Justification& j = justify(d, lit("p"));
  ASSERT_EQ(j.defeated_rules.size(), 1u);
  EXPECT_EQ(j.defeated_rules[0].reason, DefeatReason::overridden_by_definite);
}

TEST(Reasoner, DefeatersBlockButNeverConclude) {
  Theory t;
  t.rules = {rule("r", RuleKind::defeasible, {"a"}, "p"), rule("x", RuleKind::defeater, {"a"}, "~p")};
  Derivation d = derive(t, facts({"a"}));
  EXPECT_FALSE(d.provable(lit("p")));
  EXPECT_FALSE(d.provable(lit("~p")));
  t.superiority = {{"r", "x", ""}};
  d = derive(t, facts({"a"}));
  EXPECT_TRUE(d.provable(lit("p")));
}

TEST(Reasoner, TeamDefeat) {
  // r1 beats s1 and r2 beats s2: the team for p wins even though no single
  // rule beats every attacker.
  Theory t;
  t.rules = {rule("r1", RuleKind::defeasible, {"a"}, "p"), rule("r2", RuleKind::defeasible, {"a"}, "p"),
             rule("s1", RuleKind::defeasible, {"a"}, "~p"), rule("s2", RuleKind::defeasible, {"a"}, "~p")};
  t.superiority = {{"r1", "s1", ""}, {"r2", "s2", ""}};
  Derivation d = derive(t, facts({"a"}));
  EXPECT_TRUE(d.provable(lit("p")));
  EXPECT_FALSE(d.provable(lit("~p")));
}

TEST(Reasoner, AmbiguityBlocking) {
  // p is ambiguous, so q (depending on p) is not supported and ~q wins.
  Theory t;
  t.rules = {rule("r1", RuleKind::defeasible, {}, "p"), rule("r2", RuleKind::defeasible, {}, "~p"),
             rule("r3", RuleKind::defeasible, {"p"}, "q"), rule("r4", RuleKind::defeasible, {}, "~q")};
  Derivation d = derive(t, {});
  EXPECT_FALSE(d.provable(lit("p")));
  EXPECT_FALSE(d.provable(lit("~p")));
  EXPECT_TRUE(d.provable(lit("~q")));
  EXPECT_FALSE(d.provable(lit("q")));
}

TEST(Reasoner, SuperiorityPairDecidesAnOtherwiseBlockedConflict) {
  // Adding (r, s) with both rules applicable and no other rules for the
  // conflicting literals moves r's conclusion from −∂ to +∂; s's stays −∂.
  Theory t;
  t.rules = {rule("r", RuleKind::defeasible, {"a"}, "p"), rule("s", RuleKind::defeasible, {"a"}, "~p")};
  Derivation before = derive(t, facts({"a"}));
  EXPECT_FALSE(before.provable(lit("p")));
  EXPECT_FALSE(before.provable(lit("~p")));
  t.superiority = {{"r", "s", ""}};
  Derivation after = derive(t, facts({"a"}));
  EXPECT_TRUE(after.provable(lit("p")));
  EXPECT_FALSE(after.provable(lit("~p")));
}

TEST(Reasoner, CyclicTheoryNamesTheCycle) {
  try {
    derive(load_bundle(testing::test_data_path("cyclic.json")));
    FAIL();
  } catch (const ReasoningError& e) {
    EXPECT_EQ(e.code(), "cyclic-dependency");
    for (const char* atom : {"a", "b", "c"}) EXPECT_NE(e.detail().find(atom), std::string::npos);
  }
}

TEST(Reasoner, NegativeEdgesCountTowardsCycles) {
  Theory t;
  t.rules = {rule("r1", RuleKind::defeasible, {"~a"}, "b"), rule("r2", RuleKind::defeasible, {"b"}, "a")};
  EXPECT_THROW(derive(t, {}), ReasoningError);
}

TEST(Reasoner, EmptyTheoryDerivesNothing) {
  Derivation d = derive(Theory{}, {});
  EXPECT_TRUE(d.conclusions.empty());
  EXPECT_TRUE(d.causal_chain.empty());
}

TEST(Reasoner, JustifyRejectsUnprovedLiterals) {
  Derivation d = derive(testing::gdpr_bundle());
  try {
    justify(d, lit("~valid_consent(marco)"));
    FAIL();
  } catch (const ReasoningError& e) {
    EXPECT_EQ(e.code(), "not-derived");
  }
}

TEST(Reasoner, DeriveIsDeterministic) {
  EXPECT_EQ(to_json(derive(testing::gdpr_bundle())).dump(), to_json(derive(testing::gdpr_bundle())).dump());
}

TEST(Reasoner, TagSymbols) {
  EXPECT_EQ(symbol(ProofTag::definitely_provable), "+Δ");
  EXPECT_EQ(symbol(ProofTag::definitely_refuted), "−Δ");
  EXPECT_EQ(symbol(ProofTag::defeasibly_provable), "+∂");
  EXPECT_EQ(symbol(ProofTag::defeasibly_refuted), "−∂");
}

}  // namespace
}  // namespace narrex
