#include <gtest/gtest.h>

#include "narrex/counterfactual.hpp"
#include "narrex/error.hpp"
#include "support/fixtures.hpp"

namespace narrex {
namespace {

using testing::gdpr_bundle;
using testing::lit;

const Literal kDecision = lit("reject_parent_deletion(giulio,marco)");

CounterfactualResult run(std::string_view text) {
  const ExplanandumBundle& b = gdpr_bundle();
  return whatif(b, derive(b), parse_mutations(text));
}

std::string error_of(std::string_view text) {
  try {
    run(text);
  } catch (const MutationError& e) {
    return e.code();
  }
  return "accepted";
}

TEST(Counterfactual, YoungerThanFourteenFlipsTheDecision) {
  CounterfactualResult r = run("age(marco)=13");
  EXPECT_TRUE(r.decision_changed);
  EXPECT_FALSE(r.new_derivation.provable(kDecision));
  EXPECT_TRUE(r.new_derivation.provable(lit("~valid_consent(marco)")));
  EXPECT_EQ(r.diff.newly_fired, std::vector<std::string>{"r_gdpr"});
  EXPECT_EQ(r.diff.no_longer_fired, (std::vector<std::string>{"r_it", "r_rej"}));
  ASSERT_EQ(r.mutations.size(), 1u);
  EXPECT_EQ(r.mutations[0].premise_id, "f_age");
  EXPECT_EQ(r.mutations[0].old_value, Value::of_number(14));
  EXPECT_EQ(r.mutations[0].new_value, Value::of_number(13));
  bool decision_flipped = false;
  for (const FlippedLiteral& f : r.diff.flipped) {
    if (f.literal == kDecision) decision_flipped = f.was_provable && !f.now_provable;
  }
  EXPECT_TRUE(decision_flipped);
}

TEST(Counterfactual, NonDerogatingJurisdictionFlipsTheDecision) {
  CounterfactualResult r = run("jurisdiction(marco)=france");
  EXPECT_TRUE(r.decision_changed);
  EXPECT_FALSE(r.new_derivation.provable(kDecision));
  EXPECT_EQ(r.new_derivation.status(kDecision).defeasible_tag(), ProofTag::defeasibly_refuted);
}

TEST(Counterfactual, PremiseCanBeAddressedById) {
  EXPECT_TRUE(run("f_age=13").decision_changed);
}

TEST(Counterfactual, IdentityMutationHasEmptyDiff) {
  CounterfactualResult r = run("age(marco)=14");
  EXPECT_TRUE(r.diff.empty());
  EXPECT_FALSE(r.decision_changed);
  EXPECT_EQ(r.new_derivation, derive(gdpr_bundle()));
}

TEST(Counterfactual, SixteenStillRejects) {
  CounterfactualResult r = run("age(marco)=16");
  EXPECT_FALSE(r.decision_changed);
  EXPECT_TRUE(r.new_derivation.provable(kDecision));
}

TEST(Counterfactual, DroppingTheRequestChangesTheDecision) {
  CounterfactualResult r = run("request_deletion(giulio,marco)=false");
  EXPECT_TRUE(r.decision_changed);
  EXPECT_FALSE(r.new_derivation.provable(kDecision));
}

TEST(Counterfactual, SeveralMutationsApplyTogether) {
  CounterfactualResult r = run("age(marco)=13, jurisdiction(marco)=france");
  EXPECT_EQ(r.mutations.size(), 2u);
  EXPECT_TRUE(r.decision_changed);
}

TEST(Counterfactual, RejectsIllegalMutations) {
  EXPECT_EQ(error_of("r_it=true"), "not-a-premise");
  EXPECT_EQ(error_of("valid_consent(marco)=false"), "not-a-premise");
  EXPECT_EQ(error_of("age(marco)=italy"), "type-mismatch");
  EXPECT_EQ(error_of("jurisdiction(marco)=14"), "type-mismatch");
  EXPECT_EQ(error_of("jurisdiction(marco)=narnia"), "type-mismatch");
  EXPECT_EQ(error_of("jurisdiction(marco)=whatsapp"), "type-mismatch");
  EXPECT_EQ(error_of("parent(giulio,marco)=3"), "type-mismatch");
  EXPECT_EQ(error_of("age(marco)"), "malformed-arguments");
  EXPECT_EQ(error_of("=3"), "malformed-arguments");
}

TEST(Counterfactual, ParsesMutationLists) {
  auto ms = parse_mutations("age(marco)=13,request_deletion(giulio,marco)=false");
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[0].premise, "age(marco)");
  EXPECT_EQ(ms[0].value, Value::of_number(13));
  EXPECT_EQ(ms[1].premise, "request_deletion(giulio,marco)");
  EXPECT_EQ(ms[1].value, Value::of_bool(false));
  EXPECT_TRUE(parse_mutations("").empty());
}

TEST(Counterfactual, ResultSerializes) {
  nlohmann::json j = to_json(run("age(marco)=13"));
  EXPECT_TRUE(j["decision_changed"].get<bool>());
  EXPECT_EQ(j["mutations"][0]["premise"], "f_age");
}

}  // namespace
}  // namespace narrex
