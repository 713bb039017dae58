#include <gtest/gtest.h>

#include "narrex/bundle_io.hpp"
#include "narrex/error.hpp"
#include "support/fixtures.hpp"

namespace narrex {
namespace {

using testing::gdpr_bundle;
using testing::lit;

std::string error_code_of(std::string_view doc) {
  try {
    parse_bundle(doc);
  } catch (const BundleError& e) {
    return e.code();
  }
  return "accepted";
}

TEST(BundleIo, LoadsReferenceBundle) {
  const ExplanandumBundle& b = gdpr_bundle();
  EXPECT_EQ(b.overview.id, "gdpr-minor-consent");
  EXPECT_EQ(b.overview.mode, ExplanationMode::ex_post);
  ASSERT_EQ(b.process.function.rules.size(), 3u);
  ASSERT_EQ(b.process.function.superiority.size(), 1u);
  EXPECT_EQ(b.process.function.superiority[0].note, "Lex specialis derogat generali");
  EXPECT_TRUE(b.process.function.superior("r_it", "r_gdpr"));
  EXPECT_FALSE(b.process.function.superior("r_gdpr", "r_it"));
  ASSERT_EQ(b.process.inputs.size(), 4u);
  EXPECT_EQ(*b.find_premise("f_age")->value, Value::of_number(14));
  EXPECT_EQ(*b.find_premise("f_jur")->value, Value::of_symbol("italy"));
  ASSERT_TRUE(b.overview.decision);
  EXPECT_EQ(b.overview.decision->literal, lit("reject_parent_deletion(giulio,marco)"));
  EXPECT_EQ(b.label("r_it"), "Italian legislative decree 101/2018");
  EXPECT_EQ(b.label("unlabelled"), "unlabelled");
}

TEST(BundleIo, TaxonomyDepth) {
  const ExplanandumBundle& b = gdpr_bundle();
  EXPECT_EQ(abstraction_depth(b, "LegalNorm"), 0u);
  EXPECT_EQ(abstraction_depth(b, "Statute"), 1u);
  EXPECT_EQ(abstraction_depth(b, "NationalDecree"), 2u);
  EXPECT_EQ(abstraction_depth(b, "EURegulation"), 1u);
  EXPECT_THROW(abstraction_depth(b, "Nope"), BundleError);
}

TEST(BundleIo, ContextEntitiesAreTyped) {
  const ExplanandumBundle& b = gdpr_bundle();
  EXPECT_EQ(b.concepts_of("whatsapp"), std::vector<std::string>{"InformationSocietyService"});
  EXPECT_EQ(b.concepts_of("marco"), std::vector<std::string>{"Minor"});
  EXPECT_TRUE(b.concepts_of("nobody").empty());
}

TEST(BundleIo, SerializeRoundTrip) {
  const ExplanandumBundle& b = gdpr_bundle();
  std::string text = serialize_bundle(b);
  ExplanandumBundle again = parse_bundle(text);
  EXPECT_EQ(again, b);
  EXPECT_EQ(serialize_bundle(again), text);
}

TEST(BundleIo, GroundFactsEvaluateComparisons) {
  std::set<Literal> facts = ground_facts(gdpr_bundle());
  EXPECT_TRUE(facts.count(lit("age(marco) < 16")));
  EXPECT_TRUE(facts.count(lit("age(marco) >= 14")));
  EXPECT_TRUE(facts.count(lit("jurisdiction(marco) == italy")));
  EXPECT_TRUE(facts.count(lit("parent(giulio,marco)")));
  EXPECT_TRUE(facts.count(lit("request_deletion(giulio,marco)")));
  EXPECT_EQ(facts.size(), 5u);
}

TEST(BundleIo, FalseBooleanPremiseAssertsComplement) {
  ExplanandumBundle b = parse_bundle(R"json({"facts": [{"id": "f", "literal": "p(a)", "value": false}]})json");
  std::set<Literal> facts = ground_facts(b);
  EXPECT_EQ(facts, std::set<Literal>{lit("~p(a)")});
}

TEST(BundleIo, SyntaxErrorReportsPosition) {
  try {
    parse_bundle("{\n  \"rules\": [,]\n}");
    FAIL();
  } catch (const BundleError& e) {
    EXPECT_EQ(e.code(), "syntax-error");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(BundleIo, RejectsStructuralProblems) {
  EXPECT_EQ(error_code_of(R"json({"bogus": 1})json"), "syntax-error");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "maybe", "consequent": "p"}]})json"), "syntax-error");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "defeasible", "consequent": "p("}]})json"), "syntax-error");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "defeasible", "consequent": "p", "source_refs": ["s"]}]})json"),
            "dangling-reference");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "defeasible", "consequent": "p"},
                                       {"id": "r", "kind": "defeasible", "consequent": "q"}]})json"),
            "duplicate-id");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "defeasible", "consequent": "p"}],
                             "facts": [{"id": "r", "literal": "q"}]})json"),
            "duplicate-id");
  EXPECT_EQ(error_code_of(R"json({"ontology": {"concepts": [{"id": "A", "parent": "B"}, {"id": "B", "parent": "A"}]}})json"),
            "taxonomy-cycle");
  EXPECT_EQ(error_code_of(R"json({"ontology": {"concepts": [{"id": "A", "parent": "Z"}]}})json"), "dangling-reference");
  EXPECT_EQ(error_code_of(R"json({"ontology": {"entities": {"x": ["Nope"]}}})json"), "dangling-reference");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "defeasible", "consequent": "p"}],
                             "superiority": [{"winner": "r", "loser": "r"}]})json"),
            "invalid-structure");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "defeasible", "consequent": "p"}],
                             "superiority": [{"winner": "r", "loser": "s"}]})json"),
            "dangling-reference");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "a", "kind": "defeasible", "consequent": "p"},
                                       {"id": "b", "kind": "defeasible", "consequent": "~p"}],
                             "superiority": [{"winner": "a", "loser": "b"}, {"winner": "b", "loser": "a"}]})json"),
            "invalid-structure");
  EXPECT_EQ(error_code_of(R"json({"rules": [{"id": "r", "kind": "defeasible", "antecedents": ["p"], "consequent": "p"}]})json"),
            "invalid-structure");
  EXPECT_EQ(error_code_of(R"json({"facts": [{"id": "f", "literal": "age(m) < 3"}]})json"), "invalid-structure");
  EXPECT_EQ(error_code_of(R"json({"ground": {"nothing": {"format": "x", "text": "y"}}})json"), "dangling-reference");
  EXPECT_EQ(error_code_of(R"json({"overview": {"mode": "sometimes"}})json"), "syntax-error");
}

TEST(BundleIo, MissingFileIsAnIoError) {
  try {
    load_bundle("/nonexistent/bundle.json");
    FAIL();
  } catch (const BundleError& e) {
    EXPECT_EQ(e.code(), "io-error");
  }
}

}  // namespace
}  // namespace narrex

namespace narrex {
namespace {

// Every key the reference bundles use is declared by the checked-in schema,
// and every key the schema declares at the top level is accepted by the parser.
TEST(BundleSchema, AgreesWithParserAndReferenceBundles) {
  using nlohmann::json;
  json schema = json::parse(testing::read_file(std::filesystem::path(NARREX_SCHEMA_DIR) / "bundle.schema.json"));
  const json& props = schema["properties"];
  auto declared = [](const json& object_schema, const std::string& key) {
    return object_schema.contains("properties") && object_schema["properties"].contains(key);
  };
  auto check_items = [&](const json& items, const json& item_schema, const std::string& where) {
    for (const json& item : items) {
      for (const auto& [key, value] : item.items()) EXPECT_TRUE(declared(item_schema, key)) << where << "." << key;
    }
  };
  for (const char* file : {"gdpr_case.json"}) {
    json bundle = json::parse(testing::read_file(testing::data_path(file)));
    for (const auto& [key, value] : bundle.items()) EXPECT_TRUE(props.contains(key)) << key;
    check_items(bundle["rules"], props["rules"]["items"], "rules");
    check_items(bundle["facts"], props["facts"]["items"], "facts");
    check_items(bundle["sources"], props["sources"]["items"], "sources");
    check_items(bundle["superiority"], props["superiority"]["items"], "superiority");
    check_items(bundle["ontology"]["concepts"], props["ontology"]["properties"]["concepts"]["items"], "concepts");
    for (const auto& [key, value] : bundle["overview"].items()) EXPECT_TRUE(declared(props["overview"], key)) << key;
  }
  for (const auto& [key, value] : props.items()) {
    json doc = json::object();
    if (key == "$schema") {
      doc[key] = "x";
    } else if (value["type"] == "array") {
      doc[key] = json::array();
    } else {
      doc[key] = json::object();
    }
    EXPECT_NO_THROW(bundle_from_json(doc)) << key;
  }
  EXPECT_THROW(bundle_from_json(json{{"unknown_section", json::object()}}), BundleError);
}

}  // namespace
}  // namespace narrex
