#include "narrex/counterfactual.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "narrex/error.hpp"

namespace narrex {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::boolean: return "boolean";
    case Value::Kind::number: return "number";
    case Value::Kind::symbol: return "symbol";
  }
  return "?";
}

const Premise& resolve_premise(const ExplanandumBundle& bundle, const std::string& ref) {
  if (const Premise* p = bundle.find_premise(ref)) return *p;
  std::optional<Literal> lit;
  try {
    lit = parse_literal(ref);
  } catch (const BundleError&) {
  }
  if (lit) {
    if (const Premise* p = bundle.find_premise_by_subject(*lit)) return *p;
  }
  if (bundle.process.function.find_rule(ref)) {
    throw MutationError("not-a-premise", "'" + ref + "' is a rule; rules are not mutable by what-if", ref);
  }
  throw MutationError("not-a-premise", "'" + ref + "' is not a declared premise", ref);
}

void type_check(const ExplanandumBundle& bundle, const Premise& premise, const Value& old_value,
                const Value& new_value) {
  if (old_value.kind != new_value.kind) {
    throw MutationError("type-mismatch",
                        "premise '" + premise.id + "' holds a " + std::string(kind_name(old_value.kind)) +
                            ", not a " + std::string(kind_name(new_value.kind)),
                        premise.id);
  }
  if (new_value.kind != Value::Kind::symbol) return;
  std::vector<std::string> new_concepts = bundle.concepts_of(new_value.symbol);
  if (new_concepts.empty()) {
    throw MutationError("type-mismatch", "'" + new_value.symbol + "' is not a declared entity", new_value.symbol);
  }
  std::vector<std::string> old_concepts = bundle.concepts_of(old_value.symbol);
  if (old_concepts.empty()) return;
  bool shared = std::any_of(new_concepts.begin(), new_concepts.end(), [&](const std::string& c) {
    return std::find(old_concepts.begin(), old_concepts.end(), c) != old_concepts.end();
  });
  if (!shared) {
    throw MutationError("type-mismatch",
                        "'" + new_value.symbol + "' shares no concept with '" + old_value.symbol + "'",
                        new_value.symbol);
  }
}

}  // namespace

DerivationDiff diff_derivations(const Derivation& before, const Derivation& after) {
  DerivationDiff diff;
  std::set<Literal> literals;
  for (const auto& [lit, _] : before.conclusions) literals.insert(lit);
  for (const auto& [lit, _] : after.conclusions) literals.insert(lit);
  for (const Literal& lit : literals) {
    bool was = before.provable(lit);
    bool now = after.provable(lit);
    if (was != now) diff.flipped.push_back(FlippedLiteral{lit, was, now});
  }
  std::set<std::string> fired_before, fired_after;
  for (const FiringRecord& f : before.causal_chain) fired_before.insert(f.rule);
  for (const FiringRecord& f : after.causal_chain) fired_after.insert(f.rule);
  std::set_difference(fired_after.begin(), fired_after.end(), fired_before.begin(), fired_before.end(),
                      std::back_inserter(diff.newly_fired));
  std::set_difference(fired_before.begin(), fired_before.end(), fired_after.begin(), fired_after.end(),
                      std::back_inserter(diff.no_longer_fired));
  return diff;
}

CounterfactualResult whatif(const ExplanandumBundle& bundle, const Derivation& derivation,
                            const std::vector<MutationRequest>& mutations) {
  std::vector<Premise> premises = bundle.process.inputs;
  CounterfactualResult result;
  for (const MutationRequest& m : mutations) {
    const Premise& declared = resolve_premise(bundle, m.premise);
    auto it = std::find_if(premises.begin(), premises.end(), [&](const Premise& p) { return p.id == declared.id; });
    Value old_value = it->value.value_or(Value::of_bool(true));
    type_check(bundle, declared, old_value, m.value);
    it->value = m.value;
    result.mutations.push_back(AppliedMutation{declared.id, declared.literal, old_value, m.value});
  }
  result.new_derivation = derive(bundle.process.function, ground_facts(premises, bundle.process.function));
  result.diff = diff_derivations(derivation, result.new_derivation);
  if (bundle.overview.decision) {
    const Literal& d = bundle.overview.decision->literal;
    result.decision_changed = derivation.status(d) != result.new_derivation.status(d);
  }
  return result;
}

std::vector<MutationRequest> parse_mutations(std::string_view text) {
  std::vector<MutationRequest> out;
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    char c = i < text.size() ? text[i] : ',';
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (parts.size() == 1 && parts.front().empty()) return out;
  for (std::string_view part : parts) {
    std::size_t eq = part.rfind('=');
    if (part.empty() || eq == std::string_view::npos || eq == 0) {
      throw MutationError("malformed-arguments", "expected <premise>=<value>, got '" + std::string(part) + "'",
                          std::string(part));
    }
    std::optional<Value> v = parse_value(part.substr(eq + 1));
    if (!v) {
      throw MutationError("malformed-arguments", "bad value in '" + std::string(part) + "'", std::string(part));
    }
    out.push_back(MutationRequest{std::string(trim(part.substr(0, eq))), *v});
  }
  return out;
}

nlohmann::json to_json(const CounterfactualResult& r) {
  nlohmann::json muts = nlohmann::json::array();
  for (const AppliedMutation& m : r.mutations) {
    muts.push_back({{"premise", m.premise_id},
                    {"literal", to_string(m.premise)},
                    {"old_value", to_string(m.old_value)},
                    {"new_value", to_string(m.new_value)}});
  }
  nlohmann::json flipped = nlohmann::json::array();
  for (const FlippedLiteral& f : r.diff.flipped) {
    flipped.push_back({{"literal", to_string(f.literal)},
                       {"before", f.was_provable ? "+∂" : "−∂"},
                       {"after", f.now_provable ? "+∂" : "−∂"}});
  }
  return {{"mutations", std::move(muts)},
          {"diff",
           {{"flipped", std::move(flipped)},
            {"newly_fired", r.diff.newly_fired},
            {"no_longer_fired", r.diff.no_longer_fired}}},
          {"decision_changed", r.decision_changed}};
}

}  // namespace narrex
