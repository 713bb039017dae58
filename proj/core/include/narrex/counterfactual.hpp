#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "narrex/bundle.hpp"
#include "narrex/reasoner.hpp"

namespace narrex {

/// Requested change of one premise. `premise` is a premise id or the text of
/// its literal (`age(marco)`).
struct MutationRequest {
  std::string premise;
  Value value;

  bool operator==(const MutationRequest&) const = default;
};

struct AppliedMutation {
  std::string premise_id;
  Literal premise;
  Value old_value;
  Value new_value;

  bool operator==(const AppliedMutation&) const = default;
};

struct FlippedLiteral {
  Literal literal;
  bool was_provable = false;
  bool now_provable = false;

  bool operator==(const FlippedLiteral&) const = default;
};

struct DerivationDiff {
  std::vector<FlippedLiteral> flipped;
  std::vector<std::string> newly_fired;
  std::vector<std::string> no_longer_fired;

  bool empty() const { return flipped.empty() && newly_fired.empty() && no_longer_fired.empty(); }
  bool operator==(const DerivationDiff&) const = default;
};

struct CounterfactualResult {
  std::vector<AppliedMutation> mutations;
  Derivation new_derivation;
  DerivationDiff diff;
  bool decision_changed = false;

  bool operator==(const CounterfactualResult&) const = default;
};

/// Literal-by-literal +∂ comparison plus fired-rule set difference.
DerivationDiff diff_derivations(const Derivation& before, const Derivation& after);

/// Re-derives with mutated premises. Only premises are mutable; values must
/// keep their kind, and symbols must stay within the concepts of the value
/// they replace. Throws MutationError.
CounterfactualResult whatif(const ExplanandumBundle& bundle, const Derivation& derivation,
                            const std::vector<MutationRequest>& mutations);

/// Parses `age(marco)=13,jurisdiction(marco)=france`.
std::vector<MutationRequest> parse_mutations(std::string_view text);

nlohmann::json to_json(const CounterfactualResult& result);

}  // namespace narrex
