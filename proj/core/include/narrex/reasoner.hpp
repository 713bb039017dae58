#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "narrex/bundle.hpp"
#include "narrex/literal.hpp"

namespace narrex {

/// The four defeasible-logic proof tags.
enum class ProofTag {
  definitely_provable,   // +Δ
  definitely_refuted,    // −Δ
  defeasibly_provable,   // +∂
  defeasibly_refuted,    // −∂
};

std::string_view to_string(ProofTag tag);
std::string_view symbol(ProofTag tag);

/// Every literal carries exactly one definite and one defeasible tag.
struct ProofStatus {
  bool definite = false;    // +Δ when true, −Δ otherwise
  bool defeasible = false;  // +∂ when true, −∂ otherwise

  ProofTag definite_tag() const {
    return definite ? ProofTag::definitely_provable : ProofTag::definitely_refuted;
  }
  ProofTag defeasible_tag() const {
    return defeasible ? ProofTag::defeasibly_provable : ProofTag::defeasibly_refuted;
  }
  /// Strongest tag: +Δ, else +∂, else −∂.
  ProofTag headline() const;

  bool operator==(const ProofStatus&) const = default;
};

enum class DefeatReason {
  inapplicable_antecedent,
  beaten_by_superiority,
  overridden_by_definite,
};

std::string_view to_string(DefeatReason reason);

struct DefeatedRule {
  std::string rule;
  DefeatReason reason = DefeatReason::inapplicable_antecedent;

  bool operator==(const DefeatedRule&) const = default;
};

struct Justification {
  /// Rule whose firing concluded the literal; empty when the literal is a fact.
  std::optional<std::string> winning_rule;
  std::set<Literal> supporting_facts;
  std::vector<DefeatedRule> defeated_rules;
  std::vector<Superiority> superiority_used;

  bool operator==(const Justification&) const = default;
};

struct FiringRecord {
  std::string rule;
  std::vector<Literal> satisfied_antecedents;
  Literal consequent;
  std::size_t step = 0;

  bool operator==(const FiringRecord&) const = default;
};

struct Derivation {
  std::map<Literal, ProofStatus> conclusions;
  std::vector<FiringRecord> causal_chain;
  std::map<Literal, Justification> justifications;
  std::set<Literal> facts;

  /// Status of a literal; literals never mentioned are −Δ/−∂.
  ProofStatus status(const Literal& lit) const;
  bool provable(const Literal& lit) const { return status(lit).defeasible; }
  bool fired(std::string_view rule_id) const;

  bool operator==(const Derivation&) const = default;
};

/// Ambiguity-blocking defeasible logic with team defeat over a propositional
/// theory. Throws ReasoningError("cyclic-dependency") when the atom
/// dependency graph has a cycle; the cycle is listed in the error detail.
Derivation derive(const Theory& theory, const std::set<Literal>& facts);
Derivation derive(const ExplanandumBundle& bundle);

/// Throws ReasoningError("not-derived") unless the literal is +∂.
const Justification& justify(const Derivation& derivation, const Literal& lit);

const std::vector<FiringRecord>& causal_chain(const Derivation& derivation);

/// Rules that settled a conflict somewhere in the support tree of `lit`
/// (winners that used a superiority pair). Falls back to the literal's own
/// winning rule when no conflict was involved.
std::vector<std::string> deciding_rules(const Derivation& derivation, const Literal& lit);

nlohmann::json to_json(const Derivation& derivation);
nlohmann::json to_json(const Justification& justification);

}  // namespace narrex
