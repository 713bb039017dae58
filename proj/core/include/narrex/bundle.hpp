#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "narrex/literal.hpp"

namespace narrex {

enum class RuleKind { strict, defeasible, defeater };

std::string_view to_string(RuleKind kind);

struct Rule {
  std::string id;
  RuleKind kind = RuleKind::defeasible;
  std::vector<Literal> antecedents;
  Literal consequent;
  std::vector<std::string> source_refs;
  std::optional<std::string> jurisdiction;
  std::map<std::string, std::string> annotations;

  bool operator==(const Rule&) const = default;
};

/// (winner, loser) with an optional human note such as the legal maxim that
/// justifies the priority.
struct Superiority {
  std::string winner;
  std::string loser;
  std::string note;

  bool operator==(const Superiority&) const = default;
};

struct Theory {
  std::vector<Rule> rules;
  std::vector<Superiority> superiority;

  const Rule* find_rule(std::string_view id) const;
  bool superior(std::string_view winner, std::string_view loser) const;
  const Superiority* find_superiority(std::string_view winner, std::string_view loser) const;

  bool operator==(const Theory&) const = default;
};

/// A data item of the process inputs. Boolean premises assert their literal
/// (when true); valued premises assign a value to `literal` and feed the
/// comparison conditions of the theory.
struct Premise {
  std::string id;
  Literal literal;
  std::optional<Value> value;
  std::vector<std::string> source_refs;

  bool operator==(const Premise&) const = default;
};

struct Concept {
  std::string id;
  std::optional<std::string> parent;

  bool operator==(const Concept&) const = default;
};

struct Ontology {
  std::vector<Concept> concepts;
  /// Element id (entity, rule id or atom name) -> concept ids.
  std::map<std::string, std::vector<std::string>> entities;
  std::map<std::string, std::string> labels;

  const Concept* find_concept(std::string_view id) const;

  bool operator==(const Ontology&) const = default;
};

struct Source {
  std::string id;
  std::string title;
  std::string citation;
  std::optional<std::string> uri;
  std::optional<std::string> excerpt;

  bool operator==(const Source&) const = default;
};

/// Verbatim fragment of the original representation of an element.
struct GroundFragment {
  std::string format;
  std::string text;

  bool operator==(const GroundFragment&) const = default;
};

enum class ExplanationMode { ex_ante, ex_post };

std::string_view to_string(ExplanationMode mode);

/// The literal whose tag is "the decision", with the wording used when it
/// holds and when it does not.
struct DecisionSpec {
  Literal literal;
  std::string holds_label;
  std::string fails_label;

  bool operator==(const DecisionSpec&) const = default;
};

struct Overview {
  std::string id;
  ExplanationMode mode = ExplanationMode::ex_ante;
  std::string purpose;
  std::string pipeline;
  std::string data;
  std::string jurisdiction;
  std::string consequences;
  std::string language;
  std::string representation;
  std::map<std::string, std::string> runtime_context;
  std::optional<DecisionSpec> decision;

  bool operator==(const Overview&) const = default;
};

/// Inputs (premises), function (rule theory) and outputs of the explained
/// process. Outputs are produced by the reasoner, never authored.
struct Process {
  std::vector<Premise> inputs;
  Theory function;

  bool operator==(const Process&) const = default;
};

/// Background knowledge shared with the explainee: extra typed entities
/// that are not part of the process inputs.
struct ContextDataset {
  std::map<std::string, std::vector<std::string>> entities;
  std::map<std::string, std::string> labels;

  bool operator==(const ContextDataset&) const = default;
};

struct ExplanandumBundle {
  Process process;
  Ontology ontology;
  std::vector<Source> sources;
  ContextDataset context;
  std::map<std::string, GroundFragment> ground;
  Overview overview;

  const Source* find_source(std::string_view id) const;
  const Premise* find_premise(std::string_view id) const;
  /// Premise whose literal subject matches `subject` (`age(marco)`).
  const Premise* find_premise_by_subject(const Literal& subject) const;

  /// Concepts of an element id, looked up in the ontology then the context.
  std::vector<std::string> concepts_of(std::string_view id) const;
  /// Human-readable label, falling back to the id itself.
  std::string label(std::string_view id) const;

  bool operator==(const ExplanandumBundle&) const = default;
};

/// Number of parent edges from `concept_id` to its taxonomy root.
/// Throws BundleError("unknown-concept").
std::size_t abstraction_depth(const ExplanandumBundle& bundle, std::string_view concept_id);

/// Facts handed to the reasoner: true boolean premises plus every comparison
/// condition of the theory evaluated against the valued premises (the
/// condition if it holds, its complement otherwise).
std::set<Literal> ground_facts(const ExplanandumBundle& bundle);
std::set<Literal> ground_facts(const std::vector<Premise>& premises, const Theory& theory);

}  // namespace narrex
