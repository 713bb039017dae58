#include "narrex/bundle.hpp"

#include <algorithm>

#include "narrex/error.hpp"

namespace narrex {

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::strict: return "strict";
    case RuleKind::defeasible: return "defeasible";
    case RuleKind::defeater: return "defeater";
  }
  return "?";
}

std::string_view to_string(ExplanationMode mode) {
  return mode == ExplanationMode::ex_post ? "ex-post" : "ex-ante";
}

const Rule* Theory::find_rule(std::string_view id) const {
  auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.id == id; });
  return it == rules.end() ? nullptr : &*it;
}

const Superiority* Theory::find_superiority(std::string_view winner, std::string_view loser) const {
  auto it = std::find_if(superiority.begin(), superiority.end(), [&](const Superiority& s) {
    return s.winner == winner && s.loser == loser;
  });
  return it == superiority.end() ? nullptr : &*it;
}

bool Theory::superior(std::string_view winner, std::string_view loser) const {
  return find_superiority(winner, loser) != nullptr;
}

const Concept* Ontology::find_concept(std::string_view id) const {
  auto it = std::find_if(concepts.begin(), concepts.end(), [&](const Concept& c) { return c.id == id; });
  return it == concepts.end() ? nullptr : &*it;
}

const Source* ExplanandumBundle::find_source(std::string_view id) const {
  auto it = std::find_if(sources.begin(), sources.end(), [&](const Source& s) { return s.id == id; });
  return it == sources.end() ? nullptr : &*it;
}

const Premise* ExplanandumBundle::find_premise(std::string_view id) const {
  const auto& inputs = process.inputs;
  auto it = std::find_if(inputs.begin(), inputs.end(), [&](const Premise& p) { return p.id == id; });
  return it == inputs.end() ? nullptr : &*it;
}

const Premise* ExplanandumBundle::find_premise_by_subject(const Literal& subject) const {
  const auto& inputs = process.inputs;
  auto it = std::find_if(inputs.begin(), inputs.end(),
                         [&](const Premise& p) { return p.literal == subject; });
  return it == inputs.end() ? nullptr : &*it;
}

std::vector<std::string> ExplanandumBundle::concepts_of(std::string_view id) const {
  std::string key(id);
  if (auto it = ontology.entities.find(key); it != ontology.entities.end()) return it->second;
  if (auto it = context.entities.find(key); it != context.entities.end()) return it->second;
  return {};
}

std::string ExplanandumBundle::label(std::string_view id) const {
  std::string key(id);
  if (auto it = ontology.labels.find(key); it != ontology.labels.end()) return it->second;
  if (auto it = context.labels.find(key); it != context.labels.end()) return it->second;
  return key;
}

std::size_t abstraction_depth(const ExplanandumBundle& bundle, std::string_view concept_id) {
  const Concept* c = bundle.ontology.find_concept(concept_id);
  if (!c) {
    throw BundleError("unknown-concept", "unknown concept '" + std::string(concept_id) + "'",
                      std::string(concept_id));
  }
  // The parser rejects cycles, so the walk terminates; the bound guards
  // against hand-built bundles.
  std::size_t depth = 0;
  const std::size_t bound = bundle.ontology.concepts.size();
  while (c->parent) {
    c = bundle.ontology.find_concept(*c->parent);
    if (!c || ++depth > bound) {
      throw BundleError("taxonomy-cycle", "broken taxonomy above '" + std::string(concept_id) + "'");
    }
  }
  return depth;
}

std::set<Literal> ground_facts(const std::vector<Premise>& premises, const Theory& theory) {
  std::set<Literal> facts;
  std::set<Literal> conditions;
  for (const Rule& rule : theory.rules) {
    for (const Literal& a : rule.antecedents) {
      if (a.comparison) conditions.insert(a.atom_key());
    }
    if (rule.consequent.comparison) conditions.insert(rule.consequent.atom_key());
  }
  for (const Premise& p : premises) {
    if (!p.value || (p.value->kind == Value::Kind::boolean)) {
      // A premise set to false asserts the complement, like a failed comparison.
      facts.insert(!p.value || p.value->flag ? p.literal : p.literal.complement());
      continue;
    }
    for (const Literal& cond : conditions) {
      if (cond.modality != p.literal.modality || cond.subject() != p.literal.subject()) continue;
      facts.insert(cond.comparison->holds(*p.value) ? cond : cond.complement());
    }
  }
  return facts;
}

std::set<Literal> ground_facts(const ExplanandumBundle& bundle) {
  return ground_facts(bundle.process.inputs, bundle.process.function);
}

}  // namespace narrex
