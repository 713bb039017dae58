#include "narrex/space.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <sstream>

#include "narrex/error.hpp"

namespace narrex {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::incipit: return "Incipit";
    case Stage::core_information: return "CoreInformation";
    case Stage::marginal_information: return "MarginalInformation";
    case Stage::ground: return "Ground";
    case Stage::sources: return "Sources";
    case Stage::counterfactuals: return "Counterfactuals";
  }
  return "?";
}

std::string_view to_string(SubjectKind kind) {
  switch (kind) {
    case SubjectKind::purpose: return "purpose";
    case SubjectKind::overview: return "overview";
    case SubjectKind::justification: return "justification";
    case SubjectKind::input_hint: return "input-hint";
    case SubjectKind::conclusion: return "conclusion";
    case SubjectKind::fired_rule: return "fired-rule";
    case SubjectKind::premise: return "premise";
    case SubjectKind::involved_entity: return "involved-entity";
    case SubjectKind::ontology_concept: return "concept";
    case SubjectKind::unfired_rule: return "unfired-rule";
    case SubjectKind::rebuttal: return "rebuttal";
    case SubjectKind::refuted_literal: return "refuted-literal";
    case SubjectKind::context_entity: return "context-entity";
    case SubjectKind::ground_fragment: return "ground-fragment";
    case SubjectKind::source: return "source";
    case SubjectKind::counterfactual: return "counterfactual";
  }
  return "?";
}

Stage stage_of(SubjectKind kind) {
  switch (kind) {
    case SubjectKind::purpose:
    case SubjectKind::overview:
    case SubjectKind::justification:
    case SubjectKind::input_hint:
      return Stage::incipit;
    case SubjectKind::conclusion:
    case SubjectKind::fired_rule:
    case SubjectKind::premise:
    case SubjectKind::involved_entity:
    case SubjectKind::ontology_concept:
      return Stage::core_information;
    case SubjectKind::unfired_rule:
    case SubjectKind::rebuttal:
    case SubjectKind::refuted_literal:
    case SubjectKind::context_entity:
      return Stage::marginal_information;
    case SubjectKind::ground_fragment:
      return Stage::ground;
    case SubjectKind::source:
      return Stage::sources;
    case SubjectKind::counterfactual:
      return Stage::counterfactuals;
  }
  return Stage::incipit;
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::rule: return "rule";
    case ElementKind::literal: return "literal";
    case ElementKind::premise: return "premise";
    case ElementKind::entity: return "entity";
    case ElementKind::ontology_concept: return "concept";
    case ElementKind::source: return "source";
    case ElementKind::superiority: return "superiority";
  }
  return "?";
}

std::string to_string(const ElementRef& ref) { return std::string(to_string(ref.kind)) + ":" + ref.id; }

std::optional<ElementRef> parse_element_ref(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon + 1 >= text.size()) return std::nullopt;
  std::string_view kind = text.substr(0, colon);
  static constexpr std::array<ElementKind, 7> kinds = {ElementKind::rule,    ElementKind::literal,
                                                       ElementKind::premise, ElementKind::entity,
                                                       ElementKind::ontology_concept, ElementKind::source,
                                                       ElementKind::superiority};
  for (ElementKind k : kinds) {
    if (to_string(k) == kind) return ElementRef{k, std::string(text.substr(colon + 1))};
  }
  return std::nullopt;
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::expand: return "expand";
    case Action::ground: return "ground";
    case Action::source: return "source";
    case Action::mark: return "mark";
    case Action::whatif: return "whatif";
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view text) {
  for (Action a : {Action::expand, Action::ground, Action::source, Action::mark, Action::whatif}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

std::string_view to_string(Stance stance) { return stance == Stance::supports ? "supports" : "attacks"; }

std::optional<Stance> parse_stance(std::string_view text) {
  if (text == "supports") return Stance::supports;
  if (text == "attacks") return Stance::attacks;
  return std::nullopt;
}

const InfoNode* Explanans::find(std::string_view node_id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const InfoNode& n) { return n.id == node_id; });
  return it == nodes.end() ? nullptr : &*it;
}

bool Explanans::contains(SubjectKind kind, std::string_view subject_id) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [&](const InfoNode& n) { return n.subject.kind == kind && n.subject.id == subject_id; });
}

HeuristicOrder parse_heuristic_order(std::string_view text) {
  HeuristicOrder order{};
  std::set<HeuristicKey> seen;
  std::size_t count = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    HeuristicKey key;
    if (item == "relevance") {
      key = HeuristicKey::relevance;
    } else if (item == "abstraction") {
      key = HeuristicKey::abstraction;
    } else if (item == "simplicity") {
      key = HeuristicKey::simplicity;
    } else {
      throw Error("invalid-heuristic-order", "unknown heuristic key '" + std::string(item) + "'",
                  std::string(text));
    }
    if (count >= 3 || !seen.insert(key).second) {
      throw Error("invalid-heuristic-order", "heuristic keys must be a permutation of "
                                             "relevance,abstraction,simplicity", std::string(text));
    }
    order[count++] = key;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != 3) {
    throw Error("invalid-heuristic-order",
                "heuristic keys must be a permutation of relevance,abstraction,simplicity", std::string(text));
  }
  return order;
}

std::string to_string(const HeuristicOrder& order) {
  std::string out;
  for (HeuristicKey k : order) {
    if (!out.empty()) out += ',';
    out += k == HeuristicKey::relevance ? "relevance" : k == HeuristicKey::abstraction ? "abstraction" : "simplicity";
  }
  return out;
}

namespace {

std::uint32_t key_of(const Scores& s, HeuristicKey k) {
  switch (k) {
    case HeuristicKey::relevance: return s.relevance;
    case HeuristicKey::abstraction: return s.abstraction;
    case HeuristicKey::simplicity: return s.simplicity;
  }
  return 0;
}

std::uint32_t count_tokens(std::string_view text) {
  std::uint32_t n = 0;
  bool in_token = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c));
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

std::string node_id(std::size_t index) { return "n" + std::to_string(index); }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string premise_text(const Premise& p) {
  if (!p.value) return to_string(p.literal);
  return to_string(p.literal) + " = " + to_string(*p.value);
}

std::string rule_text(const Rule& r) {
  std::vector<std::string> ants;
  for (const Literal& a : r.antecedents) ants.push_back(to_string(a));
  std::string cond = ants.empty() ? "always" : join(ants, " AND ");
  return "IF " + cond + " THEN " + to_string(r.consequent);
}

bool has_element_node(const Explanans& e, const ElementRef& ref) {
  return std::any_of(e.nodes.begin(), e.nodes.end(), [&](const InfoNode& n) {
    return n.subject.element == ref && n.subject.kind != SubjectKind::ground_fragment;
  });
}

bool has_ground_node(const Explanans& e, const ElementRef& ref) {
  return std::any_of(e.nodes.begin(), e.nodes.end(), [&](const InfoNode& n) {
    return n.subject.kind == SubjectKind::ground_fragment && n.subject.element == ref;
  });
}

bool expandable_stage(Stage s) { return s == Stage::core_information || s == Stage::marginal_information; }

// Terminates a sentence unless the author already did.
std::string sentence(std::string_view text) {
  std::string out(text);
  if (!out.empty() && out.back() != '.' && out.back() != '!' && out.back() != '?') out += '.';
  return out;
}

std::string counted(std::size_t n, std::string_view noun) {
  return std::to_string(n) + " " + std::string(noun) + (n == 1 ? "" : "s");
}

std::string counterfactual_id(const CounterfactualResult& r) {
  std::vector<std::string> parts;
  for (const AppliedMutation& m : r.mutations) parts.push_back(to_string(m.premise) + "=" + to_string(m.new_value));
  return join(parts, ",");
}

}  // namespace

bool candidate_less(const CandidateAction& a, const CandidateAction& b, const HeuristicOrder& order) {
  for (HeuristicKey k : order) {
    std::uint32_t x = key_of(a.scores, k), y = key_of(b.scores, k);
    if (x != y) return x < y;
  }
  if (a.stage != b.stage) return a.stage < b.stage;
  if (a.interaction.target != b.interaction.target) return a.interaction.target < b.interaction.target;
  return a.interaction.action < b.interaction.action;
}

ExplanatorySpace::ExplanatorySpace(std::shared_ptr<const ExplanandumBundle> bundle, Derivation derivation,
                                   HeuristicOrder order)
    : bundle_(std::move(bundle)), derivation_(std::move(derivation)), order_(order) {
  if (bundle_->overview.decision) decision_ = bundle_->overview.decision->literal;
  if (bundle_->overview.mode == ExplanationMode::ex_post && !decision_) {
    throw Error("missing-decision", "an ex-post explanans needs the decision literal named in the overview");
  }
  build_graph();
  compute_relevance();
}

void ExplanatorySpace::build_graph() {
  const ExplanandumBundle& b = *bundle_;
  const Theory& theory = b.process.function;
  std::set<ElementRef> elements;
  std::set<std::pair<ElementRef, ElementRef>> edges;
  auto link = [&](const ElementRef& x, const ElementRef& y) {
    if (x == y) return;
    elements.insert(x);
    elements.insert(y);
    edges.insert({x, y});
    edges.insert({y, x});
  };
  auto concept_links = [&](const ElementRef& e, std::string_view id) {
    for (const std::string& c : b.concepts_of(id)) link(e, ElementRef{ElementKind::ontology_concept, c});
  };

  std::set<std::string> rule_ids, atoms;
  for (const Rule& r : theory.rules) {
    rule_ids.insert(r.id);
    atoms.insert(r.consequent.atom);
    for (const Literal& a : r.antecedents) atoms.insert(a.atom);
  }
  for (const Premise& p : b.process.inputs) {
    atoms.insert(p.literal.atom);
    if (!p.value || p.value->kind == Value::Kind::boolean) merged_premise_[p.literal] = p.id;
  }

  for (const Concept& c : b.ontology.concepts) {
    ElementRef ref{ElementKind::ontology_concept, c.id};
    elements.insert(ref);
    if (c.parent) link(ref, ElementRef{ElementKind::ontology_concept, *c.parent});
  }
  for (const Source& s : b.sources) elements.insert(ElementRef{ElementKind::source, s.id});

  auto entity_ref = [&](const std::string& term) {
    ElementRef e{ElementKind::entity, term};
    elements.insert(e);
    concept_links(e, term);
    return e;
  };
  auto literal_ref = [&](const Literal& lit) {
    if (auto it = merged_premise_.find(lit); it != merged_premise_.end()) {
      return ElementRef{ElementKind::premise, it->second};
    }
    ElementRef ref{ElementKind::literal, to_string(lit)};
    if (elements.insert(ref).second) {
      literal_of_.emplace(ref.id, lit);
      for (const std::string& arg : lit.args) {
        if (is_entity_term(arg)) link(ref, entity_ref(arg));
      }
      if (lit.comparison && lit.comparison->rhs.kind == Value::Kind::symbol) {
        link(ref, entity_ref(lit.comparison->rhs.symbol));
      }
      if (lit.comparison) {
        if (const Premise* p = b.find_premise_by_subject(lit.subject())) {
          link(ref, ElementRef{ElementKind::premise, p->id});
        }
      }
      concept_links(ref, lit.atom);
    }
    return ref;
  };

  for (const Premise& p : b.process.inputs) {
    ElementRef ref{ElementKind::premise, p.id};
    elements.insert(ref);
    for (const std::string& arg : p.literal.args) {
      if (is_entity_term(arg)) link(ref, entity_ref(arg));
    }
    if (p.value && p.value->kind == Value::Kind::symbol) link(ref, entity_ref(p.value->symbol));
    for (const std::string& s : p.source_refs) link(ref, ElementRef{ElementKind::source, s});
    concept_links(ref, p.literal.atom);
  }
  for (const Rule& r : theory.rules) {
    ElementRef ref{ElementKind::rule, r.id};
    elements.insert(ref);
    for (const Literal& a : r.antecedents) link(ref, literal_ref(a));
    link(ref, literal_ref(r.consequent));
    for (const std::string& s : r.source_refs) link(ref, ElementRef{ElementKind::source, s});
    concept_links(ref, r.id);
  }
  for (const Superiority& s : theory.superiority) {
    ElementRef ref{ElementKind::superiority, s.winner + ">" + s.loser};
    ElementRef w{ElementKind::rule, s.winner}, l{ElementKind::rule, s.loser};
    link(ref, w);
    link(ref, l);
    link(w, l);
  }
  if (decision_) decision_ref_ = literal_ref(*decision_);

  for (const auto& [entity, _] : b.context.entities) entity_ref(entity);
  for (const auto& [id, _] : b.ontology.entities) {
    if (!rule_ids.count(id) && !atoms.count(id)) entity_ref(id);
  }

  elements_.assign(elements.begin(), elements.end());
  for (const ElementRef& e : elements_) adjacency_[e];
  for (const auto& [x, y] : edges) adjacency_[x].push_back(y);

  // Entities mentioned by the inputs or by anything provable are directly
  // involved; the rest only belong to the context.
  for (const Premise& p : b.process.inputs) {
    for (const std::string& arg : p.literal.args) involved_.insert(arg);
    if (p.value && p.value->kind == Value::Kind::symbol) involved_.insert(p.value->symbol);
  }
  for (const auto& [lit, st] : derivation_.conclusions) {
    if (!st.defeasible) continue;
    for (const std::string& arg : lit.args) involved_.insert(arg);
    if (lit.comparison && lit.comparison->rhs.kind == Value::Kind::symbol) involved_.insert(lit.comparison->rhs.symbol);
  }

  for (const ElementRef& e : elements_) abstraction_[e] = compute_abstraction(e);
}

std::uint32_t ExplanatorySpace::typed_depth(std::string_view id) const {
  std::vector<std::string> concepts = bundle_->concepts_of(id);
  if (concepts.empty()) return 0;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const std::string& c : concepts) {
    if (bundle_->ontology.find_concept(c)) best = std::min(best, abstraction_depth(*bundle_, c));
  }
  return best == std::numeric_limits<std::size_t>::max() ? 0 : static_cast<std::uint32_t>(best + 1);
}

std::uint32_t ExplanatorySpace::compute_abstraction(const ElementRef& e) const {
  const auto literal_depth = [&](const Literal& lit) {
    if (std::uint32_t d = typed_depth(lit.atom)) return d;
    std::uint32_t best = 0;
    for (const std::string& arg : lit.args) {
      if (is_entity_term(arg)) best = std::max(best, typed_depth(arg));
    }
    return best;
  };
  switch (e.kind) {
    case ElementKind::ontology_concept: return static_cast<std::uint32_t>(abstraction_depth(*bundle_, e.id));
    case ElementKind::entity:
    case ElementKind::rule: return typed_depth(e.id);
    case ElementKind::literal: return literal_depth(literal_of_.at(e.id));
    case ElementKind::premise: return literal_depth(bundle_->find_premise(e.id)->literal);
    case ElementKind::source: return 0;
    case ElementKind::superiority: {
      auto gt = e.id.find('>');
      return std::max(typed_depth(e.id.substr(0, gt)), typed_depth(e.id.substr(gt + 1)));
    }
  }
  return 0;
}

std::vector<ElementRef> ExplanatorySpace::incipit_links(SubjectKind kind) const {
  const ExplanandumBundle& b = *bundle_;
  std::vector<ElementRef> out;
  auto add = [&](const ElementRef& e) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  auto premise_for = [&](const Literal& lit) -> std::optional<ElementRef> {
    if (auto it = merged_premise_.find(lit); it != merged_premise_.end()) {
      return ElementRef{ElementKind::premise, it->second};
    }
    if (lit.comparison) {
      if (const Premise* p = b.find_premise_by_subject(lit.subject())) return ElementRef{ElementKind::premise, p->id};
    }
    return std::nullopt;
  };
  auto element_for = [&](const Literal& lit) {
    if (auto p = premise_for(lit); p && !lit.comparison) return *p;
    return ElementRef{ElementKind::literal, to_string(lit)};
  };

  switch (kind) {
    case SubjectKind::overview:
      for (const Rule& r : b.process.function.rules) add(ElementRef{ElementKind::rule, r.id});
      for (const Premise& p : b.process.inputs) add(ElementRef{ElementKind::premise, p.id});
      break;
    case SubjectKind::input_hint:
      for (const Premise& p : b.process.inputs) add(ElementRef{ElementKind::premise, p.id});
      break;
    case SubjectKind::justification: {
      if (!decision_) break;
      const Literal& d = *decision_;
      if (derivation_.provable(d) || derivation_.provable(d.complement())) {
        // Conclusions, the causal chain and the premises it consumed.
        for (const FiringRecord& f : derivation_.causal_chain) add(element_for(f.consequent));
        for (const FiringRecord& f : derivation_.causal_chain) add(ElementRef{ElementKind::rule, f.rule});
        for (const FiringRecord& f : derivation_.causal_chain) {
          for (const Literal& a : f.satisfied_antecedents) {
            if (auto p = premise_for(a)) add(*p);
          }
        }
      } else {
        add(*decision_ref_);
        for (const Rule& r : b.process.function.rules) {
          if (r.consequent == d || r.consequent == d.complement()) add(ElementRef{ElementKind::rule, r.id});
        }
      }
      break;
    }
    default:
      break;
  }
  return out;
}

void ExplanatorySpace::compute_relevance() {
  std::vector<ElementRef> zero;
  if (bundle_->overview.mode == ExplanationMode::ex_post) {
    zero = incipit_links(SubjectKind::justification);
    if (decision_ref_) zero.push_back(*decision_ref_);
  } else {
    zero = incipit_links(SubjectKind::overview);
  }
  std::deque<ElementRef> queue;
  for (const ElementRef& e : zero) {
    if (relevance_.emplace(e, 0).second) queue.push_back(e);
  }
  while (!queue.empty()) {
    ElementRef cur = queue.front();
    queue.pop_front();
    std::uint32_t d = relevance_.at(cur);
    for (const ElementRef& next : links(cur)) {
      if (relevance_.emplace(next, d + 1).second) queue.push_back(next);
    }
  }
}

SubjectKind ExplanatorySpace::classify(const ElementRef& e) const {
  switch (e.kind) {
    case ElementKind::rule: return derivation_.fired(e.id) ? SubjectKind::fired_rule : SubjectKind::unfired_rule;
    case ElementKind::literal:
      return derivation_.provable(literal_of_.at(e.id)) ? SubjectKind::conclusion : SubjectKind::refuted_literal;
    case ElementKind::premise: return SubjectKind::premise;
    case ElementKind::entity: return involved_.count(e.id) ? SubjectKind::involved_entity : SubjectKind::context_entity;
    case ElementKind::ontology_concept: return SubjectKind::ontology_concept;
    case ElementKind::source: return SubjectKind::source;
    case ElementKind::superiority: return SubjectKind::rebuttal;
  }
  return SubjectKind::ontology_concept;
}

const std::vector<ElementRef>& ExplanatorySpace::links(const ElementRef& e) const {
  static const std::vector<ElementRef> none;
  auto it = adjacency_.find(e);
  return it == adjacency_.end() ? none : it->second;
}

std::uint32_t ExplanatorySpace::relevance(const ElementRef& e) const {
  auto it = relevance_.find(e);
  return it == relevance_.end() ? kUnreachable : it->second;
}

std::uint32_t ExplanatorySpace::abstraction(const ElementRef& e) const {
  auto it = abstraction_.find(e);
  return it == abstraction_.end() ? 0 : it->second;
}

const GroundFragment* ExplanatorySpace::fragment_for(const ElementRef& e) const {
  if (e.kind != ElementKind::rule && e.kind != ElementKind::premise && e.kind != ElementKind::literal) return nullptr;
  auto it = bundle_->ground.find(e.id);
  return it == bundle_->ground.end() ? nullptr : &it->second;
}

std::vector<std::string> ExplanatorySpace::source_refs(const ElementRef& e) const {
  if (e.kind == ElementKind::rule) return bundle_->process.function.find_rule(e.id)->source_refs;
  if (e.kind == ElementKind::premise) return bundle_->find_premise(e.id)->source_refs;
  return {};
}

std::string ExplanatorySpace::render_element(const ElementRef& e, SubjectKind kind) const {
  const ExplanandumBundle& b = *bundle_;
  std::ostringstream out;
  auto labelled = [&](const std::string& id) {
    std::string l = b.label(id);
    return l == id ? id : id + " (" + l + ")";
  };
  switch (e.kind) {
    case ElementKind::rule: {
      const Rule& r = *b.process.function.find_rule(e.id);
      out << "Rule " << labelled(r.id) << ", " << to_string(r.kind) << ": " << rule_text(r) << ".";
      if (r.jurisdiction) out << " Jurisdiction: " << *r.jurisdiction << ".";
      if (kind == SubjectKind::fired_rule) {
        for (const FiringRecord& f : derivation_.causal_chain) {
          if (f.rule == r.id) out << " Fired at step " << f.step << " of the causal chain.";
        }
      } else {
        std::string reason;
        for (const auto& [lit, j] : derivation_.justifications) {
          for (const DefeatedRule& d : j.defeated_rules) {
            if (d.rule == r.id && j.winning_rule) {
              reason = "defeated by " + *j.winning_rule + " (" + std::string(to_string(d.reason)) + ")";
            } else if (d.rule == r.id && reason.empty()) {
              reason = std::string(to_string(d.reason));
            }
          }
        }
        if (reason.empty()) {
          bool applicable = std::all_of(r.antecedents.begin(), r.antecedents.end(),
                                        [&](const Literal& a) { return derivation_.provable(a); });
          reason = r.kind == RuleKind::defeater ? "defeaters only block conclusions"
                   : applicable                 ? "its conclusion is blocked by a conflicting rule"
                                                : "inapplicable-antecedent";
        }
        out << " Not fired: " << reason << ".";
      }
      for (const auto& [k, v] : r.annotations) out << " " << k << ": " << v << ".";
      break;
    }
    case ElementKind::literal: {
      const Literal& lit = literal_of_.at(e.id);
      ProofStatus st = derivation_.status(lit);
      std::string atom_label = b.label(lit.atom);
      out << (lit.comparison ? "Condition " : "Conclusion ") << e.id;
      if (atom_label != lit.atom) out << " (" << atom_label << ")";
      if (st.definite) {
        out << " is definitely provable (+Δ)";
      } else if (st.defeasible) {
        out << " is defeasibly provable (+∂)";
      } else {
        out << " is not provable (−∂)";
      }
      if (auto jt = derivation_.justifications.find(lit); jt != derivation_.justifications.end() && st.defeasible) {
        if (jt->second.winning_rule) {
          out << ", concluded by rule " << *jt->second.winning_rule;
        } else {
          out << " given the premises";
        }
      }
      out << ".";
      break;
    }
    case ElementKind::premise: {
      const Premise& p = *b.find_premise(e.id);
      out << "Premise " << p.id << ": " << premise_text(p);
      std::string atom_label = b.label(p.literal.atom);
      if (atom_label != p.literal.atom) out << " (" << atom_label << ")";
      out << ".";
      break;
    }
    case ElementKind::entity: {
      out << (kind == SubjectKind::context_entity ? "Context entity " : "Entity ") << labelled(e.id);
      std::vector<std::string> concepts;
      for (const std::string& c : b.concepts_of(e.id)) concepts.push_back(b.label(c));
      if (concepts.empty()) {
        out << " is not aligned to any concept.";
      } else {
        out << " is classified as " << join(concepts, ", ") << ".";
      }
      break;
    }
    case ElementKind::ontology_concept: {
      const Concept* c = b.ontology.find_concept(e.id);
      out << "Concept " << labelled(e.id);
      if (c && c->parent) {
        out << " is a kind of " << b.label(*c->parent) << ".";
      } else {
        out << " is a top-level concept.";
      }
      break;
    }
    case ElementKind::source: {
      const Source& s = *b.find_source(e.id);
      out << "Source " << s.id << ": " << sentence(s.title);
      if (!s.citation.empty()) out << " " << sentence(s.citation);
      if (s.uri) out << " " << *s.uri;
      if (s.excerpt) out << " Excerpt: \"" << *s.excerpt << "\"";
      break;
    }
    case ElementKind::superiority: {
      auto gt = e.id.find('>');
      std::string w = e.id.substr(0, gt), l = e.id.substr(gt + 1);
      const Superiority* s = b.process.function.find_superiority(w, l);
      const Rule* wr = b.process.function.find_rule(w);
      out << "Rebuttal: rule " << labelled(w) << " prevails over rule " << labelled(l) << " on "
          << to_string(wr->consequent);
      if (s && !s->note.empty()) out << ": " << s->note;
      out << ".";
      break;
    }
  }
  return out.str();
}

InfoNode ExplanatorySpace::element_node(const ElementRef& e, std::size_t index) const {
  InfoNode n;
  n.id = node_id(index);
  n.subject = Subject{classify(e), e.id, e};
  n.stage = stage_of(n.subject.kind);
  n.rendering = render_element(e, n.subject.kind);
  n.links = links(e);
  n.complexity_weight = count_tokens(n.rendering) + static_cast<std::uint32_t>(n.links.size());
  return n;
}

InfoNode ExplanatorySpace::ground_node(const ElementRef& e, std::size_t index) const {
  const GroundFragment& g = *fragment_for(e);
  InfoNode n;
  n.id = node_id(index);
  n.subject = Subject{SubjectKind::ground_fragment, to_string(e), e};
  n.stage = Stage::ground;
  n.rendering = "Ground of " + e.id + " in its original format (" + g.format + "):\n" + g.text;
  n.links = {e};
  n.fragment = g;
  n.complexity_weight = count_tokens(n.rendering) + 1;
  return n;
}

InfoNode ExplanatorySpace::source_node(const ElementRef& source, std::size_t index) const {
  return element_node(source, index);
}

void ExplanatorySpace::order_elements(std::vector<ElementRef>& elements) const {
  std::stable_sort(elements.begin(), elements.end(), [&](const ElementRef& a, const ElementRef& b) {
    Stage sa = stage_of(classify(a)), sb = stage_of(classify(b));
    if (sa != sb) return sa < sb;
    Scores x{relevance(a), abstraction(a), 0}, y{relevance(b), abstraction(b), 0};
    for (HeuristicKey k : order_) {
      if (key_of(x, k) != key_of(y, k)) return key_of(x, k) < key_of(y, k);
    }
    return a < b;
  });
}

std::vector<ElementRef> ExplanatorySpace::expandable(const Explanans& e, const InfoNode& node) const {
  std::vector<ElementRef> out;
  for (const ElementRef& ref : node.links) {
    if (!expandable_stage(stage_of(classify(ref)))) continue;
    if (has_element_node(e, ref)) continue;
    if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(ref);
  }
  order_elements(out);
  return out;
}

std::vector<ElementRef> ExplanatorySpace::missing_sources(const Explanans& e, const InfoNode& node) const {
  std::vector<ElementRef> out;
  if (!node.subject.element || node.subject.kind == SubjectKind::ground_fragment) return out;
  for (const std::string& s : source_refs(*node.subject.element)) {
    ElementRef ref{ElementKind::source, s};
    if (!has_element_node(e, ref) && std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(ref);
  }
  return out;
}

Explanans ExplanatorySpace::initial_explanans() const {
  const ExplanandumBundle& b = *bundle_;
  const Overview& o = b.overview;
  Explanans e;

  auto push = [&](SubjectKind kind, std::string id, std::string rendering) {
    InfoNode n;
    n.id = node_id(e.nodes.size());
    n.subject = Subject{kind, std::move(id), std::nullopt};
    n.stage = stage_of(kind);
    n.rendering = std::move(rendering);
    n.links = incipit_links(kind);
    n.complexity_weight = count_tokens(n.rendering) + static_cast<std::uint32_t>(n.links.size());
    e.nodes.push_back(std::move(n));
    e.provenance.push_back(std::nullopt);
  };

  {
    std::ostringstream r;
    r << "Purpose: " << (o.purpose.empty() ? "not stated." : sentence(o.purpose)) << " Mode: ";
    r << (o.mode == ExplanationMode::ex_post ? "ex-post explanation of an automated decision that has been taken."
                                             : "ex-ante explanation of an automated decision process.");
    push(SubjectKind::purpose, "purpose", r.str());
  }
  {
    const Theory& t = b.process.function;
    std::ostringstream r;
    r << "Explanandum overview: a knowledge base of " << counted(t.rules.size(), "rule") << " and "
      << counted(t.superiority.size(), "superiority relation") << ", a process with "
      << counted(b.process.inputs.size(), "input premise") << ", " << counted(b.ontology.concepts.size(), "ontology concept")
      << " and " << counted(b.sources.size(), "source") << ".";
    if (!o.language.empty()) r << " Language: " << sentence(o.language);
    if (!o.representation.empty()) r << " Representation: " << sentence(o.representation);
    if (!o.pipeline.empty()) r << " Pipeline: " << sentence(o.pipeline);
    if (!o.data.empty()) r << " Data: " << sentence(o.data);
    if (!o.jurisdiction.empty()) r << " Jurisdiction: " << sentence(o.jurisdiction);
    if (!o.consequences.empty()) r << " Possible consequences: " << sentence(o.consequences);
    if (o.mode == ExplanationMode::ex_post && !o.runtime_context.empty()) {
      std::vector<std::string> kv;
      for (const auto& [k, v] : o.runtime_context) kv.push_back(k + "=" + v);
      r << " Runtime context: " << join(kv, "; ") << ".";
    }
    push(SubjectKind::overview, "overview", r.str());
  }
  if (o.mode == ExplanationMode::ex_post) {
    const DecisionSpec& d = *o.decision;
    std::ostringstream r;
    auto because = [&](const Literal& lit) {
      std::vector<std::string> names;
      for (const std::string& rule : deciding_rules(derivation_, lit)) names.push_back(b.label(rule) + " (rule " + rule + ")");
      return join(names, " and ");
    };
    if (derivation_.provable(d.literal)) {
      r << "Decision: " << (d.holds_label.empty() ? to_string(d.literal) : d.holds_label) << " ["
        << to_string(d.literal) << "] because of " << because(d.literal) << ".";
    } else if (derivation_.provable(d.literal.complement())) {
      r << "Decision: " << (d.fails_label.empty() ? to_string(d.literal.complement()) : d.fails_label) << " ["
        << to_string(d.literal.complement()) << "] because of " << because(d.literal.complement()) << ".";
    } else {
      r << "Decision: " << (d.fails_label.empty() ? "not reached" : d.fails_label) << ": "
        << to_string(d.literal) << " could not be derived from the premises.";
    }
    push(SubjectKind::justification, to_string(d.literal), r.str());
  }
  if (!b.process.inputs.empty()) {
    std::vector<std::string> inputs;
    for (const Premise& p : b.process.inputs) inputs.push_back(premise_text(p));
    push(SubjectKind::input_hint, "inputs",
         "The process has inputs that can be changed to test whether the justification holds: " +
             join(inputs, "; ") + ". Use whatif <premise>=<value> to try an alternative.");
  }
  e.initial_size = e.nodes.size();
  return e;
}

std::string ExplanatorySpace::resolve_target(const Explanans& e, std::string_view target) const {
  if (const InfoNode* n = e.find(target)) return n->id;
  std::optional<ElementRef> ref = parse_element_ref(target);
  for (const InfoNode& n : e.nodes) {
    if (!n.subject.element || n.subject.kind == SubjectKind::ground_fragment) continue;
    if (ref ? *n.subject.element == *ref : n.subject.element->id == target) return n.id;
  }
  throw InteractionError("unknown-target", "no node in the explanans matches '" + std::string(target) + "'",
                         std::string(target));
}

std::vector<Action> ExplanatorySpace::admissible_actions(const InfoNode& node) const {
  std::vector<Action> out;
  bool expand = std::any_of(node.links.begin(), node.links.end(),
                            [&](const ElementRef& r) { return expandable_stage(stage_of(classify(r))); });
  if (expand) out.push_back(Action::expand);
  if (node.subject.element && node.subject.kind != SubjectKind::ground_fragment) {
    if (fragment_for(*node.subject.element)) out.push_back(Action::ground);
    if (!source_refs(*node.subject.element).empty()) out.push_back(Action::source);
  }
  out.push_back(Action::mark);
  return out;
}

Explanans ExplanatorySpace::step(const Explanans& explanans, const Interaction& interaction) const {
  Explanans out = explanans;
  const std::size_t event = out.history.size();
  auto append = [&](InfoNode node) {
    out.nodes.push_back(std::move(node));
    out.provenance.push_back(event);
  };

  if (interaction.action == Action::whatif) {
    if (interaction.mutations.empty()) {
      throw InteractionError("malformed-arguments", "whatif needs at least one premise mutation");
    }
    if (!interaction.target.empty()) resolve_target(explanans, interaction.target);
    CounterfactualResult result = whatif(*bundle_, derivation_, interaction.mutations);
    std::string id = counterfactual_id(result);
    if (explanans.contains(SubjectKind::counterfactual, id)) {
      throw InteractionError("already-present", "the what-if " + id + " is already in the explanans", id);
    }
    InfoNode n;
    n.id = node_id(out.nodes.size());
    n.subject = Subject{SubjectKind::counterfactual, id, std::nullopt};
    n.stage = Stage::counterfactuals;
    std::ostringstream r;
    std::vector<std::string> changes;
    for (const AppliedMutation& m : result.mutations) {
      changes.push_back(to_string(m.premise) + " = " + to_string(m.new_value) + " (instead of " +
                        to_string(m.old_value) + ")");
    }
    r << "What if " << join(changes, " and ") << "? ";
    if (bundle_->overview.decision) {
      const DecisionSpec& d = *bundle_->overview.decision;
      bool holds = result.new_derivation.provable(d.literal);
      std::string outcome = holds ? d.holds_label : d.fails_label;
      if (outcome.empty()) outcome = to_string(d.literal) + (holds ? " holds" : " does not hold");
      r << (result.decision_changed ? "The decision changes: " : "The decision does not change: ") << outcome << ".";
    }
    std::vector<std::string> flips;
    for (const FlippedLiteral& f : result.diff.flipped) {
      flips.push_back(to_string(f.literal) + (f.was_provable ? " +∂ → −∂" : " −∂ → +∂"));
    }
    if (!flips.empty()) r << " Flipped: " << join(flips, "; ") << ".";
    if (!result.diff.newly_fired.empty()) r << " Newly fired: " << join(result.diff.newly_fired, ", ") << ".";
    if (!result.diff.no_longer_fired.empty()) {
      r << " No longer fired: " << join(result.diff.no_longer_fired, ", ") << ".";
    }
    if (result.diff.empty()) r << " No conclusion changes.";
    n.rendering = r.str();
    n.complexity_weight = count_tokens(n.rendering);
    n.counterfactual = std::move(result);
    out.history.push_back(interaction);
    append(std::move(n));
    return out;
  }

  const std::string target = resolve_target(explanans, interaction.target);
  const InfoNode& node = *explanans.find(target);

  switch (interaction.action) {
    case Action::expand: {
      std::vector<ElementRef> fresh = expandable(explanans, node);
      if (fresh.empty()) {
        throw InteractionError("nothing-to-expand", "nothing to expand from " + target, target);
      }
      out.history.push_back(interaction);
      for (const ElementRef& ref : fresh) append(element_node(ref, out.nodes.size()));
      return out;
    }
    case Action::ground: {
      if (!node.subject.element || node.subject.kind == SubjectKind::ground_fragment ||
          !fragment_for(*node.subject.element)) {
        throw InteractionError("not-applicable", "node " + target + " has no ground fragment", target);
      }
      if (has_ground_node(explanans, *node.subject.element)) {
        throw InteractionError("already-present", "node " + target + " is already grounded", target);
      }
      out.history.push_back(interaction);
      append(ground_node(*node.subject.element, out.nodes.size()));
      return out;
    }
    case Action::source: {
      if (!node.subject.element || source_refs(*node.subject.element).empty() ||
          node.subject.kind == SubjectKind::ground_fragment) {
        throw InteractionError("not-applicable", "node " + target + " cites no source", target);
      }
      std::vector<ElementRef> fresh = missing_sources(explanans, node);
      if (fresh.empty()) {
        throw InteractionError("already-present", "the sources of " + target + " are already shown", target);
      }
      out.history.push_back(interaction);
      for (const ElementRef& ref : fresh) append(source_node(ref, out.nodes.size()));
      return out;
    }
    case Action::mark: {
      if (std::all_of(interaction.claim.begin(), interaction.claim.end(),
                      [](unsigned char c) { return std::isspace(c); })) {
        throw InteractionError("empty-claim", "a marked argument needs a claim", target);
      }
      out.history.push_back(interaction);
      return out;
    }
    case Action::whatif:
      break;
  }
  throw InteractionError("malformed-arguments", "unsupported action");
}

std::vector<CandidateAction> ExplanatorySpace::available_actions(const Explanans& e) const {
  std::vector<CandidateAction> out;
  auto score = [&](CandidateAction& c, const std::vector<InfoNode>& nodes) {
    c.scores = Scores{0, 0, 0};
    c.stage = Stage::counterfactuals;
    for (const InfoNode& n : nodes) {
      const ElementRef& ref = *n.subject.element;
      std::uint32_t abs = abstraction(ref) + (n.subject.kind == SubjectKind::ground_fragment ? 1 : 0);
      c.scores.relevance = std::max(c.scores.relevance, relevance(ref));
      c.scores.abstraction = std::max(c.scores.abstraction, abs);
      c.scores.simplicity += n.complexity_weight;
      c.stage = std::min(c.stage, n.stage);
      c.appends.push_back(n.subject);
    }
  };
  for (const InfoNode& node : e.nodes) {
    std::size_t next = e.nodes.size();
    if (std::vector<ElementRef> fresh = expandable(e, node); !fresh.empty()) {
      CandidateAction c;
      c.interaction.action = Action::expand;
      c.interaction.target = node.id;
      std::vector<InfoNode> nodes;
      for (const ElementRef& ref : fresh) nodes.push_back(element_node(ref, next++));
      score(c, nodes);
      out.push_back(std::move(c));
    }
    if (!node.subject.element || node.subject.kind == SubjectKind::ground_fragment) continue;
    const ElementRef& ref = *node.subject.element;
    if (fragment_for(ref) && !has_ground_node(e, ref)) {
      CandidateAction c;
      c.interaction.action = Action::ground;
      c.interaction.target = node.id;
      score(c, {ground_node(ref, e.nodes.size())});
      out.push_back(std::move(c));
    }
    if (std::vector<ElementRef> fresh = missing_sources(e, node); !fresh.empty()) {
      CandidateAction c;
      c.interaction.action = Action::source;
      c.interaction.target = node.id;
      std::vector<InfoNode> nodes;
      next = e.nodes.size();
      for (const ElementRef& s : fresh) nodes.push_back(source_node(s, next++));
      score(c, nodes);
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [&](const CandidateAction& a, const CandidateAction& b) { return candidate_less(a, b, order_); });
  return out;
}

Explanans initial_explanans(const ExplanandumBundle& bundle, const Derivation& derivation) {
  return ExplanatorySpace(std::make_shared<const ExplanandumBundle>(bundle), derivation).initial_explanans();
}

Explanans step(const ExplanandumBundle& bundle, const Derivation& derivation, const Explanans& explanans,
               const Interaction& interaction) {
  return ExplanatorySpace(std::make_shared<const ExplanandumBundle>(bundle), derivation).step(explanans, interaction);
}

std::vector<CandidateAction> available_actions(const ExplanandumBundle& bundle, const Derivation& derivation,
                                               const Explanans& explanans) {
  return ExplanatorySpace(std::make_shared<const ExplanandumBundle>(bundle), derivation).available_actions(explanans);
}

std::uint32_t relevance_score(const ExplanandumBundle& bundle, const Derivation& derivation,
                              const Explanans& explanans, const ElementRef& element) {
  for (std::size_t i = 0; i < explanans.initial_size && i < explanans.nodes.size(); ++i) {
    if (explanans.nodes[i].subject.kind == SubjectKind::justification &&
        explanans.nodes[i].subject.id == element.id && element.kind == ElementKind::literal) {
      return 0;
    }
  }
  return ExplanatorySpace(std::make_shared<const ExplanandumBundle>(bundle), derivation).relevance(element);
}

nlohmann::json to_json(const InfoNode& n) {
  nlohmann::json links = nlohmann::json::array();
  for (const ElementRef& l : n.links) links.push_back(to_string(l));
  nlohmann::json subject = {{"kind", std::string(to_string(n.subject.kind))}, {"id", n.subject.id}};
  if (n.subject.element) subject["element"] = to_string(*n.subject.element);
  nlohmann::json j = {{"id", n.id},
                      {"stage", std::string(to_string(n.stage))},
                      {"subject", std::move(subject)},
                      {"rendering", n.rendering},
                      {"complexity_weight", n.complexity_weight},
                      {"links", std::move(links)}};
  if (n.fragment) j["fragment"] = {{"format", n.fragment->format}, {"text", n.fragment->text}};
  if (n.counterfactual) j["counterfactual"] = to_json(*n.counterfactual);
  return j;
}

nlohmann::json to_json(const Interaction& i) {
  nlohmann::json j = {{"action", std::string(to_string(i.action))}};
  if (!i.target.empty()) j["target"] = i.target;
  if (i.action == Action::mark) {
    j["stance"] = std::string(to_string(i.stance));
    j["claim"] = i.claim;
    if (i.argument_target) j["argument_target"] = *i.argument_target;
  }
  if (i.action == Action::whatif) {
    nlohmann::json muts = nlohmann::json::array();
    for (const MutationRequest& m : i.mutations) {
      nlohmann::json v;
      switch (m.value.kind) {
        case Value::Kind::boolean: v = m.value.flag; break;
        case Value::Kind::number: v = m.value.number; break;
        case Value::Kind::symbol: v = m.value.symbol; break;
      }
      muts.push_back({{"premise", m.premise}, {"value", std::move(v)}});
    }
    j["mutations"] = std::move(muts);
  }
  return j;
}

nlohmann::json to_json(const Explanans& e) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < e.nodes.size(); ++i) {
    nlohmann::json n = to_json(e.nodes[i]);
    n["provenance"] = e.provenance[i] ? nlohmann::json(*e.provenance[i]) : nlohmann::json(nullptr);
    nodes.push_back(std::move(n));
  }
  nlohmann::json history = nlohmann::json::array();
  for (const Interaction& i : e.history) history.push_back(to_json(i));
  return {{"nodes", std::move(nodes)}, {"history", std::move(history)}, {"initial_size", e.initial_size}};
}

nlohmann::json to_json(const CandidateAction& c) {
  nlohmann::json appends = nlohmann::json::array();
  for (const Subject& s : c.appends) {
    appends.push_back({{"kind", std::string(to_string(s.kind))}, {"id", s.id}});
  }
  return {{"interaction", to_json(c.interaction)},
          {"scores",
           {{"relevance", c.scores.relevance},
            {"abstraction", c.scores.abstraction},
            {"simplicity", c.scores.simplicity}}},
          {"stage", std::string(to_string(c.stage))},
          {"appends", std::move(appends)}};
}

nlohmann::json to_json(const std::vector<CandidateAction>& candidates) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CandidateAction& c : candidates) arr.push_back(to_json(c));
  return arr;
}

Interaction interaction_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& what) -> InteractionError {
    return InteractionError("malformed-arguments", "malformed interaction: " + what);
  };
  if (!j.is_object()) throw bad("expected an object");
  Interaction i;
  if (!j.contains("action") || !j["action"].is_string()) throw bad("missing 'action'");
  auto action = parse_action(j["action"].get<std::string>());
  if (!action) throw bad("unknown action '" + j["action"].get<std::string>() + "'");
  i.action = *action;
  if (j.contains("target")) {
    if (!j["target"].is_string()) throw bad("'target' must be a string");
    i.target = j["target"].get<std::string>();
  }
  if (i.action != Action::whatif && i.target.empty()) throw bad("missing 'target'");
  if (i.action == Action::mark) {
    if (!j.contains("stance") || !j["stance"].is_string()) throw bad("missing 'stance'");
    auto stance = parse_stance(j["stance"].get<std::string>());
    if (!stance) throw bad("stance must be supports or attacks");
    i.stance = *stance;
    if (!j.contains("claim") || !j["claim"].is_string()) throw bad("missing 'claim'");
    i.claim = j["claim"].get<std::string>();
    if (j.contains("argument_target")) {
      if (!j["argument_target"].is_string()) throw bad("'argument_target' must be a string");
      i.argument_target = j["argument_target"].get<std::string>();
    }
  }
  if (i.action == Action::whatif) {
    if (!j.contains("mutations") || !j["mutations"].is_array()) throw bad("missing 'mutations'");
    for (const auto& m : j["mutations"]) {
      if (!m.is_object() || !m.contains("premise") || !m["premise"].is_string() || !m.contains("value")) {
        throw bad("each mutation needs 'premise' and 'value'");
      }
      const auto& v = m["value"];
      Value value;
      if (v.is_boolean()) {
        value = Value::of_bool(v.get<bool>());
      } else if (v.is_number()) {
        value = Value::of_number(v.get<double>());
      } else if (v.is_string()) {
        auto parsed = parse_value(v.get<std::string>());
        if (!parsed) throw bad("bad mutation value");
        value = *parsed;
      } else {
        throw bad("bad mutation value");
      }
      i.mutations.push_back(MutationRequest{m["premise"].get<std::string>(), value});
    }
  }
  return i;
}

}  // namespace narrex
