#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "narrex/bundle.hpp"
#include "narrex/counterfactual.hpp"
#include "narrex/reasoner.hpp"

namespace narrex {

/// The six stages of the explanatory space, in presentation order.
enum class Stage {
  incipit,
  core_information,
  marginal_information,
  ground,
  sources,
  counterfactuals,
};

inline constexpr std::array<Stage, 6> kAllStages = {
    Stage::incipit,         Stage::core_information, Stage::marginal_information,
    Stage::ground,          Stage::sources,          Stage::counterfactuals,
};

std::string_view to_string(Stage stage);

/// What an information node talks about. Classification of bundle elements
/// into these kinds depends on the derivation (a rule is fired or not); the
/// stage then follows from the kind alone.
enum class SubjectKind {
  purpose,
  overview,
  justification,
  input_hint,
  conclusion,
  fired_rule,
  premise,
  involved_entity,
  ontology_concept,
  unfired_rule,
  rebuttal,
  refuted_literal,
  context_entity,
  ground_fragment,
  source,
  counterfactual,
};

std::string_view to_string(SubjectKind kind);
Stage stage_of(SubjectKind kind);

enum class ElementKind { rule, literal, premise, entity, ontology_concept, source, superiority };

std::string_view to_string(ElementKind kind);

/// Reference to one element of the explanandum. Ids: rule/premise/entity/
/// concept/source ids, canonical literal text, or `winner>loser`.
struct ElementRef {
  ElementKind kind = ElementKind::rule;
  std::string id;

  auto operator<=>(const ElementRef&) const = default;
  bool operator==(const ElementRef&) const = default;
};

/// `rule:r_it`, `literal:valid_consent(marco)`, ...
std::string to_string(const ElementRef& ref);
std::optional<ElementRef> parse_element_ref(std::string_view text);

struct Subject {
  SubjectKind kind = SubjectKind::purpose;
  std::string id;
  std::optional<ElementRef> element;

  bool operator==(const Subject&) const = default;
};

struct InfoNode {
  std::string id;
  Stage stage = Stage::incipit;
  Subject subject;
  std::string rendering;
  std::uint32_t complexity_weight = 1;
  std::vector<ElementRef> links;
  std::optional<GroundFragment> fragment;
  std::optional<CounterfactualResult> counterfactual;

  bool operator==(const InfoNode&) const = default;
};

enum class Action { expand, ground, source, mark, whatif };

std::string_view to_string(Action action);
std::optional<Action> parse_action(std::string_view text);

enum class Stance { supports, attacks };

std::string_view to_string(Stance stance);
std::optional<Stance> parse_stance(std::string_view text);

struct Interaction {
  Action action = Action::expand;
  /// Node id, element reference (`rule:r_it`) or bare element id.
  std::string target;
  // mark
  Stance stance = Stance::supports;
  std::string claim;
  std::optional<std::string> argument_target;
  // whatif
  std::vector<MutationRequest> mutations;

  bool operator==(const Interaction&) const = default;
};

struct Explanans {
  std::vector<InfoNode> nodes;
  /// Every interaction applied so far, in order.
  std::vector<Interaction> history;
  /// Per node: index into `history` of the interaction that appended it,
  /// empty for the initial segment.
  std::vector<std::optional<std::size_t>> provenance;
  std::size_t initial_size = 0;

  const InfoNode* find(std::string_view node_id) const;
  bool contains(SubjectKind kind, std::string_view subject_id) const;

  bool operator==(const Explanans&) const = default;
};

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct Scores {
  std::uint32_t relevance = 0;
  std::uint32_t abstraction = 0;
  std::uint32_t simplicity = 1;

  bool operator==(const Scores&) const = default;
};

struct CandidateAction {
  Interaction interaction;
  Scores scores;
  Stage stage = Stage::incipit;
  std::vector<Subject> appends;

  bool operator==(const CandidateAction&) const = default;
};

enum class HeuristicKey { relevance, abstraction, simplicity };

using HeuristicOrder = std::array<HeuristicKey, 3>;

inline constexpr HeuristicOrder kDefaultHeuristicOrder = {
    HeuristicKey::relevance, HeuristicKey::abstraction, HeuristicKey::simplicity};

/// Parses `relevance,abstraction,simplicity` (any permutation).
HeuristicOrder parse_heuristic_order(std::string_view text);
std::string to_string(const HeuristicOrder& order);

/// Strict weak ordering used by available_actions.
bool candidate_less(const CandidateAction& a, const CandidateAction& b, const HeuristicOrder& order);

/// The explanatory process over one explanandum: builds E_0, applies
/// interactions and lists the heuristically ordered candidates. The space
/// itself is never materialised; candidates are computed on demand from the
/// current explanans. Immutable after construction and safe to share.
class ExplanatorySpace {
 public:
  /// Throws Error("missing-decision") for ex-post bundles without a
  /// decision literal.
  ExplanatorySpace(std::shared_ptr<const ExplanandumBundle> bundle, Derivation derivation,
                   HeuristicOrder order = kDefaultHeuristicOrder);

  const ExplanandumBundle& bundle() const { return *bundle_; }
  const std::shared_ptr<const ExplanandumBundle>& bundle_ptr() const { return bundle_; }
  const Derivation& derivation() const { return derivation_; }
  const HeuristicOrder& heuristic_order() const { return order_; }

  Explanans initial_explanans() const;
  Explanans step(const Explanans& explanans, const Interaction& interaction) const;
  std::vector<CandidateAction> available_actions(const Explanans& explanans) const;

  /// Node id addressed by an interaction target. Throws unknown-target.
  std::string resolve_target(const Explanans& explanans, std::string_view target) const;

  /// Actions structurally legal on a node, ignoring whether they would only
  /// duplicate present nodes. Mark is always legal.
  std::vector<Action> admissible_actions(const InfoNode& node) const;

  const std::vector<ElementRef>& elements() const { return elements_; }
  SubjectKind classify(const ElementRef& element) const;
  const std::vector<ElementRef>& links(const ElementRef& element) const;
  std::uint32_t relevance(const ElementRef& element) const;
  std::uint32_t abstraction(const ElementRef& element) const;

 private:
  void build_graph();
  void compute_relevance();
  std::vector<ElementRef> incipit_links(SubjectKind kind) const;
  InfoNode element_node(const ElementRef& element, std::size_t index) const;
  InfoNode ground_node(const ElementRef& element, std::size_t index) const;
  InfoNode source_node(const ElementRef& source, std::size_t index) const;
  std::vector<ElementRef> expandable(const Explanans& explanans, const InfoNode& node) const;
  std::vector<ElementRef> missing_sources(const Explanans& explanans, const InfoNode& node) const;
  const GroundFragment* fragment_for(const ElementRef& element) const;
  std::vector<std::string> source_refs(const ElementRef& element) const;
  void order_elements(std::vector<ElementRef>& elements) const;
  std::string render_element(const ElementRef& element, SubjectKind kind) const;
  std::uint32_t typed_depth(std::string_view id) const;
  std::uint32_t compute_abstraction(const ElementRef& element) const;

  std::shared_ptr<const ExplanandumBundle> bundle_;
  Derivation derivation_;
  HeuristicOrder order_;
  std::vector<ElementRef> elements_;
  std::map<ElementRef, std::vector<ElementRef>> adjacency_;
  std::map<ElementRef, std::uint32_t> relevance_;
  std::map<ElementRef, std::uint32_t> abstraction_;
  std::map<Literal, std::string> merged_premise_;
  std::map<std::string, Literal> literal_of_;
  std::set<std::string> involved_;
  std::optional<Literal> decision_;
  std::optional<ElementRef> decision_ref_;
};

// Free-function forms of the process operations.
Explanans initial_explanans(const ExplanandumBundle& bundle, const Derivation& derivation);
Explanans step(const ExplanandumBundle& bundle, const Derivation& derivation,
               const Explanans& explanans, const Interaction& interaction);
std::vector<CandidateAction> available_actions(const ExplanandumBundle& bundle,
                                               const Derivation& derivation,
                                               const Explanans& explanans);
std::uint32_t relevance_score(const ExplanandumBundle& bundle, const Derivation& derivation,
                              const Explanans& explanans, const ElementRef& element);

nlohmann::json to_json(const InfoNode& node);
nlohmann::json to_json(const Explanans& explanans);
nlohmann::json to_json(const Interaction& interaction);
nlohmann::json to_json(const CandidateAction& candidate);
nlohmann::json to_json(const std::vector<CandidateAction>& candidates);

/// Throws InteractionError("malformed-arguments").
Interaction interaction_from_json(const nlohmann::json& j);

}  // namespace narrex
