#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "narrex/space.hpp"

namespace narrex {

/// One marked piece of evidence. `target` is another argument id, or empty
/// when the argument supports/attacks the process decision itself.
struct Argument {
  std::string id;
  std::string claim;
  Stance stance = Stance::supports;
  std::optional<std::string> target;
  std::string evidence;

  bool operator==(const Argument&) const = default;
};

/// The explainee's bipolar argumentation graph, in marking order.
struct Narrative {
  std::vector<Argument> arguments;
  std::string bundle_id;
  ExplanationMode mode = ExplanationMode::ex_ante;
  std::string goal;

  bool operator==(const Narrative&) const = default;
};

/// Appends an argument (`a1`, `a2`, ...). Throws InteractionError with
/// unknown-target, empty-claim or unknown-argument.
Narrative mark(const Narrative& narrative, const Explanans& explanans, std::string_view node_id,
               Stance stance, std::string_view claim,
               std::optional<std::string> target = std::nullopt);

enum class ExplanationType { descriptive, causal, justificatory };

std::string_view to_string(ExplanationType type);

/// Explanation type a node contributes to; nullopt for background incipit
/// nodes (purpose, overview, input hint).
std::optional<ExplanationType> explanation_type(const InfoNode& node);

enum class ExportFormat { structured_data, document_text };

/// Deterministic export: the path, one section per explanation type present
/// (justificatory, descriptive, causal) and the argument graph.
std::string export_narrative(const Narrative& narrative, const Explanans& explanans,
                             ExportFormat format);
nlohmann::json narrative_to_json(const Narrative& narrative, const Explanans& explanans);

}  // namespace narrex
