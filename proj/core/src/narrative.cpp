#include "narrex/narrative.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "narrex/error.hpp"
#include "narrex/exploration.hpp"

namespace narrex {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

constexpr std::array<ExplanationType, 3> kSectionOrder = {ExplanationType::justificatory,
                                                          ExplanationType::descriptive, ExplanationType::causal};

std::string section_title(ExplanationType t) {
  switch (t) {
    case ExplanationType::justificatory: return "Justificatory explanation";
    case ExplanationType::descriptive: return "Descriptive explanation";
    case ExplanationType::causal: return "Causal explanation";
  }
  return "";
}

// Nodes appended by each history entry, in order.
std::vector<std::vector<std::string>> appended_by_step(const Explanans& e) {
  std::vector<std::vector<std::string>> out(e.history.size());
  for (std::size_t i = 0; i < e.nodes.size(); ++i) {
    if (e.provenance[i] && *e.provenance[i] < out.size()) out[*e.provenance[i]].push_back(e.nodes[i].id);
  }
  return out;
}

std::string argument_target_text(const Argument& a) {
  return a.target ? "argument " + *a.target : "the decision";
}

}  // namespace

Narrative mark(const Narrative& narrative, const Explanans& explanans, std::string_view node_id, Stance stance,
               std::string_view claim, std::optional<std::string> target) {
  if (!explanans.find(node_id)) {
    throw InteractionError("unknown-target", "no node '" + std::string(node_id) + "' in the explanans",
                           std::string(node_id));
  }
  if (blank(claim)) throw InteractionError("empty-claim", "a marked argument needs a claim", std::string(node_id));
  if (target && std::none_of(narrative.arguments.begin(), narrative.arguments.end(),
                             [&](const Argument& a) { return a.id == *target; })) {
    throw InteractionError("unknown-argument", "no argument '" + *target + "' in the narrative", *target);
  }
  Narrative out = narrative;
  out.arguments.push_back(Argument{"a" + std::to_string(narrative.arguments.size() + 1), std::string(claim), stance,
                                   std::move(target), std::string(node_id)});
  return out;
}

std::string_view to_string(ExplanationType type) {
  switch (type) {
    case ExplanationType::descriptive: return "descriptive";
    case ExplanationType::causal: return "causal";
    case ExplanationType::justificatory: return "justificatory";
  }
  return "?";
}

std::optional<ExplanationType> explanation_type(const InfoNode& node) {
  switch (node.subject.kind) {
    case SubjectKind::purpose:
    case SubjectKind::overview:
    case SubjectKind::input_hint:
      return std::nullopt;
    case SubjectKind::justification:
    case SubjectKind::source:
      return ExplanationType::justificatory;
    case SubjectKind::counterfactual:
      return ExplanationType::causal;
    default:
      return ExplanationType::descriptive;
  }
}

nlohmann::json narrative_to_json(const Narrative& narrative, const Explanans& explanans) {
  nlohmann::json path = nlohmann::json::array();
  auto appended = appended_by_step(explanans);
  for (std::size_t i = 0; i < explanans.history.size(); ++i) {
    path.push_back({{"step", i + 1},
                    {"interaction", to_script(explanans.history[i])},
                    {"appended", appended[i]}});
  }
  nlohmann::json sections = nlohmann::json::array();
  for (ExplanationType t : kSectionOrder) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const InfoNode& n : explanans.nodes) {
      if (explanation_type(n) != t) continue;
      nlohmann::json jn = {{"id", n.id},
                           {"stage", std::string(to_string(n.stage))},
                           {"kind", std::string(to_string(n.subject.kind))},
                           {"subject", n.subject.id},
                           {"rendering", n.rendering}};
      nodes.push_back(std::move(jn));
    }
    if (!nodes.empty()) sections.push_back({{"type", std::string(to_string(t))}, {"nodes", std::move(nodes)}});
  }
  nlohmann::json args = nlohmann::json::array();
  for (const Argument& a : narrative.arguments) {
    args.push_back({{"id", a.id},
                    {"claim", a.claim},
                    {"stance", std::string(to_string(a.stance))},
                    {"target", a.target ? nlohmann::json(*a.target) : nlohmann::json(nullptr)},
                    {"evidence", a.evidence}});
  }
  return {{"bundle", narrative.bundle_id},
          {"mode", std::string(to_string(narrative.mode))},
          {"goal", narrative.goal},
          {"path", std::move(path)},
          {"sections", std::move(sections)},
          {"arguments", std::move(args)}};
}

std::string export_narrative(const Narrative& narrative, const Explanans& explanans, ExportFormat format) {
  if (format == ExportFormat::structured_data) return narrative_to_json(narrative, explanans).dump(2) + "\n";

  std::ostringstream out;
  out << "# Explanation narrative\n\n";
  out << "- Bundle: " << (narrative.bundle_id.empty() ? "(unnamed)" : narrative.bundle_id) << "\n";
  out << "- Mode: " << to_string(narrative.mode) << "\n";
  out << "- Goal: " << (narrative.goal.empty() ? "(not stated)" : narrative.goal) << "\n\n";

  out << "## Path\n\n";
  if (explanans.history.empty()) out << "No interactions.\n";
  auto appended = appended_by_step(explanans);
  for (std::size_t i = 0; i < explanans.history.size(); ++i) {
    out << i + 1 << ". `" << to_script(explanans.history[i]) << "`";
    if (!appended[i].empty()) {
      out << " added";
      for (const std::string& id : appended[i]) out << " " << id;
    }
    out << "\n";
  }

  for (ExplanationType t : kSectionOrder) {
    std::vector<const InfoNode*> nodes;
    for (const InfoNode& n : explanans.nodes) {
      if (explanation_type(n) == t) nodes.push_back(&n);
    }
    if (nodes.empty()) continue;
    out << "\n## " << section_title(t) << "\n";
    for (const InfoNode* n : nodes) {
      out << "\n### " << n->id << " (" << to_string(n->stage) << ", " << to_string(n->subject.kind) << ")\n\n";
      if (n->fragment) {
        out << "Ground of " << n->subject.element->id << " (" << n->fragment->format << "):\n\n```\n"
            << n->fragment->text << "\n```\n";
      } else {
        out << n->rendering << "\n";
      }
    }
  }

  out << "\n## Argument graph\n\n";
  if (narrative.arguments.empty()) out << "No arguments marked.\n";
  for (const Argument& a : narrative.arguments) {
    out << "- " << a.id << " " << to_string(a.stance) << " " << argument_target_text(a) << ": \"" << a.claim
        << "\" (evidence " << a.evidence << ")\n";
  }
  return out.str();
}

}  // namespace narrex
