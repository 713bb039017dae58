#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "narrex/bundle.hpp"

namespace narrex {

/// One explainability gap. `kind` is one of: unsourced-rule, untyped-entity,
/// ungrounded-element, missing-purpose, missing-ex-ante-field,
/// missing-ex-post-context, missing-inputs, missing-decision.
struct Violation {
  std::string kind;
  std::string element;
  std::string message;

  auto operator<=>(const Violation&) const = default;
  bool operator==(const Violation&) const = default;
};

/// Sorted, deduplicated list of violations; empty means the bundle is
/// explainable.
std::vector<Violation> validate_explainability(const ExplanandumBundle& bundle);

nlohmann::json to_json(const std::vector<Violation>& violations);

}  // namespace narrex
