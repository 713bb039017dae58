#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "narrex/narrative.hpp"
#include "narrex/space.hpp"

namespace narrex {

/// Everything a path through the explanatory space produces.
struct Exploration {
  Explanans explanans;
  Narrative narrative;

  bool operator==(const Exploration&) const = default;
};

Exploration begin_exploration(const ExplanatorySpace& space, std::string goal = {});

/// One step of the process; Mark also extends the narrative.
Exploration apply(const ExplanatorySpace& space, const Exploration& state,
                  const Interaction& interaction);

/// Parses one script line:
///   expand <id> | ground <id> | source <id>
///   mark <id> supports|attacks [@<argument>] "<claim>"
///   whatif <literal>=<value>,...
/// Throws InteractionError("malformed-arguments").
Interaction parse_interaction(std::string_view line);

/// Canonical script form of an interaction; parse_interaction inverts it.
std::string to_script(const Interaction& interaction);

struct ScriptLine {
  std::size_t line_number = 0;
  Interaction interaction;
};

/// Skips blank lines and `#` comments. Errors carry the line number.
std::vector<ScriptLine> parse_script(std::string_view text);

}  // namespace narrex
