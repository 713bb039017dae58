#include "narrex/exploration.hpp"

#include <cctype>
#include <sstream>

#include "narrex/error.hpp"

namespace narrex {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view next_word(std::string_view& rest) {
  rest = trim(rest);
  std::size_t end = 0;
  while (end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[end]))) ++end;
  std::string_view word = rest.substr(0, end);
  rest = trim(rest.substr(end));
  return word;
}

InteractionError malformed(const std::string& message, std::string_view line) {
  return InteractionError("malformed-arguments", message, std::string(line));
}

std::string parse_claim(std::string_view text, std::string_view line) {
  if (text.empty() || text.front() != '"') return std::string(text);
  std::string out;
  std::size_t i = 1;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\\' && i + 1 < text.size()) {
      out += text[++i];
    } else if (c == '"') {
      break;
    } else {
      out += c;
    }
  }
  if (i >= text.size()) throw malformed("unterminated claim", line);
  if (!trim(text.substr(i + 1)).empty()) throw malformed("unexpected text after the claim", line);
  return out;
}

}  // namespace

Exploration begin_exploration(const ExplanatorySpace& space, std::string goal) {
  Exploration e;
  e.explanans = space.initial_explanans();
  e.narrative.bundle_id = space.bundle().overview.id;
  e.narrative.mode = space.bundle().overview.mode;
  e.narrative.goal = std::move(goal);
  return e;
}

Exploration apply(const ExplanatorySpace& space, const Exploration& state, const Interaction& interaction) {
  Exploration next;
  if (interaction.action == Action::mark) {
    std::string node = space.resolve_target(state.explanans, interaction.target);
    next.narrative = mark(state.narrative, state.explanans, node, interaction.stance, interaction.claim,
                          interaction.argument_target);
  } else {
    next.narrative = state.narrative;
  }
  next.explanans = space.step(state.explanans, interaction);
  return next;
}

Interaction parse_interaction(std::string_view line) {
  std::string_view rest = line;
  std::string_view word = next_word(rest);
  std::optional<Action> action = parse_action(word);
  if (!action) throw malformed("unknown action '" + std::string(word) + "'", line);
  Interaction i;
  i.action = *action;
  switch (i.action) {
    case Action::expand:
    case Action::ground:
    case Action::source:
      i.target = std::string(next_word(rest));
      if (i.target.empty()) throw malformed(std::string(to_string(i.action)) + " needs a target", line);
      if (!rest.empty()) throw malformed("unexpected text after the target", line);
      break;
    case Action::mark: {
      i.target = std::string(next_word(rest));
      std::string_view stance = next_word(rest);
      auto parsed = parse_stance(stance);
      if (i.target.empty() || !parsed) throw malformed("expected: mark <node> supports|attacks \"<claim>\"", line);
      i.stance = *parsed;
      if (!rest.empty() && rest.front() == '@') {
        std::string_view arg = next_word(rest);
        if (arg.size() < 2) throw malformed("empty argument reference", line);
        i.argument_target = std::string(arg.substr(1));
      }
      i.claim = parse_claim(rest, line);
      break;
    }
    case Action::whatif:
      try {
        i.mutations = parse_mutations(rest);
      } catch (const Error& e) {
        throw malformed(e.what(), line);
      }
      if (i.mutations.empty()) throw malformed("whatif needs <premise>=<value>", line);
      break;
  }
  return i;
}

std::string to_script(const Interaction& i) {
  std::string out(to_string(i.action));
  switch (i.action) {
    case Action::expand:
    case Action::ground:
    case Action::source:
      out += " " + i.target;
      break;
    case Action::mark: {
      out += " " + i.target + " " + std::string(to_string(i.stance));
      if (i.argument_target) out += " @" + *i.argument_target;
      out += " \"";
      for (char c : i.claim) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      break;
    }
    case Action::whatif: {
      out += ' ';
      for (std::size_t k = 0; k < i.mutations.size(); ++k) {
        if (k) out += ',';
        out += i.mutations[k].premise + "=" + to_string(i.mutations[k].value);
      }
      break;
    }
  }
  return out;
}

std::vector<ScriptLine> parse_script(std::string_view text) {
  std::vector<ScriptLine> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
    ++number;
    line = trim(line);
    if (!line.empty() && line.front() != '#') {
      try {
        out.push_back(ScriptLine{number, parse_interaction(line)});
      } catch (const InteractionError& e) {
        throw InteractionError(e.code(), "line " + std::to_string(number) + ": " + e.what(),
                               "line " + std::to_string(number));
      }
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

}  // namespace narrex
