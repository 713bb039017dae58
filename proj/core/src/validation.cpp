#include "narrex/validation.hpp"

#include <algorithm>
#include <set>

namespace narrex {

namespace {

void add(std::vector<Violation>& out, std::string kind, std::string element, std::string message) {
  out.push_back(Violation{std::move(kind), std::move(element), std::move(message)});
}

void check_entities_typed(const ExplanandumBundle& b, const Literal& lit, const std::optional<Value>& value,
                          std::vector<Violation>& out) {
  std::vector<std::string> terms;
  for (const std::string& arg : lit.args) {
    if (is_entity_term(arg)) terms.push_back(arg);
  }
  if (value && value->kind == Value::Kind::symbol) terms.push_back(value->symbol);
  for (const std::string& t : terms) {
    if (b.concepts_of(t).empty()) {
      add(out, "untyped-entity", t, "entity '" + t + "' is not aligned to any concept");
    }
  }
}

}  // namespace

std::vector<Violation> validate_explainability(const ExplanandumBundle& b) {
  std::vector<Violation> out;
  const Theory& theory = b.process.function;

  for (const Rule& r : theory.rules) {
    if (r.source_refs.empty()) add(out, "unsourced-rule", r.id, "rule '" + r.id + "' cites no source");
    if (!b.ground.count(r.id)) {
      add(out, "ungrounded-element", r.id, "rule '" + r.id + "' has no ground fragment");
    }
  }
  for (const Premise& p : b.process.inputs) {
    if (!b.ground.count(p.id)) {
      add(out, "ungrounded-element", p.id, "premise '" + p.id + "' has no ground fragment");
    }
    check_entities_typed(b, p.literal, p.value, out);
  }

  const Overview& o = b.overview;
  if (o.purpose.empty()) add(out, "missing-purpose", "overview.purpose", "the explanatory purpose is not stated");
  if (o.mode == ExplanationMode::ex_ante) {
    const std::pair<const char*, const std::string*> fields[] = {
        {"pipeline", &o.pipeline},
        {"data", &o.data},
        {"jurisdiction", &o.jurisdiction},
        {"consequences", &o.consequences},
    };
    for (const auto& [name, value] : fields) {
      if (value->empty()) {
        add(out, "missing-ex-ante-field", std::string("overview.") + name,
            std::string("ex-ante overview lacks '") + name + "'");
      }
    }
  } else {
    if (o.runtime_context.empty()) {
      add(out, "missing-ex-post-context", "overview.runtime_context",
          "ex-post overview lacks metadata about the runtime context of the decision");
    }
    if (b.process.inputs.empty()) {
      add(out, "missing-inputs", "facts", "ex-post explanandum has no process inputs");
    }
    if (!o.decision) {
      add(out, "missing-decision", "overview.decision", "ex-post overview does not name the decision literal");
    } else {
      check_entities_typed(b, o.decision->literal, std::nullopt, out);
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::json to_json(const std::vector<Violation>& violations) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Violation& v : violations) {
    arr.push_back({{"kind", v.kind}, {"element", v.element}, {"message", v.message}});
  }
  return arr;
}

}  // namespace narrex
