#include "narrex/bundle_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "narrex/error.hpp"

namespace narrex {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const char* code, const std::string& message, std::string detail = {}) {
  throw BundleError(code, message, std::move(detail));
}

void check_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail("syntax-error", path + ": expected an object", path);
}

void check_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail("syntax-error", path + ": expected an array", path);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  check_object(j, path);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail("syntax-error", path + ": unknown key '" + key + "'", path + "." + key);
  }
}

std::string string_at(const json& j, const std::string& key, const std::string& path, bool required) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) fail("syntax-error", path + ": missing required key '" + key + "'", path + "." + key);
    return {};
  }
  if (!it->is_string()) fail("syntax-error", path + "." + key + ": expected a string", path + "." + key);
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) return std::nullopt;
  return string_at(j, key, path, true);
}

std::vector<std::string> string_list(const json& j, const std::string& key, const std::string& path) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  check_array(*it, path + "." + key);
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& e = (*it)[i];
    if (!e.is_string()) fail("syntax-error", path + "." + key + ": expected strings", path + "." + key);
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::map<std::string, std::string> string_map(const json& j, const std::string& path) {
  check_object(j, path);
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) fail("syntax-error", path + "." + k + ": expected a string", path + "." + k);
    out.emplace(k, v.get<std::string>());
  }
  return out;
}

Literal literal_at(const json& j, const std::string& path) {
  if (!j.is_string()) fail("syntax-error", path + ": expected a literal string", path);
  try {
    return parse_literal(j.get<std::string>());
  } catch (const BundleError& e) {
    fail("syntax-error", path + ": " + e.what(), path + " " + e.detail());
  }
}

Value value_at(const json& j, const std::string& path) {
  if (j.is_boolean()) return Value::of_bool(j.get<bool>());
  if (j.is_number()) return Value::of_number(j.get<double>());
  if (j.is_string()) {
    auto v = parse_value(j.get<std::string>());
    if (v && v->kind == Value::Kind::symbol) return *v;
  }
  fail("syntax-error", path + ": expected a boolean, number or identifier", path);
}

json value_to_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::boolean: return v.flag;
    case Value::Kind::number: return v.number;
    case Value::Kind::symbol: return v.symbol;
  }
  return nullptr;
}

std::map<std::string, std::vector<std::string>> entity_map(const json& j, const std::string& path,
                                                            const Ontology& ontology) {
  check_object(j, path);
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [entity, concepts] : j.items()) {
    std::string epath = path + "." + entity;
    check_array(concepts, epath);
    std::vector<std::string> ids;
    for (const json& c : concepts) {
      if (!c.is_string()) fail("syntax-error", epath + ": expected concept ids", epath);
      std::string id = c.get<std::string>();
      if (!ontology.find_concept(id)) {
        fail("dangling-reference", epath + ": unknown concept '" + id + "'", id);
      }
      ids.push_back(std::move(id));
    }
    out.emplace(entity, std::move(ids));
  }
  return out;
}

void parse_sources(const json& j, ExplanandumBundle& b) {
  check_array(j, "sources");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string path = "sources[" + std::to_string(i) + "]";
    const json& s = j[i];
    check_keys(s, path, {"id", "title", "citation", "uri", "excerpt"});
    Source src;
    src.id = string_at(s, "id", path, true);
    src.title = string_at(s, "title", path, true);
    src.citation = string_at(s, "citation", path, false);
    src.uri = optional_string(s, "uri", path);
    src.excerpt = optional_string(s, "excerpt", path);
    if (src.id.empty()) fail("invalid-structure", path + ": empty id", path);
    if (src.title.empty()) fail("invalid-structure", path + ": empty title", src.id);
    if (!seen.insert(src.id).second) fail("duplicate-id", "duplicate source id '" + src.id + "'", src.id);
    b.sources.push_back(std::move(src));
  }
}

void parse_ontology(const json& j, ExplanandumBundle& b) {
  check_keys(j, "ontology", {"concepts", "entities", "labels"});
  Ontology& o = b.ontology;
  if (j.contains("concepts")) {
    const json& cs = j["concepts"];
    check_array(cs, "ontology.concepts");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::string path = "ontology.concepts[" + std::to_string(i) + "]";
      check_keys(cs[i], path, {"id", "parent"});
      Concept c;
      c.id = string_at(cs[i], "id", path, true);
      c.parent = optional_string(cs[i], "parent", path);
      if (c.id.empty()) fail("invalid-structure", path + ": empty id", path);
      if (!seen.insert(c.id).second) fail("duplicate-id", "duplicate concept id '" + c.id + "'", c.id);
      o.concepts.push_back(std::move(c));
    }
    for (const Concept& c : o.concepts) {
      if (c.parent && !o.find_concept(*c.parent)) {
        fail("dangling-reference", "concept '" + c.id + "' has unknown parent '" + *c.parent + "'", *c.parent);
      }
    }
    // Each concept has at most one parent, so a cycle shows up as a walk
    // longer than the number of concepts.
    for (const Concept& c : o.concepts) {
      const Concept* cur = &c;
      std::size_t steps = 0;
      while (cur->parent) {
        cur = o.find_concept(*cur->parent);
        if (++steps > o.concepts.size()) {
          fail("taxonomy-cycle", "taxonomy cycle through concept '" + c.id + "'", c.id);
        }
      }
    }
  }
  if (j.contains("entities")) o.entities = entity_map(j["entities"], "ontology.entities", o);
  if (j.contains("labels")) o.labels = string_map(j["labels"], "ontology.labels");
}

void parse_context(const json& j, ExplanandumBundle& b) {
  check_keys(j, "context", {"entities", "labels"});
  if (j.contains("entities")) b.context.entities = entity_map(j["entities"], "context.entities", b.ontology);
  if (j.contains("labels")) b.context.labels = string_map(j["labels"], "context.labels");
}

RuleKind rule_kind(const std::string& text, const std::string& path) {
  if (text == "strict") return RuleKind::strict;
  if (text == "defeasible") return RuleKind::defeasible;
  if (text == "defeater") return RuleKind::defeater;
  fail("syntax-error", path + ".kind: expected strict, defeasible or defeater", path + ".kind");
}

void check_source_refs(const std::vector<std::string>& refs, const ExplanandumBundle& b, const std::string& owner) {
  for (const std::string& ref : refs) {
    if (!b.find_source(ref)) {
      fail("dangling-reference", owner + " cites undeclared source '" + ref + "'", ref);
    }
  }
}

void parse_rules(const json& j, ExplanandumBundle& b, std::set<std::string>& ids) {
  check_array(j, "rules");
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string path = "rules[" + std::to_string(i) + "]";
    const json& r = j[i];
    check_keys(r, path, {"id", "kind", "antecedents", "consequent", "source_refs", "jurisdiction", "annotations"});
    Rule rule;
    rule.id = string_at(r, "id", path, true);
    if (rule.id.empty()) fail("invalid-structure", path + ": empty id", path);
    rule.kind = rule_kind(string_at(r, "kind", path, true), path);
    if (r.contains("antecedents")) {
      check_array(r["antecedents"], path + ".antecedents");
      for (std::size_t k = 0; k < r["antecedents"].size(); ++k) {
        rule.antecedents.push_back(
            literal_at(r["antecedents"][k], path + ".antecedents[" + std::to_string(k) + "]"));
      }
    }
    if (!r.contains("consequent")) fail("syntax-error", path + ": missing required key 'consequent'", path);
    rule.consequent = literal_at(r["consequent"], path + ".consequent");
    rule.source_refs = string_list(r, "source_refs", path);
    rule.jurisdiction = optional_string(r, "jurisdiction", path);
    if (r.contains("annotations")) rule.annotations = string_map(r["annotations"], path + ".annotations");

    if (!ids.insert(rule.id).second) fail("duplicate-id", "duplicate id '" + rule.id + "'", rule.id);
    for (const Literal& a : rule.antecedents) {
      if (a == rule.consequent) {
        fail("invalid-structure", "rule '" + rule.id + "' has its consequent among its antecedents", rule.id);
      }
    }
    check_source_refs(rule.source_refs, b, "rule '" + rule.id + "'");
    b.process.function.rules.push_back(std::move(rule));
  }
}

void parse_superiority(const json& j, ExplanandumBundle& b) {
  check_array(j, "superiority");
  Theory& t = b.process.function;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string path = "superiority[" + std::to_string(i) + "]";
    check_keys(j[i], path, {"winner", "loser", "note"});
    Superiority s;
    s.winner = string_at(j[i], "winner", path, true);
    s.loser = string_at(j[i], "loser", path, true);
    s.note = string_at(j[i], "note", path, false);
    const Rule* w = t.find_rule(s.winner);
    const Rule* l = t.find_rule(s.loser);
    if (!w) fail("dangling-reference", path + ": unknown rule '" + s.winner + "'", s.winner);
    if (!l) fail("dangling-reference", path + ": unknown rule '" + s.loser + "'", s.loser);
    if (s.winner == s.loser) fail("invalid-structure", path + ": superiority must be irreflexive", s.winner);
    if (w->consequent.complement() != l->consequent) {
      fail("invalid-structure",
           path + ": rules '" + s.winner + "' and '" + s.loser + "' do not have complementary consequents",
           s.winner + ">" + s.loser);
    }
    if (t.superior(s.loser, s.winner)) {
      fail("invalid-structure", path + ": superiority must be asymmetric", s.winner + ">" + s.loser);
    }
    if (t.superior(s.winner, s.loser)) {
      fail("duplicate-id", path + ": duplicate superiority pair", s.winner + ">" + s.loser);
    }
    t.superiority.push_back(std::move(s));
  }
}

void parse_facts(const json& j, ExplanandumBundle& b, std::set<std::string>& ids) {
  check_array(j, "facts");
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string path = "facts[" + std::to_string(i) + "]";
    const json& f = j[i];
    check_keys(f, path, {"id", "literal", "value", "source_refs"});
    Premise p;
    p.id = string_at(f, "id", path, true);
    if (p.id.empty()) fail("invalid-structure", path + ": empty id", path);
    if (!f.contains("literal")) fail("syntax-error", path + ": missing required key 'literal'", path);
    p.literal = literal_at(f["literal"], path + ".literal");
    if (p.literal.comparison) {
      fail("invalid-structure", path + ": a premise cannot be a comparison; use 'value'", p.id);
    }
    if (f.contains("value")) p.value = value_at(f["value"], path + ".value");
    p.source_refs = string_list(f, "source_refs", path);
    if (!ids.insert(p.id).second) fail("duplicate-id", "duplicate id '" + p.id + "'", p.id);
    for (const Premise& other : b.process.inputs) {
      if (other.literal == p.literal) {
        fail("duplicate-id", "premises '" + other.id + "' and '" + p.id + "' state the same literal", p.id);
      }
    }
    check_source_refs(p.source_refs, b, "premise '" + p.id + "'");
    b.process.inputs.push_back(std::move(p));
  }
}

bool theory_mentions(const Theory& t, const Literal& lit) {
  for (const Rule& r : t.rules) {
    if (r.consequent == lit) return true;
    for (const Literal& a : r.antecedents) {
      if (a == lit) return true;
    }
  }
  return false;
}

void parse_ground(const json& j, ExplanandumBundle& b) {
  check_object(j, "ground");
  for (const auto& [key, frag] : j.items()) {
    std::string path = "ground." + key;
    check_keys(frag, path, {"format", "text"});
    GroundFragment g;
    g.format = string_at(frag, "format", path, true);
    g.text = string_at(frag, "text", path, true);
    bool known = b.process.function.find_rule(key) || b.find_premise(key);
    if (!known) {
      try {
        known = theory_mentions(b.process.function, parse_literal(key));
      } catch (const BundleError&) {
        known = false;
      }
    }
    if (!known) fail("dangling-reference", "ground fragment for unknown element '" + key + "'", key);
    b.ground.emplace(key, std::move(g));
  }
}

void parse_overview(const json& j, ExplanandumBundle& b) {
  check_keys(j, "overview",
             {"id", "mode", "purpose", "pipeline", "data", "jurisdiction", "consequences", "language",
              "representation", "runtime_context", "decision"});
  Overview& o = b.overview;
  o.id = string_at(j, "id", "overview", false);
  std::string mode = string_at(j, "mode", "overview", false);
  if (mode.empty() || mode == "ex-ante") {
    o.mode = ExplanationMode::ex_ante;
  } else if (mode == "ex-post") {
    o.mode = ExplanationMode::ex_post;
  } else {
    fail("syntax-error", "overview.mode: expected ex-ante or ex-post", "overview.mode");
  }
  o.purpose = string_at(j, "purpose", "overview", false);
  o.pipeline = string_at(j, "pipeline", "overview", false);
  o.data = string_at(j, "data", "overview", false);
  o.jurisdiction = string_at(j, "jurisdiction", "overview", false);
  o.consequences = string_at(j, "consequences", "overview", false);
  o.language = string_at(j, "language", "overview", false);
  o.representation = string_at(j, "representation", "overview", false);
  if (j.contains("runtime_context")) o.runtime_context = string_map(j["runtime_context"], "overview.runtime_context");
  if (j.contains("decision")) {
    const json& d = j["decision"];
    check_keys(d, "overview.decision", {"literal", "holds", "fails"});
    DecisionSpec spec;
    if (!d.contains("literal")) fail("syntax-error", "overview.decision: missing required key 'literal'");
    spec.literal = literal_at(d["literal"], "overview.decision.literal");
    spec.holds_label = string_at(d, "holds", "overview.decision", false);
    spec.fails_label = string_at(d, "fails", "overview.decision", false);
    o.decision = std::move(spec);
  }
}

std::string line_column(std::string_view doc, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < doc.size(); ++i) {
    if (doc[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ExplanandumBundle parse_bundle(std::string_view document) {
  json j;
  try {
    j = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    std::string where = line_column(document, e.byte);
    throw BundleError("syntax-error", "malformed bundle JSON at " + where + " (byte " + std::to_string(e.byte) + ")",
                      where);
  }
  return bundle_from_json(j);
}

ExplanandumBundle bundle_from_json(const json& j) {
  check_keys(j, "bundle",
             {"$schema", "rules", "superiority", "facts", "ontology", "sources", "ground", "overview", "context"});
  ExplanandumBundle b;
  std::set<std::string> element_ids;
  if (j.contains("sources")) parse_sources(j["sources"], b);
  if (j.contains("ontology")) parse_ontology(j["ontology"], b);
  if (j.contains("context")) parse_context(j["context"], b);
  if (j.contains("rules")) parse_rules(j["rules"], b, element_ids);
  if (j.contains("superiority")) parse_superiority(j["superiority"], b);
  if (j.contains("facts")) parse_facts(j["facts"], b, element_ids);
  if (j.contains("ground")) parse_ground(j["ground"], b);
  if (j.contains("overview")) parse_overview(j["overview"], b);
  return b;
}

ExplanandumBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("io-error", "cannot read bundle '" + path.string() + "'", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bundle(buf.str());
}

json bundle_to_json(const ExplanandumBundle& b) {
  json j = json::object();

  json rules = json::array();
  for (const Rule& r : b.process.function.rules) {
    json jr = {{"id", r.id}, {"kind", std::string(to_string(r.kind))}};
    json ants = json::array();
    for (const Literal& a : r.antecedents) ants.push_back(to_string(a));
    jr["antecedents"] = std::move(ants);
    jr["consequent"] = to_string(r.consequent);
    jr["source_refs"] = r.source_refs;
    if (r.jurisdiction) jr["jurisdiction"] = *r.jurisdiction;
    if (!r.annotations.empty()) jr["annotations"] = r.annotations;
    rules.push_back(std::move(jr));
  }
  j["rules"] = std::move(rules);

  json sup = json::array();
  for (const Superiority& s : b.process.function.superiority) {
    json js = {{"winner", s.winner}, {"loser", s.loser}};
    if (!s.note.empty()) js["note"] = s.note;
    sup.push_back(std::move(js));
  }
  j["superiority"] = std::move(sup);

  json facts = json::array();
  for (const Premise& p : b.process.inputs) {
    json jp = {{"id", p.id}, {"literal", to_string(p.literal)}};
    if (p.value) jp["value"] = value_to_json(*p.value);
    if (!p.source_refs.empty()) jp["source_refs"] = p.source_refs;
    facts.push_back(std::move(jp));
  }
  j["facts"] = std::move(facts);

  json concepts = json::array();
  for (const Concept& c : b.ontology.concepts) {
    json jc = {{"id", c.id}};
    if (c.parent) jc["parent"] = *c.parent;
    concepts.push_back(std::move(jc));
  }
  j["ontology"] = {{"concepts", std::move(concepts)},
                   {"entities", b.ontology.entities},
                   {"labels", b.ontology.labels}};

  json sources = json::array();
  for (const Source& s : b.sources) {
    json js = {{"id", s.id}, {"title", s.title}, {"citation", s.citation}};
    if (s.uri) js["uri"] = *s.uri;
    if (s.excerpt) js["excerpt"] = *s.excerpt;
    sources.push_back(std::move(js));
  }
  j["sources"] = std::move(sources);

  json ground = json::object();
  for (const auto& [key, g] : b.ground) ground[key] = {{"format", g.format}, {"text", g.text}};
  j["ground"] = std::move(ground);

  j["context"] = {{"entities", b.context.entities}, {"labels", b.context.labels}};

  const Overview& o = b.overview;
  json ov = {{"id", o.id},
             {"mode", std::string(to_string(o.mode))},
             {"purpose", o.purpose},
             {"pipeline", o.pipeline},
             {"data", o.data},
             {"jurisdiction", o.jurisdiction},
             {"consequences", o.consequences},
             {"language", o.language},
             {"representation", o.representation},
             {"runtime_context", o.runtime_context}};
  if (o.decision) {
    ov["decision"] = {{"literal", to_string(o.decision->literal)},
                      {"holds", o.decision->holds_label},
                      {"fails", o.decision->fails_label}};
  }
  j["overview"] = std::move(ov);
  return j;
}

std::string serialize_bundle(const ExplanandumBundle& bundle) { return bundle_to_json(bundle).dump(2); }

}  // namespace narrex
