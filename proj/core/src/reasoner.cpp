#include "narrex/reasoner.hpp"

#include <algorithm>
#include <functional>

#include "narrex/error.hpp"

namespace narrex {

std::string_view to_string(ProofTag tag) {
  switch (tag) {
    case ProofTag::definitely_provable: return "definitely-provable";
    case ProofTag::definitely_refuted: return "definitely-refuted";
    case ProofTag::defeasibly_provable: return "defeasibly-provable";
    case ProofTag::defeasibly_refuted: return "defeasibly-refuted";
  }
  return "?";
}

std::string_view symbol(ProofTag tag) {
  switch (tag) {
    case ProofTag::definitely_provable: return "+Δ";
    case ProofTag::definitely_refuted: return "−Δ";
    case ProofTag::defeasibly_provable: return "+∂";
    case ProofTag::defeasibly_refuted: return "−∂";
  }
  return "?";
}

ProofTag ProofStatus::headline() const {
  if (definite) return ProofTag::definitely_provable;
  if (defeasible) return ProofTag::defeasibly_provable;
  return ProofTag::defeasibly_refuted;
}

std::string_view to_string(DefeatReason reason) {
  switch (reason) {
    case DefeatReason::inapplicable_antecedent: return "inapplicable-antecedent";
    case DefeatReason::beaten_by_superiority: return "beaten-by-superiority";
    case DefeatReason::overridden_by_definite: return "overridden-by-definite";
  }
  return "?";
}

ProofStatus Derivation::status(const Literal& lit) const {
  auto it = conclusions.find(lit);
  return it == conclusions.end() ? ProofStatus{} : it->second;
}

bool Derivation::fired(std::string_view rule_id) const {
  return std::any_of(causal_chain.begin(), causal_chain.end(),
                     [&](const FiringRecord& f) { return f.rule == rule_id; });
}

namespace {

struct RuleIndex {
  std::map<Literal, std::vector<const Rule*>> by_consequent;

  explicit RuleIndex(const Theory& theory) {
    for (const Rule& r : theory.rules) by_consequent[r.consequent].push_back(&r);
  }

  const std::vector<const Rule*>& rules_for(const Literal& lit) const {
    static const std::vector<const Rule*> none;
    auto it = by_consequent.find(lit);
    return it == by_consequent.end() ? none : it->second;
  }
};

std::vector<Literal> topological_atoms(const Theory& theory, const std::set<Literal>& facts) {
  std::map<Literal, std::set<Literal>> successors;
  std::map<Literal, std::size_t> indegree;
  auto touch = [&](const Literal& atom) { indegree.try_emplace(atom, 0); };

  for (const Literal& f : facts) touch(f.atom_key());
  for (const Rule& r : theory.rules) {
    Literal head = r.consequent.atom_key();
    touch(head);
    for (const Literal& a : r.antecedents) {
      Literal tail = a.atom_key();
      touch(tail);
      if (successors[tail].insert(head).second) ++indegree[head];
    }
  }

  std::set<Literal> ready;
  for (const auto& [atom, deg] : indegree) {
    if (deg == 0) ready.insert(atom);
  }
  std::vector<Literal> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    Literal atom = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(atom);
    for (const Literal& next : successors[atom]) {
      if (--indegree[next] == 0) ready.insert(next);
    }
  }
  if (order.size() == indegree.size()) return order;

  // Walk backwards through unresolved atoms until one repeats.
  std::set<Literal> unresolved;
  for (const auto& [atom, deg] : indegree) {
    if (deg > 0) unresolved.insert(atom);
  }
  std::map<Literal, Literal> predecessor;
  for (const auto& [tail, heads] : successors) {
    if (!unresolved.count(tail)) continue;
    for (const Literal& head : heads) {
      if (unresolved.count(head)) predecessor.try_emplace(head, tail);
    }
  }
  std::vector<Literal> walk{*unresolved.begin()};
  std::set<Literal> seen{walk.back()};
  while (true) {
    Literal prev = predecessor.at(walk.back());
    if (seen.count(prev)) {
      auto start = std::find(walk.begin(), walk.end(), prev);
      std::vector<Literal> cycle(start, walk.end());
      std::reverse(cycle.begin(), cycle.end());
      std::string text;
      for (const Literal& l : cycle) text += to_string(l) + " -> ";
      text += to_string(cycle.front());
      throw ReasoningError("cyclic-dependency", "cyclic dependency: " + text, text);
    }
    seen.insert(prev);
    walk.push_back(prev);
  }
}

class Engine {
 public:
  Engine(const Theory& theory, const std::set<Literal>& facts)
      : theory_(theory), index_(theory), facts_(facts) {}

  Derivation run() {
    out_.facts = facts_;
    for (const Literal& atom : topological_atoms(theory_, facts_)) {
      const Literal neg = atom.complement();
      out_.conclusions[atom].definite = definite(atom);
      out_.conclusions[neg].definite = definite(neg);
      settle_defeasible(atom);
      settle_defeasible(neg);
    }
    return std::move(out_);
  }

 private:
  bool definite_of(const Literal& lit) const { return out_.conclusions.at(lit).definite; }
  bool defeasible_of(const Literal& lit) const { return out_.conclusions.at(lit).defeasible; }

  const Rule* definite_rule(const Literal& q) const {
    for (const Rule* r : index_.rules_for(q)) {
      if (r->kind != RuleKind::strict) continue;
      if (std::all_of(r->antecedents.begin(), r->antecedents.end(),
                      [&](const Literal& a) { return definite_of(a); })) {
        return r;
      }
    }
    return nullptr;
  }

  bool definite(const Literal& q) const { return facts_.count(q) || definite_rule(q); }

  bool applicable(const Rule& r) const {
    return std::all_of(r.antecedents.begin(), r.antecedents.end(),
                       [&](const Literal& a) { return defeasible_of(a); });
  }

  std::set<Literal> support_of(const Rule& r) const {
    std::set<Literal> out;
    for (const Literal& a : r.antecedents) {
      if (facts_.count(a)) {
        out.insert(a);
      } else {
        const auto& sub = out_.justifications.at(a).supporting_facts;
        out.insert(sub.begin(), sub.end());
      }
    }
    return out;
  }

  void fire(const Rule& r) {
    out_.causal_chain.push_back(
        FiringRecord{r.id, r.antecedents, r.consequent, out_.causal_chain.size() + 1});
  }

  void settle_defeasible(const Literal& q) {
    ProofStatus& st = out_.conclusions[q];
    const Literal nq = q.complement();
    const auto& attackers = index_.rules_for(nq);

    if (st.definite) {
      st.defeasible = true;
      Justification j;
      if (facts_.count(q)) {
        j.supporting_facts = {q};
      } else {
        const Rule* r = definite_rule(q);
        j.winning_rule = r->id;
        j.supporting_facts = support_of(*r);
        fire(*r);
      }
      for (const Rule* s : attackers) {
        j.defeated_rules.push_back(DefeatedRule{
            s->id, applicable(*s) ? DefeatReason::overridden_by_definite : DefeatReason::inapplicable_antecedent});
      }
      out_.justifications[q] = std::move(j);
      return;
    }

    st.defeasible = false;
    if (definite_of(nq)) return;

    std::vector<const Rule*> supporters;
    for (const Rule* r : index_.rules_for(q)) {
      if (r->kind != RuleKind::defeater && applicable(*r)) supporters.push_back(r);
    }
    if (supporters.empty()) return;

    Justification j;
    for (const Rule* s : attackers) {
      if (!applicable(*s)) {
        j.defeated_rules.push_back(DefeatedRule{s->id, DefeatReason::inapplicable_antecedent});
        continue;
      }
      const Superiority* used = nullptr;
      for (const Rule* t : supporters) {
        used = theory_.find_superiority(t->id, s->id);
        if (used) break;
      }
      if (!used) return;  // an undefeated attacker blocks q
      j.defeated_rules.push_back(DefeatedRule{s->id, DefeatReason::beaten_by_superiority});
      j.superiority_used.push_back(*used);
    }

    const Rule* winner = supporters.front();
    if (!j.superiority_used.empty()) winner = theory_.find_rule(j.superiority_used.front().winner);
    st.defeasible = true;
    j.winning_rule = winner->id;
    j.supporting_facts = support_of(*winner);
    fire(*winner);
    out_.justifications[q] = std::move(j);
  }

  const Theory& theory_;
  RuleIndex index_;
  const std::set<Literal>& facts_;
  Derivation out_;
};

}  // namespace

Derivation derive(const Theory& theory, const std::set<Literal>& facts) {
  return Engine(theory, facts).run();
}

Derivation derive(const ExplanandumBundle& bundle) {
  return derive(bundle.process.function, ground_facts(bundle));
}

const Justification& justify(const Derivation& derivation, const Literal& lit) {
  auto it = derivation.justifications.find(lit);
  if (it == derivation.justifications.end() || !derivation.provable(lit)) {
    throw ReasoningError("not-derived", "'" + to_string(lit) + "' is not defeasibly provable", to_string(lit));
  }
  return it->second;
}

const std::vector<FiringRecord>& causal_chain(const Derivation& derivation) { return derivation.causal_chain; }

std::vector<std::string> deciding_rules(const Derivation& derivation, const Literal& lit) {
  const Justification& top = justify(derivation, lit);
  std::set<std::string> deciding;
  std::set<Literal> visited;
  std::function<void(const Literal&)> visit = [&](const Literal& l) {
    if (!visited.insert(l).second) return;
    auto jt = derivation.justifications.find(l);
    if (jt == derivation.justifications.end() || !jt->second.winning_rule) return;
    if (!jt->second.superiority_used.empty()) deciding.insert(*jt->second.winning_rule);
    for (const FiringRecord& f : derivation.causal_chain) {
      if (f.consequent != l) continue;
      for (const Literal& a : f.satisfied_antecedents) visit(a);
    }
  };
  visit(lit);

  std::vector<std::string> out;
  for (const FiringRecord& f : derivation.causal_chain) {
    if (deciding.count(f.rule) && std::find(out.begin(), out.end(), f.rule) == out.end()) out.push_back(f.rule);
  }
  if (out.empty() && top.winning_rule) out.push_back(*top.winning_rule);
  return out;
}

nlohmann::json to_json(const Justification& j) {
  nlohmann::json out;
  out["winning_rule"] = j.winning_rule ? nlohmann::json(*j.winning_rule) : nlohmann::json(nullptr);
  nlohmann::json facts = nlohmann::json::array();
  for (const Literal& f : j.supporting_facts) facts.push_back(to_string(f));
  out["supporting_facts"] = std::move(facts);
  nlohmann::json defeated = nlohmann::json::array();
  for (const DefeatedRule& d : j.defeated_rules) {
    defeated.push_back({{"rule", d.rule}, {"reason", std::string(to_string(d.reason))}});
  }
  out["defeated_rules"] = std::move(defeated);
  nlohmann::json sup = nlohmann::json::array();
  for (const Superiority& s : j.superiority_used) {
    nlohmann::json js = {{"winner", s.winner}, {"loser", s.loser}};
    if (!s.note.empty()) js["note"] = s.note;
    sup.push_back(std::move(js));
  }
  out["superiority_used"] = std::move(sup);
  return out;
}

nlohmann::json to_json(const Derivation& d) {
  nlohmann::json out;
  nlohmann::json conclusions = nlohmann::json::array();
  for (const auto& [lit, st] : d.conclusions) {
    conclusions.push_back({{"literal", to_string(lit)},
                           {"definite", std::string(to_string(st.definite_tag()))},
                           {"defeasible", std::string(to_string(st.defeasible_tag()))}});
  }
  out["conclusions"] = std::move(conclusions);
  nlohmann::json chain = nlohmann::json::array();
  for (const FiringRecord& f : d.causal_chain) {
    nlohmann::json ants = nlohmann::json::array();
    for (const Literal& a : f.satisfied_antecedents) ants.push_back(to_string(a));
    chain.push_back({{"step", f.step}, {"rule", f.rule}, {"antecedents", std::move(ants)},
                     {"consequent", to_string(f.consequent)}});
  }
  out["causal_chain"] = std::move(chain);
  nlohmann::json justs = nlohmann::json::object();
  for (const auto& [lit, j] : d.justifications) justs[to_string(lit)] = to_json(j);
  out["justifications"] = std::move(justs);
  return out;
}

}  // namespace narrex
