#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "narrex/bundle.hpp"
#include "narrex/literal.hpp"

namespace narrex::testing {

struct RandomTheory {
  Theory theory;
  std::set<Literal> facts;
  /// Every literal over the theory's atoms, both polarities.
  std::set<Literal> literals;
};

struct RandomTheoryLimits {
  int max_atoms = 8;
  int max_rules = 12;
  int max_superiority = 4;
  int max_antecedents = 3;
};

/// Acyclic by construction: a rule for atom p_i only uses atoms p_j, j < i.
inline RandomTheory random_theory(std::mt19937_64& rng, RandomTheoryLimits limits = {}) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  RandomTheory out;
  const int atoms = pick(1, limits.max_atoms);
  auto literal = [&](int atom, bool negated) {
    Literal l;
    l.atom = "p" + std::to_string(atom);
    l.negated = negated;
    return l;
  };
  for (int a = 0; a < atoms; ++a) {
    out.literals.insert(literal(a, false));
    out.literals.insert(literal(a, true));
  }

  for (int a = 0; a < atoms; ++a) {
    if (coin(0.3)) out.facts.insert(literal(a, coin(0.5)));
  }

  const int rules = pick(0, limits.max_rules);
  for (int i = 0; i < rules; ++i) {
    Rule r;
    r.id = "r" + std::to_string(i);
    int roll = pick(0, 99);
    r.kind = roll < 20 ? RuleKind::strict : roll < 85 ? RuleKind::defeasible : RuleKind::defeater;
    int head = pick(0, atoms - 1);
    r.consequent = literal(head, coin(0.5));
    if (head > 0) {
      int n = pick(0, std::min(limits.max_antecedents, head));
      std::set<int> used;
      for (int k = 0; k < n; ++k) {
        int a = pick(0, head - 1);
        if (!used.insert(a).second) continue;
        r.antecedents.push_back(literal(a, coin(0.4)));
      }
    }
    out.theory.rules.push_back(std::move(r));
  }

  // Superiority only between rules with complementary heads, antisymmetric.
  std::vector<std::pair<std::string, std::string>> conflicts;
  for (const Rule& a : out.theory.rules) {
    for (const Rule& b : out.theory.rules) {
      if (a.consequent == b.consequent.complement()) conflicts.emplace_back(a.id, b.id);
    }
  }
  std::shuffle(conflicts.begin(), conflicts.end(), rng);
  const int wanted = pick(0, limits.max_superiority);
  for (const auto& [w, l] : conflicts) {
    if (static_cast<int>(out.theory.superiority.size()) >= wanted) break;
    if (out.theory.superior(w, l) || out.theory.superior(l, w)) continue;
    out.theory.superiority.push_back(Superiority{w, l, ""});
  }
  return out;
}

}  // namespace narrex::testing
