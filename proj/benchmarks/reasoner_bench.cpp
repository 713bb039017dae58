#include <benchmark/benchmark.h>

#include <random>

#include "narrex/counterfactual.hpp"
#include "narrex/reasoner.hpp"
#include "support/fixtures.hpp"
#include "support/random_theory.hpp"

namespace {

using namespace narrex;

void BM_DeriveGdpr(benchmark::State& state) {
  const ExplanandumBundle& bundle = testing::gdpr_bundle();
  for (auto _ : state) benchmark::DoNotOptimize(derive(bundle));
}
BENCHMARK(BM_DeriveGdpr);

void BM_WhatifGdpr(benchmark::State& state) {
  const ExplanandumBundle& bundle = testing::gdpr_bundle();
  Derivation d = derive(bundle);
  auto mutations = parse_mutations("age(marco)=13");
  for (auto _ : state) benchmark::DoNotOptimize(whatif(bundle, d, mutations));
}
BENCHMARK(BM_WhatifGdpr);

// Random acyclic theories with up to `range(0)` atoms and 3x as many rules.
void BM_DeriveRandom(benchmark::State& state) {
  const int atoms = static_cast<int>(state.range(0));
  std::mt19937_64 rng(99);
  std::vector<testing::RandomTheory> theories;
  for (int i = 0; i < 64; ++i) theories.push_back(testing::random_theory(rng, {atoms, atoms * 3, atoms / 2, 3}));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& rt = theories[i++ % theories.size()];
    benchmark::DoNotOptimize(derive(rt.theory, rt.facts));
  }
}
BENCHMARK(BM_DeriveRandom)->Arg(8)->Arg(32)->Arg(128);

}  // namespace
