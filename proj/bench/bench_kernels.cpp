// Copyright 2026 The umaf-bnp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <map>

#include "umaf/bnp.hpp"
#include "umaf/gen.hpp"
#include "umaf/price.hpp"
#include "umaf/wmast.hpp"

namespace {

using namespace umaf;

struct Fixture {
  PhyloTree t1, t2;
  DualValues duals;
};

// Root duals of a real master, so thresholds and weights look like pricing
// sees them mid-solve.
Fixture makeFixture(int taxa) {
  auto [t1, t2] = generatePair({taxa, 50, taxa / 5, 7});
  SolveConfig config;
  config.timeLimitSeconds = 60;
  const SolveResult result = solve(t1, t2, config);
  return {t1, t2, result.rootDuals};
}

const Fixture& fixture(int taxa) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(taxa);
  if (it == cache.end()) it = cache.emplace(taxa, makeFixture(taxa)).first;
  return it->second;
}

WeightAssignment weightsOf(const Fixture& f) {
  WeightAssignment w;
  w.leaf = f.duals.alpha;
  w.internal1.assign(f.duals.beta1.size(), 0.0);
  w.internal2.assign(f.duals.beta2.size(), 0.0);
  for (std::size_t v = 0; v < w.internal1.size(); ++v) w.internal1[v] = -f.duals.beta1[v];
  for (std::size_t v = 0; v < w.internal2.size(); ++v) w.internal2[v] = -f.duals.beta2[v];
  return w;
}

void dpTables(benchmark::State& state, Execution execution) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const WeightAssignment w = weightsOf(f);
  for (auto _ : state) {
    DpTables tables(f.t1, f.t2, w, false, execution);
    benchmark::DoNotOptimize(tables.pinned(0, 0));
  }
}

void pricing(benchmark::State& state, Execution execution) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  PriceOptions options;
  options.execution = execution;
  for (auto _ : state) {
    auto blocks = price(f.t1, f.t2, f.duals, 1e-3, {}, options);
    benchmark::DoNotOptimize(blocks.data());
  }
}

void BM_DpSerial(benchmark::State& s) { dpTables(s, Execution::kSerial); }
void BM_DpParallel(benchmark::State& s) { dpTables(s, Execution::kParallel); }
void BM_PriceSerial(benchmark::State& s) { pricing(s, Execution::kSerial); }
void BM_PriceParallel(benchmark::State& s) { pricing(s, Execution::kParallel); }

BENCHMARK(BM_DpSerial)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DpParallel)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PriceSerial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PriceParallel)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
