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

#include <doctest.h>

#include "support.hpp"
#include "umaf/oracle.hpp"
#include "umaf/wmast.hpp"

using namespace umaf;
using namespace umaf::testing;

namespace {

WeightAssignment quartetWeights(const PhyloTree& t1, const PhyloTree& t2, double internal) {
  return WeightAssignment::uniform(t1, t2, 1.0, internal);
}

}  // namespace

TEST_SUITE("wmast") {

TEST_CASE("rooted cherries") {
  // Cut the edge above the {a,b} cherry in the same tree twice.
  const PhyloTree t = tree("((a,b),(c,d));");
  const VertexId u = t.neighbors(0)[0];
  VertexId above = -1;
  for (VertexId w : t.neighbors(u)) {
    if (!t.isLeaf(w)) above = w;
  }
  const int h = t.handleOf(above, u);
  WeightAssignment w = WeightAssignment::uniform(t, t, 0.0, 0.0);
  w.leaf[0] = w.leaf[1] = 1.0;
  w.internal1[u] = w.internal2[u] = -0.5;
  WmastResult r = rwmast(t, h, t, h, w);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(evaluateBlock(t, t, w, r.block) == doctest::Approx(1.0));

  w.internal1[u] = w.internal2[u] = -1.5;
  r = rwmast(t, h, t, h, w);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.block.size() == 1);

  WeightAssignment single = WeightAssignment::uniform(t, t, 0.0, 0.0);
  single.leaf[2] = 1.0;
  const int leafHandle = t.handleOf(t.neighbors(2)[0], 2);
  r = rwmast(t, leafHandle, t, t.handleOf(u, above), single);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.block == Block{2});
}

TEST_CASE("unrooted examples") {
  const PhyloTree t1 = tree("((a,b),(c,d));");
  const PhyloTree t2 = tree("((a,c),(b,d));");
  WmastResult r = wmast(t1, t1, quartetWeights(t1, t1, 0.0));
  CHECK(r.value == doctest::Approx(4.0));
  CHECK(r.block == allTaxa(t1));

  r = wmast(t1, t2, quartetWeights(t1, t2, 0.0));
  CHECK(r.value == doctest::Approx(3.0));
  CHECK(r.block.size() == 3);

  r = wmast(t1, t2, quartetWeights(t1, t2, -0.3));
  CHECK(r.value == doctest::Approx(1.8));
  CHECK(r.block.size() == 3);
  CHECK(isAgreementBlock(t1, t2, r.block));
}

TEST_CASE("matches brute force on random weighted instances") {
  Rng rng(20260101);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniformBelow(7));
    const auto [t1, t2] = randomPair(rng.next(), n, trial % 3 == 0);
    const WeightAssignment w = randomWeights(t1, t2, rng);
    const WmastResult dp = wmast(t1, t2, w);
    const WmastOracleResult brute = bruteWmast(t1, t2, w);
    CHECK(std::abs(dp.value - brute.value) <= 1e-9);
    // Witness soundness.
    CHECK(dp.connected);
    CHECK(isAgreementBlock(t1, t2, dp.block));
    CHECK(std::abs(evaluateBlock(t1, t2, w, dp.block) - dp.value) <= 1e-9);
  }
}

TEST_CASE("unit weights give the unrooted MAST") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const int n = 4 + static_cast<int>(seed % 7);
    const auto [t1, t2] = randomPair(seed, n, true);
    const WmastResult dp = wmast(t1, t2, WeightAssignment::uniform(t1, t2, 1.0, 0.0));
    int mast = 0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      Block y;
      for (int x = 0; x < n; ++x) {
        if (mask >> x & 1) y.push_back(x);
      }
      if (static_cast<int>(y.size()) > mast && agreeByQuartets(t1, t2, y)) mast = static_cast<int>(y.size());
    }
    CHECK(dp.value == doctest::Approx(mast));
    CHECK(static_cast<int>(dp.block.size()) == mast);
  }
}

TEST_CASE("serial and parallel tables are identical") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [t1, t2] = randomPair(rng.next(), 30, trial % 2 == 0);
    const WeightAssignment w = randomWeights(t1, t2, rng);
    const DpTables serial(t1, t2, w, true, Execution::kSerial);
    const DpTables parallel(t1, t2, w, true, Execution::kParallel);
    CHECK(serial.pinnedValues() == parallel.pinnedValues());
    const auto a = wmast(t1, t2, w, {CombineVariant::kPinned, Execution::kSerial});
    const auto b = wmast(t1, t2, w, {CombineVariant::kPinned, Execution::kParallel});
    CHECK(a.value == b.value);
    CHECK(a.block == b.block);
  }
}

TEST_CASE("paper-literal combine bounds the pinned value from above") {
  // It ranges over a superset (unions of two unpinned pieces), so it can only
  // overshoot, and when its witness is a genuine block the two agree.
  Rng rng(5150);
  int rejected = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniformBelow(6));
    const auto [t1, t2] = randomPair(rng.next(), n, trial % 2 == 0);
    const WeightAssignment w = randomWeights(t1, t2, rng);
    const WmastResult pinned = wmast(t1, t2, w);
    const WmastResult paper = wmast(t1, t2, w, {CombineVariant::kPaper, Execution::kSerial});
    CHECK(paper.value >= pinned.value - 1e-9);
    if (paper.connected) {
      CHECK(std::abs(paper.value - pinned.value) <= 1e-9);
    } else {
      ++rejected;
    }
  }
  MESSAGE("paper-combine witnesses not realizable: " << rejected << "/150");
}

TEST_CASE("both combines coincide without internal penalties") {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniformBelow(6));
    const auto [t1, t2] = randomPair(rng.next(), n, trial % 2 == 0);
    const WeightAssignment w = WeightAssignment::uniform(t1, t2, 1.0, 0.0);
    const WmastResult paper = wmast(t1, t2, w, {CombineVariant::kPaper, Execution::kSerial});
    CHECK(paper.connected);
    CHECK(paper.value == doctest::Approx(wmast(t1, t2, w).value));
  }
}

TEST_CASE("weight coverage is checked") {
  const PhyloTree t = tree("((a,b),(c,d));");
  WeightAssignment w = WeightAssignment::uniform(t, t, 1.0, 0.0);
  w.leaf.pop_back();
  CHECK_THROWS_AS(wmast(t, t, w), Error);
  const PhyloTree other = tree("((a,b),(c,e));");
  CHECK_THROWS_AS(wmast(t, other, WeightAssignment::uniform(t, t, 1.0, 0.0)), Error);
}

}  // TEST_SUITE
