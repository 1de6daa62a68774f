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
#include "umaf/price.hpp"

using namespace umaf;
using namespace umaf::testing;

namespace {

DualValues flatDuals(const PhyloTree& t1, const PhyloTree& t2, double beta) {
  DualValues d;
  d.alpha.assign(t1.taxonCount(), 1.0);
  d.beta1.assign(t1.vertexCount(), 0.0);
  d.beta2.assign(t2.vertexCount(), 0.0);
  for (VertexId v = t1.taxonCount(); v < t1.vertexCount(); ++v) d.beta1[v] = beta;
  for (VertexId v = t2.taxonCount(); v < t2.vertexCount(); ++v) d.beta2[v] = beta;
  return d;
}

}  // namespace

TEST_SUITE("price") {

TEST_CASE("identical trees price the whole taxon set") {
  const PhyloTree t = randomTree(12, 50, 3);
  const auto out = price(t, t, flatDuals(t, t, 0.0), 0.0, {});
  REQUIRE_FALSE(out.empty());
  CHECK(out.front().block == allTaxa(t));
  CHECK(out.front().score == doctest::Approx(12.0));
  CHECK(out.size() == 1);
}

TEST_CASE("disagreeing quartet under flat packing duals") {
  const PhyloTree t1 = tree("((a,b),(c,d));");
  const PhyloTree t2 = tree("((a,c),(b,d));");
  const auto out = price(t1, t2, flatDuals(t1, t2, 0.5), 0.0, {});
  REQUIRE_FALSE(out.empty());
  CHECK(out.front().score == doctest::Approx(1.0));
  CHECK(brutePrice(t1, t2, flatDuals(t1, t2, 0.5), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("threshold enumeration is exact") {
  Rng rng(424242);
  for (double eps : {0.0, 1e-3, 0.1, 0.7}) {
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 4 + static_cast<int>(rng.uniformBelow(5));
      const auto [t1, t2] = randomPair(rng.next(), n, trial % 2 == 0);
      const DualValues d = randomDuals(t1, t2, rng);
      const auto out = price(t1, t2, d, eps, {});
      REQUIRE_FALSE(out.empty());
      CHECK(std::abs(out.front().score - brutePrice(t1, t2, d, eps)) <= 1e-9);
    }
  }
}

TEST_CASE("forbidden blocks are excluded exactly") {
  Rng rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniformBelow(5));
    const auto [t1, t2] = randomPair(rng.next(), n, trial % 2 == 0);
    const DualValues d = randomDuals(t1, t2, rng);
    const double eps = trial % 3 == 0 ? 0.0 : 1e-3;
    BlockSet forbidden;
    // Forbid the current best a few times in a row.
    for (int round = 0; round < 3; ++round) {
      const auto out = price(t1, t2, d, eps, forbidden);
      if (out.empty()) break;
      for (const auto& p : out) CHECK_FALSE(forbidden.contains(p.block));
      CHECK(std::abs(out.front().score - brutePrice(t1, t2, d, eps, forbidden)) <= 1e-9);
      forbidden.insert(out.front().block);
    }
  }
}

TEST_CASE("returned candidates agree, are disjoint and are scored from embeddings") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto [t1, t2] = randomPair(rng.next(), 20, trial % 2 == 0);
    const DualValues d = randomDuals(t1, t2, rng);
    const auto out = price(t1, t2, d, 1e-3, {});
    std::vector<int> seenTaxa(t1.taxonCount()), seen1(t1.vertexCount()), seen2(t2.vertexCount());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& p = out[i];
      CHECK(agreeByQuartets(t1, t2, p.block));
      CHECK(p.internal1 == pathUnionInternal(t1, p.block));
      CHECK(p.internal2 == pathUnionInternal(t2, p.block));
      double expect = 0.0, m = 0.0;
      for (TaxonId x : p.block) expect += d.alpha[x];
      for (VertexId v : p.internal1) expect -= d.beta1[v], m = std::max(m, d.beta1[v]);
      for (VertexId v : p.internal2) expect -= d.beta2[v], m = std::max(m, d.beta2[v]);
      CHECK(std::abs(p.score - (expect - 1e-3 * m)) <= 1e-12);
      if (i > 0) CHECK(p.score <= out[i - 1].score);
      for (TaxonId x : p.block) CHECK(seenTaxa[x]++ == 0);
      for (VertexId v : p.internal1) CHECK(seen1[v]++ == 0);
      for (VertexId v : p.internal2) CHECK(seen2[v]++ == 0);
    }
  }
}

TEST_CASE("lowering a packing dual never lowers the optimum") {
  Rng rng(2718);
  for (int trial = 0; trial < 60; ++trial) {
    const auto [t1, t2] = randomPair(rng.next(), 12, trial % 2 == 0);
    DualValues d = randomDuals(t1, t2, rng);
    const double eps = trial % 2 ? 1e-3 : 0.2;
    double before = price(t1, t2, d, eps, {}).front().score;
    for (int step = 0; step < 5; ++step) {
      auto& beta = rng.uniformBelow(2) ? d.beta1 : d.beta2;
      const auto v = static_cast<VertexId>(t1.taxonCount() + rng.uniformBelow(t1.internalCount()));
      beta[v] *= uniformReal(rng, 0.0, 1.0);
      const double after = price(t1, t2, d, eps, {}).front().score;
      CHECK(after >= before - 1e-12);
      before = after;
    }
  }
}

TEST_CASE("serial and parallel pricing agree") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [t1, t2] = randomPair(rng.next(), 30, trial % 2 == 0);
    const DualValues d = randomDuals(t1, t2, rng);
    PriceOptions serial, parallel;
    parallel.execution = Execution::kParallel;
    const auto a = price(t1, t2, d, 1e-3, {}, serial);
    const auto b = price(t1, t2, d, 1e-3, {}, parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].block == b[i].block);
      CHECK(a[i].score == b[i].score);
    }
  }
}

TEST_CASE("score floor and candidate cap") {
  const PhyloTree t = randomTree(10, 50, 1);
  PriceOptions options;
  options.minScore = 10.0;
  CHECK(price(t, t, flatDuals(t, t, 0.0), 0.0, {}, options).empty());
  options.minScore = 1.0;
  options.maxCandidates = 1;
  const auto [t1, t2] = randomPair(17, 16, true);
  CHECK(price(t1, t2, flatDuals(t1, t2, 0.3), 0.0, {}, options).size() <= 1);
}

TEST_CASE("argument validation") {
  const PhyloTree t = tree("((a,b),(c,d));");
  DualValues d = flatDuals(t, t, 0.0);
  CHECK_THROWS_AS(price(t, t, d, -1.0, {}), Error);
  d.alpha.pop_back();
  CHECK_THROWS_AS(price(t, t, d, 0.0, {}), Error);
}

}  // TEST_SUITE
