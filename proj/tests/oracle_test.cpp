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

using namespace umaf;
using namespace umaf::testing;

TEST_SUITE("oracle") {

TEST_CASE("forest examples") {
  const PhyloTree t = randomTree(8, 50, 3);
  CHECK(bruteUmaf(t, t).size == 1);
  const PhyloTree q1 = tree("((a,b),(c,d));");
  const PhyloTree q2 = tree("((a,c),(b,d));");
  const auto r = bruteUmaf(q1, q2);
  CHECK(r.size == 2);
  CHECK(r.forest.size() == 2);
  CHECK_NOTHROW(validateAgreementForest(q1, q2, r.forest));
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto [t1, t2] = randomPair(seed, 7, true);
    const auto o = bruteUmaf(t1, t2);
    CHECK(o.size <= 7);
    CHECK(static_cast<int>(o.forest.size()) == o.size);
    CHECK_NOTHROW(validateAgreementForest(t1, t2, o.forest));
  }
}

TEST_CASE("weighted examples") {
  const PhyloTree t = randomTree(9, 50, 1);
  CHECK(bruteWmast(t, t, WeightAssignment::uniform(t, t, 1.0, 0.0)).value == doctest::Approx(9.0));
  const PhyloTree q1 = tree("((a,b),(c,d));");
  const PhyloTree q2 = tree("((a,c),(b,d));");
  const auto r = bruteWmast(q1, q2, WeightAssignment::uniform(q1, q2, 1.0, -0.3));
  CHECK(r.value == doctest::Approx(1.8));
  CHECK(r.block.size() == 3);
  const auto zero = bruteWmast(q1, q2, WeightAssignment::uniform(q1, q2, 0.0, -1.0));
  CHECK(zero.value == 0.0);
  CHECK(zero.block.size() == 1);
}

TEST_CASE("limits are hard errors") {
  const PhyloTree big = randomTree(9, 50, 2);
  CHECK_THROWS_AS(bruteUmaf(big, big), Error);
  OracleLimits limits;
  limits.maxTaxaUmaf = 9;
  CHECK(bruteUmaf(big, big, limits).size == 1);
  const PhyloTree huge = randomTree(13, 50, 2);
  CHECK_THROWS_AS(bruteWmast(huge, huge, WeightAssignment::uniform(huge, huge, 1.0, 0.0)), Error);
}

TEST_CASE("agreement block enumeration") {
  const PhyloTree q1 = tree("((a,b),(c,d));");
  const PhyloTree q2 = tree("((a,c),(b,d));");
  int count = 0;
  forEachAgreementBlock(q1, q2, 8, [&](const Block& b, const auto& v1, const auto& v2) {
    ++count;
    CHECK(v1 == pathUnionInternal(q1, b));
    CHECK(v2 == pathUnionInternal(q2, b));
  });
  // Every non-empty subset except the full quartet.
  CHECK(count == 14);
}

TEST_CASE("forest size tracks TBR distance where it is known") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto [t1, t2] = generatePair({7, 50, 0, seed});
    CHECK(bruteUmaf(t1, t2).size - 1 == 0);
  }
  // The two quartet topologies are one move apart.
  CHECK(bruteUmaf(tree("((a,b),(c,d));"), tree("((a,c),(b,d));")).size - 1 == 1);
}

}  // TEST_SUITE
