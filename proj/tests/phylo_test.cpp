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

#include <set>

#include "support.hpp"
#include "umaf/phylo.hpp"

using namespace umaf;
using namespace umaf::testing;

TEST_SUITE("phylo") {

TEST_CASE("restriction of the quartet") {
  const PhyloTree q = tree("((a,b),(c,d));");
  CHECK(restrict(q, ids(q, {"a", "b", "c"})) == "(a,b,c);");
  CHECK(restrict(q, ids(q, {"a", "d"})) == "(a,d);");
  CHECK(restrict(q, ids(q, {"c"})) == "c;");
  CHECK(restrict(q, allTaxa(q)) == serializeNewick(q));
  CHECK_THROWS_AS(restrict(q, {7}), Error);
  CHECK_THROWS_AS(restrict(q, {}), Error);
}

TEST_CASE("embeddings of the quartet") {
  const PhyloTree q = tree("((a,b),(c,d));");
  const TaxonId a = q.taxa().id("a"), b = q.taxa().id("b");
  const VertexId u = q.neighbors(a)[0];
  CHECK(embedding(q, {a, b}).internalVertices == std::vector<VertexId>{u});
  CHECK(embedding(q, ids(q, {"a", "b", "c"})).internalVertices.size() == 2);
  CHECK(embedding(q, {a}).internalVertices.empty());
  CHECK(embedding(q, {a}).spanVertices == std::vector<VertexId>{a});
  CHECK_THROWS_AS(embedding(q, {9}), Error);
}

TEST_CASE("embeddings match exhaustive path unions") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    const PhyloTree t = randomTree(n, seed % 3 ? 50 : 100, seed);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      Block y;
      for (int x = 0; x < n; ++x) {
        if (mask >> x & 1) y.push_back(x);
      }
      const Embedding e = embedding(t, y);
      REQUIRE(e.internalVertices == pathUnionInternal(t, y));
      if (y.size() >= 2) {
        // Each of the |Y| - 2 branch points is internal; degree-2 span vertices add to it.
        CHECK(e.internalVertices.size() >= y.size() - 2);
        int branching = 0;
        for (VertexId v : e.internalVertices) {
          int inSpan = 0;
          for (VertexId w : t.neighbors(v)) {
            inSpan += std::binary_search(e.spanVertices.begin(), e.spanVertices.end(), w);
          }
          branching += inSpan == 3;
        }
        CHECK(branching == static_cast<int>(y.size()) - 2);
        CHECK((e.internalVertices.size() == y.size() - 2) ==
              (branching == static_cast<int>(e.internalVertices.size())));
      }
    }
  }
}

TEST_CASE("agreement examples") {
  const PhyloTree t1 = tree("((a,b),(c,d));");
  const PhyloTree t2 = tree("((a,c),(b,d));");
  CHECK(isAgreementBlock(t1, t2, ids(t1, {"a", "b", "c"})));
  CHECK_FALSE(isAgreementBlock(t1, t2, allTaxa(t1)));
  CHECK(isAgreementBlock(t1, t1, allTaxa(t1)));
}

TEST_CASE("agreement is reflexive, symmetric and matches quartet comparison") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto [t1, t2] = randomPair(seed, 7, seed % 2 == 0);
    for (std::uint32_t mask = 1; mask < (1u << 7); ++mask) {
      Block y;
      for (int x = 0; x < 7; ++x) {
        if (mask >> x & 1) y.push_back(x);
      }
      const bool agree = isAgreementBlock(t1, t2, y);
      CHECK(agree == isAgreementBlock(t2, t1, y));
      CHECK(agree == agreeByQuartets(t1, t2, y));
      CHECK(isAgreementBlock(t1, t1, y));
      if (y.size() <= 3) CHECK(agree);
    }
  }
}

TEST_CASE("rooted subtrees of the quartet") {
  const PhyloTree q = tree("((a,b),(c,d));");
  const auto& handles = q.rootedSubtrees();
  CHECK(handles.size() == 10);
  for (int i = 0; i < 4; ++i) CHECK(handles[i].isSingleton());
}

TEST_CASE("rooted subtree order and child partition") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const PhyloTree t = randomTree(4 + static_cast<int>(seed), 50, seed);
    const auto& handles = t.rootedSubtrees();
    REQUIRE(static_cast<int>(handles.size()) == 2 * (t.vertexCount() - 1));
    // Leaf sets by a plain search away from the parent.
    auto leaves = [&](const RootedSubtree& h) {
      std::set<TaxonId> out;
      std::vector<std::pair<VertexId, VertexId>> stack{{h.root, h.parent}};
      while (!stack.empty()) {
        auto [v, from] = stack.back();
        stack.pop_back();
        if (t.isLeaf(v)) out.insert(v);
        for (VertexId w : t.neighbors(v)) {
          if (w != from) stack.emplace_back(w, v);
        }
      }
      return out;
    };
    for (int i = 0; i < static_cast<int>(handles.size()); ++i) {
      const auto& h = handles[i];
      if (i > 0) CHECK(handles[i - 1].leafCount <= h.leafCount);
      CHECK(t.handleOf(h.parent, h.root) == i);
      CHECK(handles[h.reverse].reverse == i);
      const auto own = leaves(h);
      CHECK(static_cast<int>(own.size()) == h.leafCount);
      CHECK(h.isSingleton() == t.isLeaf(h.root));
      if (h.isSingleton()) continue;
      CHECK(h.children[0] < i);
      CHECK(h.children[1] < i);
      auto merged = leaves(handles[h.children[0]]);
      const auto second = leaves(handles[h.children[1]]);
      CHECK(merged.size() + second.size() == own.size());
      merged.insert(second.begin(), second.end());
      CHECK(merged == own);
    }
  }
}

TEST_CASE("agreement forest validation") {
  const PhyloTree t1 = tree("((a,b),(c,d));");
  const PhyloTree t2 = tree("((a,c),(b,d));");
  const TaxonId a = 0, b = 1, c = 2, d = 3;
  CHECK_NOTHROW(validateAgreementForest(t1, t2, {{a, b, c}, {d}}));
  CHECK_NOTHROW(validateAgreementForest(t1, t2, {{a}, {b}, {c}, {d}}));
  // Not a partition.
  CHECK_THROWS_AS(validateAgreementForest(t1, t2, {{a, b, c}}), Error);
  CHECK_THROWS_AS(validateAgreementForest(t1, t2, {{a, b, c}, {c, d}}), Error);
  // Disagreeing block.
  CHECK_THROWS_AS(validateAgreementForest(t1, t2, {{a, b, c, d}}), Error);
  // {a,d} and {b,c} agree but their embeddings cross in both trees.
  CHECK_THROWS_AS(validateAgreementForest(t1, t2, {{a, d}, {b, c}}), Error);
  // {a,b} and {c,d} are disjoint in T1 but share both internal vertices in T2.
  CHECK_THROWS_AS(validateAgreementForest(t1, t2, {{a, b}, {c, d}}), Error);
}

TEST_CASE("shape checks on construction") {
  TreeBuilder builder;
  const int a = builder.addLeaf("a");
  const int b = builder.addLeaf("b");
  builder.connect(a, b);
  CHECK_THROWS_AS(builder.build(), Error);
  CHECK_THROWS_AS(TaxonSet({"a", "a", "b"}), Error);
}

}  // TEST_SUITE
