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

// Helpers shared by the unit tests and the acceptance runner. Everything here
// is deliberately naive: exhaustive enumerations and path unions that do not
// reuse the library's DP or embedding code.

#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "umaf/gen.hpp"
#include "umaf/newick.hpp"
#include "umaf/phylo.hpp"
#include "umaf/price.hpp"
#include "umaf/wmast.hpp"

namespace umaf::testing {

inline PhyloTree tree(std::string_view newick) { return parseNewick(newick); }

inline Block ids(const PhyloTree& t, const std::vector<std::string>& labels) {
  std::vector<TaxonId> out;
  for (const auto& label : labels) out.push_back(t.taxa().id(label));
  return makeBlock(out);
}

// Vertices on the tree path between a and b, endpoints included.
inline std::vector<VertexId> pathBetween(const PhyloTree& t, VertexId a, VertexId b) {
  std::vector<VertexId> parent(t.vertexCount(), -1);
  std::vector<VertexId> queue{a};
  parent[a] = a;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (VertexId w : t.neighbors(queue[i])) {
      if (parent[w] < 0) {
        parent[w] = queue[i];
        queue.push_back(w);
      }
    }
  }
  std::vector<VertexId> path{b};
  while (path.back() != a) path.push_back(parent[path.back()]);
  return path;
}

// Internal vertices of the union of pairwise paths among the block's leaves.
inline std::vector<VertexId> pathUnionInternal(const PhyloTree& t, const Block& block) {
  std::set<VertexId> span;
  for (std::size_t i = 0; i < block.size(); ++i) {
    for (std::size_t j = i + 1; j < block.size(); ++j) {
      for (VertexId v : pathBetween(t, block[i], block[j])) span.insert(v);
    }
  }
  std::vector<VertexId> out;
  for (VertexId v : span) {
    if (!t.isLeaf(v)) out.push_back(v);
  }
  return out;
}

// Four-point test: the topology on {a,b,c,d} read off path intersections.
// Returns the taxon paired with a.
inline TaxonId quartetPartner(const PhyloTree& t, TaxonId a, TaxonId b, TaxonId c, TaxonId d) {
  auto disjoint = [&](TaxonId p, TaxonId q, TaxonId r, TaxonId s) {
    auto x = pathBetween(t, p, q), y = pathBetween(t, r, s);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::vector<VertexId> both;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
    return both.empty();
  };
  if (disjoint(a, b, c, d)) return b;
  if (disjoint(a, c, b, d)) return c;
  return d;
}

// Agreement by comparing every induced quartet; independent of the
// canonical-string machinery.
inline bool agreeByQuartets(const PhyloTree& t1, const PhyloTree& t2, const Block& y) {
  const std::size_t k = y.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      for (std::size_t c = b + 1; c < k; ++c)
        for (std::size_t d = c + 1; d < k; ++d) {
          if (quartetPartner(t1, y[a], y[b], y[c], y[d]) !=
              quartetPartner(t2, y[a], y[b], y[c], y[d])) {
            return false;
          }
        }
  return true;
}

// Two independent random trees when `independent`, else a TBR-perturbed pair.
inline std::pair<PhyloTree, PhyloTree> randomPair(std::uint64_t seed, int n, bool independent) {
  Rng rng(seed);
  const int skew = rng.uniformBelow(2) ? 90 : 50;
  PhyloTree t1 = randomTree(n, skew, rng);
  if (independent) return {t1, randomTree(n, 50, rng)};
  PhyloTree t2 = t1;
  const int moves = static_cast<int>(rng.uniformBelow(4));
  for (int i = 0; i < moves; ++i) t2 = tbrMove(t2, rng);
  return {std::move(t1), std::move(t2)};
}

inline double uniformReal(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng.uniformBelow(1u << 30)) / double(1u << 30);
}

inline WeightAssignment randomWeights(const PhyloTree& t1, const PhyloTree& t2, Rng& rng) {
  WeightAssignment w;
  w.leaf.resize(t1.taxonCount());
  for (auto& x : w.leaf) x = uniformReal(rng, 0.0, 2.0);
  w.internal1.assign(t1.vertexCount(), 0.0);
  w.internal2.assign(t2.vertexCount(), 0.0);
  for (VertexId v = t1.taxonCount(); v < t1.vertexCount(); ++v) w.internal1[v] = uniformReal(rng, -2.0, 0.0);
  for (VertexId v = t2.taxonCount(); v < t2.vertexCount(); ++v) w.internal2[v] = uniformReal(rng, -2.0, 0.0);
  return w;
}

// Dual-shaped values: α ≡ 1, β ≥ 0 with a share of exact zeros and ties.
inline DualValues randomDuals(const PhyloTree& t1, const PhyloTree& t2, Rng& rng) {
  DualValues d;
  d.alpha.assign(t1.taxonCount(), 1.0);
  d.beta1.assign(t1.vertexCount(), 0.0);
  d.beta2.assign(t2.vertexCount(), 0.0);
  auto draw = [&] {
    switch (rng.uniformBelow(4)) {
      case 0: return 0.0;
      case 1: return 0.5;
      default: return uniformReal(rng, 0.0, 1.5);
    }
  };
  for (VertexId v = t1.taxonCount(); v < t1.vertexCount(); ++v) d.beta1[v] = draw();
  for (VertexId v = t2.taxonCount(); v < t2.vertexCount(); ++v) d.beta2[v] = draw();
  return d;
}

// Exhaustive perturbed pricing objective over agreeing subsets.
inline double brutePrice(const PhyloTree& t1, const PhyloTree& t2, const DualValues& d, double eps,
                         const BlockSet& forbidden = {}) {
  const int n = t1.taxonCount();
  double best = kImpossible;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Block y;
    for (int x = 0; x < n; ++x) {
      if (mask >> x & 1) y.push_back(x);
    }
    if (forbidden.contains(y) || !agreeByQuartets(t1, t2, y)) continue;
    double score = 0.0, m = 0.0;
    for (TaxonId x : y) score += d.alpha[x];
    for (VertexId v : pathUnionInternal(t1, y)) {
      score -= d.beta1[v];
      m = std::max(m, d.beta1[v]);
    }
    for (VertexId v : pathUnionInternal(t2, y)) {
      score -= d.beta2[v];
      m = std::max(m, d.beta2[v]);
    }
    best = std::max(best, score - eps * m);
  }
  return best;
}

}  // namespace umaf::testing
