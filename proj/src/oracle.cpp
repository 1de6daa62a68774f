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

#include "umaf/oracle.hpp"

#include <cstdint>
#include <string>

namespace umaf {

namespace {

void checkLimit(const PhyloTree& t1, const PhyloTree& t2, int maxTaxa, const char* what) {
  if (!sameTaxa(t1, t2)) throw Error(std::string(what) + ": taxon sets differ");
  if (t1.taxonCount() > maxTaxa) {
    throw Error(std::string(what) + ": " + std::to_string(t1.taxonCount()) +
                " taxa exceed the enumeration limit of " + std::to_string(maxTaxa));
  }
  if (maxTaxa > 20) throw Error(std::string(what) + ": limit above 20 taxa is not supported");
}

Block blockOfMask(std::uint32_t mask) {
  Block out;
  for (int x = 0; mask; ++x, mask >>= 1) {
    if (mask & 1U) out.push_back(x);
  }
  return out;
}

std::uint64_t vertexMask(const std::vector<VertexId>& vertices) {
  std::uint64_t m = 0;
  for (VertexId v : vertices) m |= std::uint64_t{1} << v;
  return m;
}

struct PartitionSearch {
  int n;
  const std::vector<char>& agrees;
  const std::vector<std::uint64_t>& span1;
  const std::vector<std::uint64_t>& span2;
  std::vector<std::uint32_t> blocks;
  int target = 0;

  // Restricted-growth assignment of taxon x onwards.
  bool assign(int x) {
    const int used = static_cast<int>(blocks.size());
    if (n - x < target - used) return false;
    if (x == n) return used == target && valid();
    for (int b = 0; b < used; ++b) {
      blocks[b] |= 1U << x;
      if (assign(x + 1)) return true;
      blocks[b] &= ~(1U << x);
    }
    if (used < target) {
      blocks.push_back(1U << x);
      if (assign(x + 1)) return true;
      blocks.pop_back();
    }
    return false;
  }

  bool valid() const {
    std::uint64_t seen1 = 0, seen2 = 0;
    for (std::uint32_t m : blocks) {
      if (!agrees[m]) return false;
      if ((seen1 & span1[m]) || (seen2 & span2[m])) return false;
      seen1 |= span1[m];
      seen2 |= span2[m];
    }
    return true;
  }
};

}  // namespace

void forEachAgreementBlock(
    const PhyloTree& t1, const PhyloTree& t2, int maxTaxa,
    const std::function<void(const Block&, const std::vector<VertexId>&,
                             const std::vector<VertexId>&)>& visit) {
  checkLimit(t1, t2, maxTaxa, "agreement block enumeration");
  const std::uint32_t full = (1U << t1.taxonCount()) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    Block block = blockOfMask(mask);
    if (!isAgreementBlock(t1, t2, block)) continue;
    visit(block, embedding(t1, block).internalVertices, embedding(t2, block).internalVertices);
  }
}

UmafOracleResult bruteUmaf(const PhyloTree& t1, const PhyloTree& t2, const OracleLimits& limits) {
  checkLimit(t1, t2, limits.maxTaxaUmaf, "brute-force uMAF");
  const int n = t1.taxonCount();
  const std::uint32_t count = 1U << n;
  std::vector<char> agrees(count, 0);
  std::vector<std::uint64_t> span1(count, 0), span2(count, 0);
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    Block block = blockOfMask(mask);
    agrees[mask] = isAgreementBlock(t1, t2, block);
    if (agrees[mask]) {
      span1[mask] = vertexMask(embedding(t1, block).spanVertices);
      span2[mask] = vertexMask(embedding(t2, block).spanVertices);
    }
  }
  PartitionSearch search{n, agrees, span1, span2, {}, 0};
  for (int k = 1; k <= n; ++k) {
    search.target = k;
    search.blocks.clear();
    if (search.assign(0)) {
      UmafOracleResult result;
      result.size = k;
      for (std::uint32_t m : search.blocks) result.forest.push_back(blockOfMask(m));
      return result;
    }
  }
  throw Error("brute-force uMAF: no agreement forest found");
}

WmastOracleResult bruteWmast(const PhyloTree& t1, const PhyloTree& t2,
                             const WeightAssignment& weights, const OracleLimits& limits) {
  weights.checkCovers(t1, t2);
  WmastOracleResult best;
  forEachAgreementBlock(t1, t2, limits.maxTaxaWmast,
                        [&](const Block& block, const std::vector<VertexId>& v1,
                            const std::vector<VertexId>& v2) {
                          double total = 0.0;
                          for (TaxonId x : block) total += weights.leaf[x];
                          for (VertexId v : v1) total += weights.internal1[v];
                          for (VertexId v : v2) total += weights.internal2[v];
                          if (total > best.value) {
                            best.value = total;
                            best.block = block;
                          }
                        });
  return best;
}

}  // namespace umaf
