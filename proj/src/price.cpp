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

#include "umaf/price.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <queue>
#include <tuple>

namespace umaf {

namespace {

constexpr double kTieTolerance = 1e-12;

struct Candidate {
  double value;
  Block block;
};

Block unionBlocks(const Block& a, const Block& b) {
  Block out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Best block under the weights the tables were built with.
Candidate bestOf(const PhyloTree& t1, const PhyloTree& t2, const DpTables& tables,
                 const std::vector<double>& leaf) {
  Candidate best{kImpossible, {}};
  for (TaxonId x = 0; x < static_cast<int>(leaf.size()); ++x) {
    if (leaf[x] > best.value) best = {leaf[x], {x}};
  }
  const auto& handles1 = t1.rootedSubtrees();
  const auto& handles2 = t2.rootedSubtrees();
  int best1 = -1, best2 = -1;
  for (int h1 = 0; h1 < tables.rows(); ++h1) {
    const int r1 = handles1[h1].reverse;
    if (r1 < h1) continue;
    for (int h2 = 0; h2 < tables.cols(); ++h2) {
      const double value = tables.pinned(h1, h2) + tables.pinned(r1, handles2[h2].reverse);
      if (value > best.value) {
        best.value = value;
        best1 = h1;
        best2 = h2;
      }
    }
  }
  if (best1 >= 0) {
    best.block = unionBlocks(tables.tracePinned(best1, best2),
                             tables.tracePinned(handles1[best1].reverse, handles2[best2].reverse));
  }
  return best;
}

// Witnesses of the highest combined table entries.
std::vector<Block> topWitnesses(const PhyloTree& t1, const PhyloTree& t2, const DpTables& tables,
                                int pool) {
  const auto& handles1 = t1.rootedSubtrees();
  const auto& handles2 = t2.rootedSubtrees();
  std::vector<std::tuple<double, int, int>> entries;
  for (int h1 = 0; h1 < tables.rows(); ++h1) {
    const int r1 = handles1[h1].reverse;
    if (r1 < h1) continue;
    for (int h2 = 0; h2 < tables.cols(); ++h2) {
      const double value = tables.pinned(h1, h2) + tables.pinned(r1, handles2[h2].reverse);
      if (!isImpossible(value)) entries.emplace_back(-value, h1, h2);
    }
  }
  const auto keep = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(pool));
  std::partial_sort(entries.begin(), entries.begin() + keep, entries.end());
  std::vector<Block> out;
  BlockSet seen;
  for (std::size_t i = 0; i < keep; ++i) {
    auto [negValue, h1, h2] = entries[i];
    Block block = unionBlocks(tables.tracePinned(h1, h2),
                              tables.tracePinned(handles1[h1].reverse, handles2[h2].reverse));
    if (seen.insert(block).second) out.push_back(std::move(block));
  }
  return out;
}

// Best block outside `forbidden` for fixed threshold weights, by Lawler-style
// partitioning of the block space into (must-contain, must-avoid) subproblems.
// Must-contain taxa carry a bonus large enough to dominate every other term.
std::optional<Block> bestAllowed(const PhyloTree& t1, const PhyloTree& t2,
                                 const WeightAssignment& weights, const BlockSet& forbidden) {
  double bonus = 1.0;
  for (double w : weights.leaf) bonus += std::abs(w);
  for (const auto* internal : {&weights.internal1, &weights.internal2}) {
    for (double w : *internal) {
      if (!isImpossible(w)) bonus += std::abs(w);
    }
  }
  const int n = t1.taxonCount();
  struct Sub {
    double value;
    Block block;
    Block in, out;
  };
  auto solve = [&](const Block& in, const Block& out) -> std::optional<Sub> {
    WeightAssignment w = weights;
    for (TaxonId x : out) w.leaf[x] = kImpossible;
    for (TaxonId x : in) w.leaf[x] += bonus;
    DpTables tables(t1, t2, w);
    Candidate best = bestOf(t1, t2, tables, w.leaf);
    if (isImpossible(best.value)) return std::nullopt;
    if (!std::includes(best.block.begin(), best.block.end(), in.begin(), in.end())) {
      return std::nullopt;
    }
    return Sub{evaluateBlock(t1, t2, weights, best.block), std::move(best.block), in, out};
  };
  auto worse = [](const Sub& a, const Sub& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.block > b.block;
  };
  std::priority_queue<Sub, std::vector<Sub>, decltype(worse)> queue(worse);
  if (auto root = solve({}, {})) queue.push(std::move(*root));
  while (!queue.empty()) {
    Sub top = queue.top();
    queue.pop();
    if (!forbidden.contains(top.block)) return top.block;
    Block in = top.in, out = top.out;
    for (TaxonId y : top.block) {
      if (std::binary_search(top.in.begin(), top.in.end(), y)) continue;
      Block out2 = makeBlock([&] { auto o = out; o.push_back(y); return o; }());
      if (auto sub = solve(in, out2)) queue.push(std::move(*sub));
      in = makeBlock([&] { auto i = in; i.push_back(y); return i; }());
    }
    // Strict supersets of the popped block.
    Block outside = out;
    for (TaxonId z = 0; z < n; ++z) {
      if (std::binary_search(top.block.begin(), top.block.end(), z) ||
          std::binary_search(top.out.begin(), top.out.end(), z)) {
        continue;
      }
      Block in2 = top.block;
      in2.push_back(z);
      if (auto sub = solve(makeBlock(in2), outside)) queue.push(std::move(*sub));
      outside = makeBlock([&] { auto o = outside; o.push_back(z); return o; }());
    }
  }
  return std::nullopt;
}

std::vector<double> thresholds(const DualValues& duals, double epsilon) {
  if (epsilon == 0.0) return {std::numeric_limits<double>::infinity()};
  std::vector<double> values{0.0};
  for (const auto* beta : {&duals.beta1, &duals.beta2}) {
    for (double b : *beta) values.push_back(std::max(0.0, b));
  }
  std::sort(values.begin(), values.end());
  // Merge near-equal values, keeping the largest of each cluster.
  std::vector<double> out;
  for (double v : values) {
    if (!out.empty() && v - out.back() <= kTieTolerance) {
      out.back() = v;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

PricedBlock scoreBlock(const PhyloTree& t1, const PhyloTree& t2, const DualValues& duals,
                       double epsilon, const Block& block) {
  PricedBlock p;
  p.block = block;
  p.internal1 = embedding(t1, block).internalVertices;
  p.internal2 = embedding(t2, block).internalVertices;
  double total = 0.0;
  for (TaxonId x : block) total += duals.alpha[x];
  for (VertexId v : p.internal1) {
    total -= duals.beta1[v];
    p.maxBeta = std::max(p.maxBeta, duals.beta1[v]);
  }
  for (VertexId v : p.internal2) {
    total -= duals.beta2[v];
    p.maxBeta = std::max(p.maxBeta, duals.beta2[v]);
  }
  p.reducedWeight = total;
  p.score = total - epsilon * p.maxBeta;
  return p;
}

std::vector<PricedBlock> price(const PhyloTree& t1, const PhyloTree& t2, const DualValues& duals,
                               double epsilon, const BlockSet& forbidden,
                               const PriceOptions& options) {
  if (!sameTaxa(t1, t2)) throw Error("pricing: taxon sets differ");
  if (epsilon < 0.0) throw Error("pricing: epsilon must be non-negative");
  if (static_cast<int>(duals.alpha.size()) != t1.taxonCount() ||
      static_cast<int>(duals.beta1.size()) != t1.vertexCount() ||
      static_cast<int>(duals.beta2.size()) != t2.vertexCount()) {
    throw Error("pricing: dual vectors do not match the trees");
  }
  const std::vector<double> levels = thresholds(duals, epsilon);
  std::vector<std::vector<Block>> found(levels.size());

  auto runLevel = [&](std::size_t i) {
    const double m = levels[i];
    WeightAssignment w;
    w.leaf = duals.alpha;
    w.internal1.assign(t1.vertexCount(), 0.0);
    w.internal2.assign(t2.vertexCount(), 0.0);
    for (VertexId v = t1.taxonCount(); v < t1.vertexCount(); ++v) {
      w.internal1[v] = duals.beta1[v] <= m ? -duals.beta1[v] : kImpossible;
    }
    for (VertexId v = t2.taxonCount(); v < t2.vertexCount(); ++v) {
      w.internal2[v] = duals.beta2[v] <= m ? -duals.beta2[v] : kImpossible;
    }
    DpTables tables(t1, t2, w);
    std::vector<Block> blocks;
    if (options.variant == CombineVariant::kPaper) {
      WmastResult literal = wmast(t1, t2, w, {CombineVariant::kPaper, Execution::kSerial});
      if (literal.connected && !literal.block.empty() &&
          isAgreementBlock(t1, t2, literal.block)) {
        blocks.push_back(std::move(literal.block));
      }
    }
    Candidate best = bestOf(t1, t2, tables, w.leaf);
    if (!best.block.empty()) {
      if (forbidden.contains(best.block)) {
        if (auto allowed = bestAllowed(t1, t2, w, forbidden)) blocks.push_back(*allowed);
      } else {
        blocks.push_back(best.block);
      }
    }
    for (auto& b : topWitnesses(t1, t2, tables, options.tracebackPool)) {
      blocks.push_back(std::move(b));
    }
    found[i] = std::move(blocks);
  };

  const auto levelCount = static_cast<long>(levels.size());
  if (options.execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < levelCount; ++i) runLevel(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < levelCount; ++i) runLevel(static_cast<std::size_t>(i));
  }

  std::vector<PricedBlock> pool;
  BlockSet seen;
  for (const auto& blocks : found) {
    for (const auto& block : blocks) {
      if (forbidden.contains(block) || !seen.insert(block).second) continue;
      pool.push_back(scoreBlock(t1, t2, duals, epsilon, block));
    }
  }
  std::sort(pool.begin(), pool.end(), [](const PricedBlock& a, const PricedBlock& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.block < b.block;
  });

  std::vector<PricedBlock> chosen;
  std::vector<char> usedTaxa(t1.taxonCount(), 0), used1(t1.vertexCount(), 0),
      used2(t2.vertexCount(), 0);
  for (auto& candidate : pool) {
    if (static_cast<int>(chosen.size()) >= options.maxCandidates) break;
    if (!(candidate.score > options.minScore)) break;
    bool disjoint = true;
    for (TaxonId x : candidate.block) disjoint = disjoint && !usedTaxa[x];
    for (VertexId v : candidate.internal1) disjoint = disjoint && !used1[v];
    for (VertexId v : candidate.internal2) disjoint = disjoint && !used2[v];
    if (!disjoint) continue;
    if (!isAgreementBlock(t1, t2, candidate.block)) {
      throw Error("pricing produced a block that does not agree");
    }
    for (TaxonId x : candidate.block) usedTaxa[x] = 1;
    for (VertexId v : candidate.internal1) used1[v] = 1;
    for (VertexId v : candidate.internal2) used2[v] = 1;
    chosen.push_back(std::move(candidate));
  }
  return chosen;
}

}  // namespace umaf
