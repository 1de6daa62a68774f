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

#include "umaf/wmast.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <omp.h>

namespace umaf {

WeightAssignment WeightAssignment::uniform(const PhyloTree& t1, const PhyloTree& t2,
                                           double leafWeight, double internalWeight) {
  WeightAssignment w;
  w.leaf.assign(t1.taxonCount(), leafWeight);
  w.internal1.assign(t1.vertexCount(), internalWeight);
  w.internal2.assign(t2.vertexCount(), internalWeight);
  return w;
}

void WeightAssignment::checkCovers(const PhyloTree& t1, const PhyloTree& t2) const {
  if (!sameTaxa(t1, t2)) throw Error("weighted agreement subtree: taxon sets differ");
  if (static_cast<int>(leaf.size()) != t1.taxonCount() ||
      static_cast<int>(internal1.size()) != t1.vertexCount() ||
      static_cast<int>(internal2.size()) != t2.vertexCount()) {
    throw Error("weight assignment does not cover both trees");
  }
}

DpTables::DpTables(const PhyloTree& t1, const PhyloTree& t2, const WeightAssignment& weights,
                   bool withUnpinned, Execution execution)
    : t1_(t1),
      t2_(t2),
      w_(weights),
      rows_(static_cast<int>(t1.rootedSubtrees().size())),
      cols_(static_cast<int>(t2.rootedSubtrees().size())) {
  w_.checkCovers(t1, t2);
  const std::size_t cells = static_cast<std::size_t>(rows_) * cols_;
  pinned_.assign(cells, kImpossible);
  pinnedChoice_.assign(cells, kNone);
  if (withUnpinned) {
    unpinned_.assign(cells, kImpossible);
    unpinnedChoice_.assign(cells, kNone);
    top1_.assign(cells, -1);
    top2_.assign(cells, -1);
  }
  const auto& handles = t1.rootedSubtrees();
  if (execution == Execution::kSerial) {
    for (int h1 = 0; h1 < rows_; ++h1) {
      computeRow(h1);
      if (withUnpinned) computeUnpinnedRow(h1);
    }
    return;
  }
  // Rows only read rows of strictly smaller leaf count, so every leaf-count
  // level is an independent batch.
  int begin = 0;
  while (begin < rows_) {
    int end = begin;
    while (end < rows_ && handles[end].leafCount == handles[begin].leafCount) ++end;
#pragma omp parallel for schedule(dynamic, 4)
    for (int h1 = begin; h1 < end; ++h1) {
      computeRow(h1);
      if (withUnpinned) computeUnpinnedRow(h1);
    }
    begin = end;
  }
}

double DpTables::weight1(VertexId v) const {
  return t1_.isLeaf(v) ? w_.leaf[v] : w_.internal1[v];
}

double DpTables::weight2(VertexId v) const {
  return t2_.isLeaf(v) ? w_.leaf[v] : w_.internal2[v];
}

void DpTables::computeRow(int h1) {
  const RootedSubtree& a = t1_.rootedSubtrees()[h1];
  const auto& handles2 = t2_.rootedSubtrees();
  const double wa = a.isSingleton() ? 0.0 : w_.internal1[a.root];
  for (int h2 = 0; h2 < cols_; ++h2) {
    const RootedSubtree& b = handles2[h2];
    double best = kImpossible;
    std::uint8_t choice = kNone;
    auto consider = [&](double value, Choice c) {
      if (value > best) {
        best = value;
        choice = c;
      }
    };
    if (a.isSingleton() && b.isSingleton()) {
      if (a.root == b.root) {
        best = w_.leaf[a.root];
        choice = kLeafMatch;
      }
    } else {
      const double wb = b.isSingleton() ? 0.0 : w_.internal2[b.root];
      if (!a.isSingleton() && !b.isSingleton()) {
        const auto [c11, c12] = a.children;
        const auto [c21, c22] = b.children;
        const double straight = pinned(c11, c21) + pinned(c12, c22);
        const double crossed = pinned(c11, c22) + pinned(c12, c21);
        if (straight >= crossed) {
          consider(wa + wb + straight, kJoinStraight);
        } else {
          consider(wa + wb + crossed, kJoinCrossed);
        }
      }
      if (!a.isSingleton()) {
        consider(wa + pinned(a.children[0], h2), kDown1First);
        consider(wa + pinned(a.children[1], h2), kDown1Second);
      }
      if (!b.isSingleton()) {
        consider(wb + pinned(h1, b.children[0]), kDown2First);
        consider(wb + pinned(h1, b.children[1]), kDown2Second);
      }
    }
    pinned_[index(h1, h2)] = best;
    pinnedChoice_[index(h1, h2)] = choice;
  }
}

void DpTables::computeUnpinnedRow(int h1) {
  const RootedSubtree& a = t1_.rootedSubtrees()[h1];
  const auto& handles2 = t2_.rootedSubtrees();
  for (int h2 = 0; h2 < cols_; ++h2) {
    const RootedSubtree& b = handles2[h2];
    double best = kImpossible;
    std::uint8_t choice = kNone;
    VertexId top1 = -1, top2 = -1;
    auto inherit = [&](double value, Choice c, int g1, int g2) {
      if (value > best) {
        best = value;
        choice = c;
        top1 = top1_[index(g1, g2)];
        top2 = top2_[index(g1, g2)];
      }
    };
    if (a.isSingleton() && b.isSingleton()) {
      if (a.root == b.root) {
        best = w_.leaf[a.root];
        choice = kLeafMatch;
        top1 = top2 = a.root;
      }
    } else {
      if (!a.isSingleton() && !b.isSingleton()) {
        const auto [c11, c12] = a.children;
        const auto [c21, c22] = b.children;
        const double straight = pinned(c11, c21) + pinned(c12, c22);
        const double crossed = pinned(c11, c22) + pinned(c12, c21);
        const double join = w_.internal1[a.root] + w_.internal2[b.root] + std::max(straight, crossed);
        if (join > best) {
          best = join;
          choice = straight >= crossed ? kJoinStraight : kJoinCrossed;
          top1 = a.root;
          top2 = b.root;
        }
      }
      if (!b.isSingleton()) {
        inherit(unpinned_[index(h1, b.children[0])], kDown2First, h1, b.children[0]);
        inherit(unpinned_[index(h1, b.children[1])], kDown2Second, h1, b.children[1]);
      }
      if (!a.isSingleton()) {
        inherit(unpinned_[index(a.children[0], h2)], kDown1First, a.children[0], h2);
        inherit(unpinned_[index(a.children[1], h2)], kDown1Second, a.children[1], h2);
      }
    }
    unpinned_[index(h1, h2)] = best;
    unpinnedChoice_[index(h1, h2)] = choice;
    top1_[index(h1, h2)] = top1;
    top2_[index(h1, h2)] = top2;
  }
}

std::pair<VertexId, VertexId> DpTables::unpinnedTop(int h1, int h2) const {
  return {top1_.at(index(h1, h2)), top2_.at(index(h1, h2))};
}

void DpTables::tracePinnedInto(int h1, int h2, Block& out) const {
  const auto& handles1 = t1_.rootedSubtrees();
  const auto& handles2 = t2_.rootedSubtrees();
  std::vector<std::pair<int, int>> stack{{h1, h2}};
  while (!stack.empty()) {
    auto [g1, g2] = stack.back();
    stack.pop_back();
    const auto& a = handles1[g1];
    const auto& b = handles2[g2];
    switch (pinnedChoice_[index(g1, g2)]) {
      case kLeafMatch:
        out.push_back(a.root);
        break;
      case kJoinStraight:
        stack.emplace_back(a.children[0], b.children[0]);
        stack.emplace_back(a.children[1], b.children[1]);
        break;
      case kJoinCrossed:
        stack.emplace_back(a.children[0], b.children[1]);
        stack.emplace_back(a.children[1], b.children[0]);
        break;
      case kDown1First: stack.emplace_back(a.children[0], g2); break;
      case kDown1Second: stack.emplace_back(a.children[1], g2); break;
      case kDown2First: stack.emplace_back(g1, b.children[0]); break;
      case kDown2Second: stack.emplace_back(g1, b.children[1]); break;
      default:
        throw Error("traceback through an impossible table entry");
    }
  }
}

Block DpTables::tracePinned(int h1, int h2) const {
  Block out;
  tracePinnedInto(h1, h2, out);
  std::sort(out.begin(), out.end());
  return out;
}

Block DpTables::traceUnpinned(int h1, int h2) const {
  const auto& handles1 = t1_.rootedSubtrees();
  const auto& handles2 = t2_.rootedSubtrees();
  Block out;
  while (true) {
    const auto& a = handles1[h1];
    const auto& b = handles2[h2];
    const auto choice = unpinnedChoice_.at(index(h1, h2));
    if (choice == kLeafMatch) {
      out.push_back(a.root);
      break;
    }
    if (choice == kJoinStraight) {
      tracePinnedInto(a.children[0], b.children[0], out);
      tracePinnedInto(a.children[1], b.children[1], out);
      break;
    }
    if (choice == kJoinCrossed) {
      tracePinnedInto(a.children[0], b.children[1], out);
      tracePinnedInto(a.children[1], b.children[0], out);
      break;
    }
    switch (choice) {
      case kDown1First: h1 = a.children[0]; break;
      case kDown1Second: h1 = a.children[1]; break;
      case kDown2First: h2 = b.children[0]; break;
      case kDown2Second: h2 = b.children[1]; break;
      default:
        throw Error("traceback through an impossible table entry");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// pathWeight[u][v]: internal weight on the path u..v, counting u, excluding v.
std::vector<std::vector<double>> pathWeights(const PhyloTree& tree,
                                             const std::vector<double>& internal) {
  const int vc = tree.vertexCount();
  std::vector<std::vector<double>> out(vc, std::vector<double>(vc, 0.0));
  std::vector<VertexId> parent(vc), stack;
  for (VertexId u = 0; u < vc; ++u) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[u] = u;
    stack.assign(1, u);
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      const double through = out[u][x] + (tree.isLeaf(x) ? 0.0 : internal[x]);
      for (VertexId y : tree.neighbors(x)) {
        if (parent[y] >= 0) continue;
        parent[y] = x;
        out[u][y] = through;
        stack.push_back(y);
      }
    }
  }
  return out;
}

Block unionBlocks(const Block& a, const Block& b) {
  Block out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

WmastResult wmast(const PhyloTree& t1, const PhyloTree& t2, const WeightAssignment& weights,
                  const WmastOptions& options) {
  const bool paper = options.variant == CombineVariant::kPaper;
  DpTables tables(t1, t2, weights, paper, options.execution);
  WmastResult best;
  for (TaxonId x = 0; x < t1.taxonCount(); ++x) {
    if (weights.leaf[x] > best.value) {
      best.value = weights.leaf[x];
      best.block = {x};
    }
  }
  const auto& handles1 = t1.rootedSubtrees();
  const auto& handles2 = t2.rootedSubtrees();
  int best1 = -1, best2 = -1;
  if (!paper) {
    for (int h1 = 0; h1 < tables.rows(); ++h1) {
      const int r1 = handles1[h1].reverse;
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
    best.connected = true;
    return best;
  }

  const auto path1 = pathWeights(t1, weights.internal1);
  const auto path2 = pathWeights(t2, weights.internal2);
  auto rooted = [&](int h1, int h2) {
    const double core = tables.unpinned(h1, h2);
    if (isImpossible(core)) return kImpossible;
    auto [top1, top2] = tables.unpinnedTop(h1, h2);
    const double above = path1[handles1[h1].root][top1] + path2[handles2[h2].root][top2];
    return core + std::max(0.0, above);
  };
  for (int h1 = 0; h1 < tables.rows(); ++h1) {
    const int r1 = handles1[h1].reverse;
    for (int h2 = 0; h2 < tables.cols(); ++h2) {
      const double value = rooted(h1, h2) + rooted(r1, handles2[h2].reverse);
      if (value > best.value) {
        best.value = value;
        best1 = h1;
        best2 = h2;
      }
    }
  }
  if (best1 >= 0) {
    best.block = unionBlocks(tables.traceUnpinned(best1, best2),
                             tables.traceUnpinned(handles1[best1].reverse, handles2[best2].reverse));
  }
  best.connected = isAgreementBlock(t1, t2, best.block) &&
                   std::abs(evaluateBlock(t1, t2, weights, best.block) - best.value) <= 1e-9;
  return best;
}

WmastResult rwmast(const PhyloTree& t1, int h1, const PhyloTree& t2, int h2,
                   const WeightAssignment& weights) {
  if (h1 < 0 || h1 >= static_cast<int>(t1.rootedSubtrees().size()) || h2 < 0 ||
      h2 >= static_cast<int>(t2.rootedSubtrees().size())) {
    throw Error("rooted subtree handle does not belong to its host tree");
  }
  DpTables tables(t1, t2, weights, true);
  WmastResult result;
  const double core = tables.unpinned(h1, h2);
  if (isImpossible(core)) return result;
  auto [top1, top2] = tables.unpinnedTop(h1, h2);
  const auto path1 = pathWeights(t1, weights.internal1);
  const auto path2 = pathWeights(t2, weights.internal2);
  const double above = path1[t1.rootedSubtrees()[h1].root][top1] +
                       path2[t2.rootedSubtrees()[h2].root][top2];
  result.value = core + std::max(0.0, above);
  result.block = tables.traceUnpinned(h1, h2);
  result.connected = above <= 0.0;
  return result;
}

double evaluateBlock(const PhyloTree& t1, const PhyloTree& t2, const WeightAssignment& weights,
                     const Block& block) {
  double total = 0.0;
  for (TaxonId x : block) total += weights.leaf[x];
  for (VertexId v : embedding(t1, block).internalVertices) total += weights.internal1[v];
  for (VertexId v : embedding(t2, block).internalVertices) total += weights.internal2[v];
  return total;
}

}  // namespace umaf
