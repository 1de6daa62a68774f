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

// Weighted maximum agreement subtree over a pair of unrooted binary trees.
//
// Tables are indexed by pairs of directed-edge handles (h1 of T1, h2 of T2):
//
//   pinned(h1, h2)    best weight of a non-empty block Y that agrees as a rooted
//                     tree in both handles, charging every vertex on the
//                     minimal subtree connecting Y and the two handle roots.
//   unpinned(h1, h2)  best weight of a non-empty rooted agreement block charging
//                     only Y's own embedding (the rooted WMAST core value).
//
// Impossible entries hold -infinity and absorb under addition.

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "umaf/phylo.hpp"

namespace umaf {

inline constexpr double kImpossible = -std::numeric_limits<double>::infinity();
inline bool isImpossible(double v) { return v < -1e300; }

struct WeightAssignment {
  std::vector<double> leaf;       // by taxon id
  std::vector<double> internal1;  // by vertex id of T1; leaf slots unused
  std::vector<double> internal2;  // by vertex id of T2; leaf slots unused

  static WeightAssignment uniform(const PhyloTree& t1, const PhyloTree& t2, double leafWeight,
                                  double internalWeight);
  void checkCovers(const PhyloTree& t1, const PhyloTree& t2) const;
};

enum class Execution { kSerial, kParallel };

// How the two rooted halves across an edge pair are combined. kPinned charges
// the whole connecting path and only ever yields connected blocks; kPaper sums
// unpinned rooted optima (plus their optional positive root paths) and may
// describe a union of two disconnected pieces.
enum class CombineVariant { kPinned, kPaper };

struct WmastResult {
  double value = kImpossible;
  Block block;
  bool connected = true;
};

class DpTables {
 public:
  DpTables(const PhyloTree& t1, const PhyloTree& t2, const WeightAssignment& weights,
           bool withUnpinned = false, Execution execution = Execution::kSerial);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double pinned(int h1, int h2) const { return pinned_[index(h1, h2)]; }
  double unpinned(int h1, int h2) const { return unpinned_.at(index(h1, h2)); }
  // Root pair of the agreement subtree realizing unpinned(h1, h2).
  std::pair<VertexId, VertexId> unpinnedTop(int h1, int h2) const;

  Block tracePinned(int h1, int h2) const;
  Block traceUnpinned(int h1, int h2) const;

  const std::vector<double>& pinnedValues() const { return pinned_; }

 private:
  enum Choice : std::uint8_t {
    kNone,
    kLeafMatch,
    kJoinStraight,
    kJoinCrossed,
    kDown1First,
    kDown1Second,
    kDown2First,
    kDown2Second,
  };

  std::size_t index(int h1, int h2) const {
    return static_cast<std::size_t>(h1) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(h2);
  }
  double weight1(VertexId v) const;
  double weight2(VertexId v) const;
  void computeRow(int h1);
  void computeUnpinnedRow(int h1);
  void tracePinnedInto(int h1, int h2, Block& out) const;

  const PhyloTree& t1_;
  const PhyloTree& t2_;
  WeightAssignment w_;
  int rows_, cols_;
  std::vector<double> pinned_;
  std::vector<std::uint8_t> pinnedChoice_;
  std::vector<double> unpinned_;
  std::vector<std::uint8_t> unpinnedChoice_;
  std::vector<VertexId> top1_, top2_;
};

struct WmastOptions {
  CombineVariant variant = CombineVariant::kPinned;
  Execution execution = Execution::kSerial;
};

WmastResult wmast(const PhyloTree& t1, const PhyloTree& t2, const WeightAssignment& weights,
                  const WmastOptions& options = {});

// Rooted WMAST on handles h1 of t1 and h2 of t2: the unpinned optimum plus
// the positive part of the weight on the paths from the handle roots down to
// the agreement subtree root.
WmastResult rwmast(const PhyloTree& t1, int h1, const PhyloTree& t2, int h2,
                   const WeightAssignment& weights);

// Block weight from embeddings, independent of the DP.
double evaluateBlock(const PhyloTree& t1, const PhyloTree& t2, const WeightAssignment& weights,
                     const Block& block);

}  // namespace umaf
