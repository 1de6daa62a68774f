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

// Column pricing for the master problem: the ε-perturbed reduced-weight
// maximization over agreement blocks, solved exactly by enumerating the
// threshold m on max β and running the pinned DP once per threshold.

#pragma once

#include <limits>
#include <set>
#include <vector>

#include "umaf/phylo.hpp"
#include "umaf/wmast.hpp"

namespace umaf {

struct DualValues {
  std::vector<double> alpha;  // cover duals, by taxon id
  std::vector<double> beta1;  // packing duals, by vertex id of T1 (0 on leaves)
  std::vector<double> beta2;  // packing duals, by vertex id of T2 (0 on leaves)
  double epsilon = 0.0;
};

using BlockSet = std::set<Block>;

struct PricedBlock {
  Block block;
  double score = 0.0;          // Σα − Σβ − ε·m
  double reducedWeight = 0.0;  // Σα − Σβ
  double maxBeta = 0.0;        // m: largest β on the embedding, 0 for singletons
  std::vector<VertexId> internal1, internal2;
};

struct PriceOptions {
  int maxCandidates = 10;
  // Candidates must score strictly above this; the best block is dropped too
  // if it does not clear it.
  double minScore = -std::numeric_limits<double>::infinity();
  // Top table entries traced per threshold when collecting runners-up.
  int tracebackPool = 48;
  Execution execution = Execution::kSerial;
  // kPaper also offers the paper-combine witness of each threshold; it enters
  // the pool only if it is a connected agreement block.
  CombineVariant variant = CombineVariant::kPinned;
};

// Best block first (the exact maximizer over agreement blocks outside
// `forbidden`), followed by runners-up that are leaf- and vertex-disjoint
// from every block already chosen.
std::vector<PricedBlock> price(const PhyloTree& t1, const PhyloTree& t2, const DualValues& duals,
                               double epsilon, const BlockSet& forbidden,
                               const PriceOptions& options = {});

// Score of one block from its embeddings.
PricedBlock scoreBlock(const PhyloTree& t1, const PhyloTree& t2, const DualValues& duals,
                       double epsilon, const Block& block);

}  // namespace umaf
