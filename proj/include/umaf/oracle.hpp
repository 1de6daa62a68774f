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

// Exhaustive ground truth for small instances. Obviously correct, not fast.

#pragma once

#include <functional>
#include <vector>

#include "umaf/phylo.hpp"
#include "umaf/wmast.hpp"

namespace umaf {

struct OracleLimits {
  int maxTaxaUmaf = 8;
  int maxTaxaWmast = 12;
};

struct UmafOracleResult {
  int size = 0;
  std::vector<Block> forest;
};

struct WmastOracleResult {
  double value = kImpossible;
  Block block;
};

// First valid agreement forest in non-decreasing block-count order.
UmafOracleResult bruteUmaf(const PhyloTree& t1, const PhyloTree& t2,
                           const OracleLimits& limits = {});

// Maximum of the weighted objective over every non-empty agreeing subset.
WmastOracleResult bruteWmast(const PhyloTree& t1, const PhyloTree& t2,
                             const WeightAssignment& weights, const OracleLimits& limits = {});

// Calls visit(block, V_1[block], V_2[block]) for every non-empty agreement
// block, in increasing bitmask order.
void forEachAgreementBlock(
    const PhyloTree& t1, const PhyloTree& t2, int maxTaxa,
    const std::function<void(const Block&, const std::vector<VertexId>&,
                             const std::vector<VertexId>&)>& visit);

}  // namespace umaf
