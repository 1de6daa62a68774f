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


// Classic kernelization: common pendant subtrees collapse to one leaf and
// common chains are truncated to three leaves. Every step is recorded so a
// forest of the reduced instance can be lifted back.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "umaf/phylo.hpp"

namespace umaf {

enum class ReductionKind { kSubtree, kChain };

struct ReductionStep {
  ReductionKind kind = ReductionKind::kSubtree;
  std::vector<std::string> replaced;     // chain steps: in chain order
  std::vector<std::string> replacement;  // subtree: the fresh leaf; chain: kept prefix
};

using ReductionTrace = std::vector<ReductionStep>;

struct Instance {
  PhyloTree t1;
  PhyloTree t2;
};

struct Reduction {
  ReductionTrace trace;
  std::vector<Instance> stages;  // stages[i] is the instance step i applies to; back() is the result

  const Instance& original() const { return stages.front(); }
  const Instance& reduced() const { return stages.back(); }
};

// Applies one step to both trees. Throws Error if the step does not fit.
Instance applyStep(const Instance& instance, const ReductionStep& step);

// Each rule runs to its own fixpoint.
Reduction subtreeReduce(const PhyloTree& t1, const PhyloTree& t2);
Reduction chainReduce(const PhyloTree& t1, const PhyloTree& t2);
// Alternates both rules until neither applies.
Reduction reduceInstance(const PhyloTree& t1, const PhyloTree& t2);

// Replays a recorded trace from the original trees.
Reduction replay(const PhyloTree& t1, const PhyloTree& t2, const ReductionTrace& trace);

// Blocks on reduced().t1 taxa in, validated blocks on original().t1 taxa out.
std::vector<Block> liftForest(const Reduction& reduction, const std::vector<Block>& forest);

// "subtree a,b -> _s1" / "chain a,b,c,d -> a,b,c", one step per line.
std::string formatStep(const ReductionStep& step);
void writeTrace(std::ostream& out, const ReductionTrace& trace);
ReductionTrace readTrace(std::istream& in);

}  // namespace umaf
