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


// Branch-and-price for the unrooted maximum agreement forest: the restricted
// master LP, column generation driven by the pricing DP, and a depth-first
// search that branches on fractional block columns.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "umaf/lpcore.hpp"
#include "umaf/phylo.hpp"
#include "umaf/price.hpp"
#include "umaf/wmast.hpp"

namespace umaf {

enum class BranchStrategy { kSize, kRatio };

struct SolveConfig {
  BranchStrategy strategy = BranchStrategy::kRatio;
  double epsilon = 1e-3;
  double timeLimitSeconds = 300.0;
  CombineVariant variant = CombineVariant::kPinned;
  int maxColumnsPerRound = 10;
  Execution execution = Execution::kSerial;
};

// A generated a_Y column. Singletons are never stored here; they are the b_x.
struct MasterColumn {
  Block block;
  std::vector<VertexId> internal1;
  std::vector<VertexId> internal2;
  int variable = -1;     // a_Y in the LP
  int epsilonRow = -1;   // row bounding the c_{v,Y} auxiliaries
  int firstAuxiliary = -1;  // c_{v,Y} occupy [firstAuxiliary, firstAuxiliary + |V1| + |V2|)
};

struct BnpNode {
  BlockSet fixedOne;
  BlockSet forbidden;
  double localBound = 0.0;
  int depth = 0;
};

struct AgreementForest {
  std::vector<Block> blocks;  // sorted
  int size() const { return static_cast<int>(blocks.size()); }
};

class RestrictedMaster {
 public:
  RestrictedMaster(const PhyloTree& t1, const PhyloTree& t2, double epsilon);

  const PhyloTree& tree1() const { return t1_; }
  const PhyloTree& tree2() const { return t2_; }
  double epsilon() const { return epsilon_; }
  const lp::LinearProgram& lp() const { return lp_; }
  const std::vector<MasterColumn>& columns() const { return columns_; }
  std::optional<int> find(const Block& block) const;

  // Returns the column index; the block must be a new non-singleton
  // agreement block.
  int addColumn(Block block);
  void applyNode(const BnpNode& node);
  // With the perturbation on, each c_{v,Y} may relieve packing row v by up
  // to a total of ε per column; off pins every c_{v,Y} to zero.
  void setPerturbation(bool on);
  bool perturbed() const { return perturbed_; }

  // Re-solves from the previous basis when possible.
  lp::Status solve();
  const lp::Solution& solution() const { return solution_; }
  double objective() const { return solution_.objective; }
  double columnValue(int index) const { return solution_.primal[columns_[index].variable]; }
  double singletonValue(TaxonId x) const { return solution_.primal[x]; }
  DualValues duals() const;
  bool isIntegral() const;

 private:
  const PhyloTree& t1_;
  const PhyloTree& t2_;
  double epsilon_;
  bool perturbed_;
  lp::LinearProgram lp_;
  std::vector<int> packRow1_, packRow2_;  // by vertex id, -1 on leaves
  std::vector<MasterColumn> columns_;
  std::vector<std::pair<Block, int>> index_;  // sorted by block
  lp::Solution solution_;
  std::optional<lp::Basis> basis_;
};

inline constexpr double kIntegralityTolerance = 1e-6;
inline constexpr double kViolationTolerance = 1e-6;

RestrictedMaster initialize(const PhyloTree& t1, const PhyloTree& t2, double epsilon);

struct RoundResult {
  int added = 0;
  bool feasible = true;
  double lpValue = 0.0;  // after re-solving
  DualValues duals;      // after re-solving
};

// Prices against the current duals, adds every candidate scoring above
// 1 + tolerance, and re-solves.
RoundResult columnGenerationRound(RestrictedMaster& master, const BnpNode& node,
                                  double pricingEpsilon, const PriceOptions& options);

// Index into master.columns(). Throws Error when no column is fractional.
int selectBranchColumn(const RestrictedMaster& master, BranchStrategy strategy);
// Same rule over explicit LP values, one per column.
int selectBranchColumn(const std::vector<MasterColumn>& columns, const std::vector<double>& values,
                       BranchStrategy strategy);
double branchScore(const MasterColumn& column, BranchStrategy strategy);

// (childOne, childZero)
std::pair<BnpNode, BnpNode> branch(const BnpNode& node, const MasterColumn& column);

AgreementForest extractForest(const RestrictedMaster& master);

// Columns above one half, greedily kept when disjoint from those already
// taken, plus singletons for the rest. Valid for any LP solution.
AgreementForest roundForest(const RestrictedMaster& master);

struct SolveStats {
  int columnsGenerated = 0;
  int branchNodes = 0;
  int nodesExplored = 0;
  int pricingRounds = 0;
  int lpSolves = 0;
  double rootBound = 0.0;
  double lpTimeMs = 0.0;
  double pricingTimeMs = 0.0;
  double totalTimeMs = 0.0;
  bool optimal = true;
};

struct SolveResult {
  AgreementForest forest;
  SolveStats stats;
  // Duals of the last converged LP at the root, for certificate checks.
  DualValues rootDuals;
};

SolveResult solve(const PhyloTree& t1, const PhyloTree& t2, const SolveConfig& config = {});

}  // namespace umaf
