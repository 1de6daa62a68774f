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

#include "umaf/bnp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stack>

namespace umaf {

namespace {

using Clock = std::chrono::steady_clock;

double millisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool nearInteger(double v) {
  return std::abs(v) <= kIntegralityTolerance || std::abs(v - 1.0) <= kIntegralityTolerance;
}

}  // namespace

RestrictedMaster::RestrictedMaster(const PhyloTree& t1, const PhyloTree& t2, double epsilon)
    : t1_(t1), t2_(t2), epsilon_(epsilon), perturbed_(epsilon > 0.0) {
  if (!sameTaxa(t1, t2)) throw Error("trees are on different taxon sets");
  if (t1.taxonCount() < 3) throw Error("instance needs at least 3 taxa");
  if (!(epsilon >= 0.0)) throw Error("epsilon must be non-negative");
  const int n = t1.taxonCount();
  for (TaxonId x = 0; x < n; ++x) lp_.addRow(lp::Relation::kGreaterEqual, 1.0, "cover_" + std::to_string(x));
  packRow1_.assign(t1.vertexCount(), -1);
  packRow2_.assign(t2.vertexCount(), -1);
  for (VertexId v = n; v < t1.vertexCount(); ++v) {
    packRow1_[v] = lp_.addRow(lp::Relation::kLessEqual, 1.0, "pack1_" + std::to_string(v));
  }
  for (VertexId v = n; v < t2.vertexCount(); ++v) {
    packRow2_[v] = lp_.addRow(lp::Relation::kLessEqual, 1.0, "pack2_" + std::to_string(v));
  }
  for (TaxonId x = 0; x < n; ++x) {
    lp_.addColumn(1.0, {{x, 1.0}}, -lp::kInfinity, lp::kInfinity, "b_" + std::to_string(x));
  }
}

std::optional<int> RestrictedMaster::find(const Block& block) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), block,
                             [](const auto& entry, const Block& b) { return entry.first < b; });
  if (it == index_.end() || it->first != block) return std::nullopt;
  return it->second;
}

int RestrictedMaster::addColumn(Block block) {
  if (block.size() < 2) throw Error("master columns need at least two taxa");
  if (find(block)) throw Error("column already present");
  if (!isAgreementBlock(t1_, t2_, block)) throw Error("master column is not an agreement block");
  MasterColumn column;
  column.block = block;
  column.internal1 = embedding(t1_, block).internalVertices;
  column.internal2 = embedding(t2_, block).internalVertices;
  std::vector<std::pair<int, double>> coefficients;
  for (TaxonId x : block) coefficients.emplace_back(x, 1.0);
  for (VertexId v : column.internal1) coefficients.emplace_back(packRow1_[v], 1.0);
  for (VertexId v : column.internal2) coefficients.emplace_back(packRow2_[v], 1.0);
  const int id = static_cast<int>(columns_.size());
  column.variable = lp_.addColumn(1.0, std::move(coefficients), 0.0, lp::kInfinity,
                                  "a_" + std::to_string(id));
  column.epsilonRow = lp_.addRow(lp::Relation::kLessEqual, epsilon_, "eps_" + std::to_string(id));
  column.firstAuxiliary = lp_.columnCount();
  const double auxUpper = perturbed_ ? lp::kInfinity : 0.0;
  auto addAux = [&](VertexId v, int row, int tree) {
    lp_.addColumn(0.0, {{row, -1.0}, {column.epsilonRow, 1.0}}, 0.0, auxUpper,
                  "c" + std::to_string(tree) + "_" + std::to_string(v) + "_" + std::to_string(id));
  };
  for (VertexId v : column.internal1) addAux(v, packRow1_[v], 1);
  for (VertexId v : column.internal2) addAux(v, packRow2_[v], 2);
  columns_.push_back(std::move(column));
  index_.insert(std::lower_bound(index_.begin(), index_.end(), block,
                                 [](const auto& entry, const Block& b) { return entry.first < b; }),
                {block, id});
  return id;
}

void RestrictedMaster::applyNode(const BnpNode& node) {
  for (const auto& column : columns_) {
    const double lower = node.fixedOne.contains(column.block) ? 1.0 : 0.0;
    const double upper = node.forbidden.contains(column.block) ? 0.0 : lp::kInfinity;
    if (lower > upper) throw Error("block both fixed and forbidden");
    lp_.setBounds(column.variable, lower, upper);
  }
}

void RestrictedMaster::setPerturbation(bool on) {
  on = on && epsilon_ > 0.0;
  if (on == perturbed_) return;
  perturbed_ = on;
  for (const auto& column : columns_) {
    const int count = static_cast<int>(column.internal1.size() + column.internal2.size());
    for (int j = column.firstAuxiliary; j < column.firstAuxiliary + count; ++j) {
      lp_.setBounds(j, 0.0, on ? lp::kInfinity : 0.0);
    }
  }
}

lp::Status RestrictedMaster::solve() {
  try {
    solution_ = lp::solve(lp_, basis_ ? &*basis_ : nullptr);
  } catch (const lp::NumericError&) {
    if (!basis_) throw;
    solution_ = lp::solve(lp_);
  }
  if (solution_.status == lp::Status::kOptimal) {
    basis_ = solution_.basis;
  } else {
    basis_.reset();
  }
  return solution_.status;
}

DualValues RestrictedMaster::duals() const {
  if (solution_.status != lp::Status::kOptimal) throw Error("master LP is not optimal");
  DualValues d;
  const int n = t1_.taxonCount();
  d.alpha.assign(solution_.dual.begin(), solution_.dual.begin() + n);
  d.beta1.assign(t1_.vertexCount(), 0.0);
  d.beta2.assign(t2_.vertexCount(), 0.0);
  for (VertexId v = n; v < t1_.vertexCount(); ++v) d.beta1[v] = std::max(0.0, -solution_.dual[packRow1_[v]]);
  for (VertexId v = n; v < t2_.vertexCount(); ++v) d.beta2[v] = std::max(0.0, -solution_.dual[packRow2_[v]]);
  d.epsilon = epsilon_;
  return d;
}

bool RestrictedMaster::isIntegral() const {
  for (const auto& column : columns_) {
    if (!nearInteger(solution_.primal[column.variable])) return false;
  }
  for (TaxonId x = 0; x < t1_.taxonCount(); ++x) {
    if (!nearInteger(solution_.primal[x])) return false;
  }
  return true;
}

RestrictedMaster initialize(const PhyloTree& t1, const PhyloTree& t2, double epsilon) {
  RestrictedMaster master(t1, t2, epsilon);
  master.solve();
  return master;
}

namespace {

RoundResult runRound(RestrictedMaster& master, const BnpNode& node, double pricingEpsilon,
                     const PriceOptions& options, SolveStats* stats) {
  RoundResult result;
  const DualValues duals = master.duals();
  auto start = Clock::now();
  const auto candidates =
      price(master.tree1(), master.tree2(), duals, pricingEpsilon, node.forbidden, options);
  if (stats) {
    stats->pricingTimeMs += millisSince(start);
    ++stats->pricingRounds;
  }
  for (const auto& candidate : candidates) {
    if (!(candidate.score > 1.0 + kViolationTolerance)) continue;
    if (candidate.block.size() < 2 || master.find(candidate.block)) continue;
    master.addColumn(candidate.block);
    ++result.added;
  }
  if (result.added > 0) {
    start = Clock::now();
    const auto status = master.solve();
    if (stats) {
      stats->lpTimeMs += millisSince(start);
      ++stats->lpSolves;
      stats->columnsGenerated += result.added;
    }
    if (status != lp::Status::kOptimal) {
      result.feasible = false;
      return result;
    }
  }
  result.lpValue = master.objective();
  result.duals = master.duals();
  return result;
}

}  // namespace

RoundResult columnGenerationRound(RestrictedMaster& master, const BnpNode& node,
                                  double pricingEpsilon, const PriceOptions& options) {
  return runRound(master, node, pricingEpsilon, options, nullptr);
}

double branchScore(const MasterColumn& column, BranchStrategy strategy) {
  const double size = static_cast<double>(column.block.size());
  if (strategy == BranchStrategy::kSize) return size;
  return size / static_cast<double>(column.internal1.size() + column.internal2.size());
}

int selectBranchColumn(const std::vector<MasterColumn>& columns, const std::vector<double>& values,
                       BranchStrategy strategy) {
  int best = -1;
  double bestScore = 0.0;
  for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
    const double value = values.at(i);
    if (value <= kIntegralityTolerance || value >= 1.0 - kIntegralityTolerance) continue;
    const double score = branchScore(columns[i], strategy);
    if (best < 0 || score > bestScore ||
        (score == bestScore && columns[i].block < columns[best].block)) {
      best = i;
      bestScore = score;
    }
  }
  if (best < 0) throw Error("no fractional column to branch on");
  return best;
}

int selectBranchColumn(const RestrictedMaster& master, BranchStrategy strategy) {
  std::vector<double> values(master.columns().size());
  for (int i = 0; i < static_cast<int>(values.size()); ++i) values[i] = master.columnValue(i);
  return selectBranchColumn(master.columns(), values, strategy);
}

std::pair<BnpNode, BnpNode> branch(const BnpNode& node, const MasterColumn& column) {
  BnpNode one = node, zero = node;
  one.fixedOne.insert(column.block);
  zero.forbidden.insert(column.block);
  ++one.depth;
  ++zero.depth;
  return {std::move(one), std::move(zero)};
}

AgreementForest extractForest(const RestrictedMaster& master) {
  if (!master.isIntegral()) throw Error("master solution is fractional");
  AgreementForest forest;
  for (int i = 0; i < static_cast<int>(master.columns().size()); ++i) {
    if (master.columnValue(i) > 0.5) forest.blocks.push_back(master.columns()[i].block);
  }
  for (TaxonId x = 0; x < master.tree1().taxonCount(); ++x) {
    if (master.singletonValue(x) > 0.5) forest.blocks.push_back({x});
  }
  std::sort(forest.blocks.begin(), forest.blocks.end());
  validateAgreementForest(master.tree1(), master.tree2(), forest.blocks);
  return forest;
}

AgreementForest roundForest(const RestrictedMaster& master) {
  const auto& columns = master.columns();
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
    if (master.columnValue(i) > 0.5) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = master.columnValue(a), vb = master.columnValue(b);
    if (va != vb) return va > vb;
    return columns[a].block < columns[b].block;
  });
  const PhyloTree& t1 = master.tree1();
  const PhyloTree& t2 = master.tree2();
  std::vector<char> taxa(t1.taxonCount(), 0), used1(t1.vertexCount(), 0), used2(t2.vertexCount(), 0);
  AgreementForest forest;
  for (int i : order) {
    const auto& c = columns[i];
    bool free = true;
    for (TaxonId x : c.block) free = free && !taxa[x];
    for (VertexId v : c.internal1) free = free && !used1[v];
    for (VertexId v : c.internal2) free = free && !used2[v];
    if (!free) continue;
    for (TaxonId x : c.block) taxa[x] = 1;
    for (VertexId v : c.internal1) used1[v] = 1;
    for (VertexId v : c.internal2) used2[v] = 1;
    forest.blocks.push_back(c.block);
  }
  for (TaxonId x = 0; x < t1.taxonCount(); ++x) {
    if (!taxa[x]) forest.blocks.push_back({x});
  }
  std::sort(forest.blocks.begin(), forest.blocks.end());
  validateAgreementForest(t1, t2, forest.blocks);
  return forest;
}

SolveResult solve(const PhyloTree& t1, const PhyloTree& t2, const SolveConfig& config) {
  const auto start = Clock::now();
  SolveResult result;
  SolveStats& stats = result.stats;
  RestrictedMaster master(t1, t2, config.epsilon);

  for (TaxonId x = 0; x < t1.taxonCount(); ++x) result.forest.blocks.push_back({x});

  PriceOptions options;
  options.maxCandidates = config.maxColumnsPerRound;
  options.minScore = 1.0 + kViolationTolerance;
  options.execution = config.execution;
  options.variant = config.variant;

  auto timedOut = [&] { return millisSince(start) > config.timeLimitSeconds * 1000.0; };
  auto solveLp = [&] {
    const auto t = Clock::now();
    const auto status = master.solve();
    stats.lpTimeMs += millisSince(t);
    ++stats.lpSolves;
    return status;
  };

  std::stack<BnpNode> open;
  open.push(BnpNode{});
  while (!open.empty()) {
    if (timedOut()) {
      stats.optimal = false;
      break;
    }
    BnpNode node = std::move(open.top());
    open.pop();
    ++stats.nodesExplored;
    master.applyNode(node);
    master.setPerturbation(true);
    if (solveLp() != lp::Status::kOptimal) continue;

    // Runs pricing rounds to convergence; false on infeasibility or timeout.
    auto converge = [&](double pricingEpsilon) {
      while (true) {
        if (timedOut()) {
          stats.optimal = false;
          return false;
        }
        const RoundResult round = runRound(master, node, pricingEpsilon, options, &stats);
        if (!round.feasible) return false;
        if (round.added == 0) return true;
      }
    };
    auto settle = [&] {
      node.localBound = std::max(node.localBound, master.objective());
      if (node.depth == 0) {
        stats.rootBound = node.localBound;
        result.rootDuals = master.duals();
      }
      return std::ceil(node.localBound - kIntegralityTolerance) >= result.forest.size();
    };

    // The perturbed master is a relaxation, so its value bounds the node and
    // rounding its solution often closes the gap outright.
    if (!converge(master.perturbed() ? config.epsilon : 0.0)) {
      if (!stats.optimal) break;
      continue;
    }
    AgreementForest rounded = roundForest(master);
    if (rounded.size() < result.forest.size()) result.forest = std::move(rounded);
    if (settle()) continue;

    if (master.perturbed()) {
      master.setPerturbation(false);
      if (solveLp() != lp::Status::kOptimal) continue;
      if (!converge(0.0)) {
        if (!stats.optimal) break;
        continue;
      }
      if (settle()) continue;
    }
    if (master.isIntegral()) {
      AgreementForest forest = extractForest(master);
      if (forest.size() < result.forest.size()) result.forest = std::move(forest);
      continue;
    }
    auto [one, zero] = branch(node, master.columns()[selectBranchColumn(master, config.strategy)]);
    stats.branchNodes += 2;
    open.push(std::move(zero));
    open.push(std::move(one));
  }
  validateAgreementForest(t1, t2, result.forest.blocks);
  stats.totalTimeMs = millisSince(start);
  return result;
}

}  // namespace umaf
