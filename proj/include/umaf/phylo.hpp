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

// Unrooted binary leaf-labelled trees and the combinatorial queries the
// pricing DP and the master problem are built on: restriction to a leaf
// subset, embeddings, agreement tests and the directed-edge ("rooted
// subtree") index.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace umaf {

using TaxonId = int;
using VertexId = int;

// A leaf set. Always sorted ascending and duplicate-free.
using Block = std::vector<TaxonId>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Labels are kept sorted, so taxon ids order exactly like their labels.
// Two trees over the same label set therefore agree on every id.
class TaxonSet {
 public:
  explicit TaxonSet(std::vector<std::string> labels);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(TaxonId id) const { return labels_.at(id); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<TaxonId> find(std::string_view label) const;
  TaxonId id(std::string_view label) const;

  bool operator==(const TaxonSet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
};

// Directed-edge handle: the component of the tree minus {parent, root} that
// contains root. A handle whose root is a leaf is the singleton subtree.
struct RootedSubtree {
  VertexId parent = -1;
  VertexId root = -1;
  int leafCount = 0;
  std::array<int, 2> children{-1, -1};  // handle indices, -1 for singletons
  int reverse = -1;

  bool isSingleton() const { return children[0] < 0; }
};

// Leaves occupy vertex ids [0, n) with vertex id == taxon id; internal
// vertices occupy [n, 2n - 2). Immutable once built.
class PhyloTree {
 public:
  PhyloTree(std::shared_ptr<const TaxonSet> taxa, int vertexCount,
            std::span<const std::pair<VertexId, VertexId>> edges);

  int taxonCount() const { return taxa_->size(); }
  int vertexCount() const { return static_cast<int>(degree_.size()); }
  int internalCount() const { return vertexCount() - taxonCount(); }
  bool isLeaf(VertexId v) const { return v < taxonCount(); }

  const TaxonSet& taxa() const { return *taxa_; }
  const std::shared_ptr<const TaxonSet>& taxaPtr() const { return taxa_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {adjacency_[v].data(), degree_[v]};
  }
  // Canonically ordered edge list (u < v, lexicographic).
  std::vector<std::pair<VertexId, VertexId>> edges() const;

  // All 2(2n - 3) handles in non-decreasing leaf-count order; every handle
  // appears after both of its children.
  const std::vector<RootedSubtree>& rootedSubtrees() const { return handles_; }
  int handleOf(VertexId parent, VertexId root) const;

 private:
  void buildHandles();

  std::shared_ptr<const TaxonSet> taxa_;
  std::vector<std::array<VertexId, 3>> adjacency_;
  std::vector<std::uint8_t> degree_;
  std::vector<RootedSubtree> handles_;
  std::vector<std::array<int, 3>> handleBySlot_;
};

// Incremental construction from an arbitrary labelled graph. Degree-2
// vertices are suppressed, vertices are renumbered so that leaves carry their
// taxon ids and internal vertices keep their creation order.
class TreeBuilder {
 public:
  int addLeaf(std::string label);
  int addInternal();
  void connect(int a, int b);
  int nodeCount() const { return static_cast<int>(nodes_.size()); }

  PhyloTree build() const;

 private:
  struct Node {
    std::optional<std::string> label;
    std::vector<int> neighbors;
  };
  std::vector<Node> nodes_;
};

struct Embedding {
  Block block;
  std::vector<VertexId> spanVertices;      // sorted
  std::vector<VertexId> internalVertices;  // sorted; V_T[Y]
};

Block makeBlock(std::vector<TaxonId> ids);
Block allTaxa(const PhyloTree& tree);
std::vector<std::string> blockLabels(const TaxonSet& taxa, const Block& block);

// Canonical Newick text of T|block. One- and two-leaf restrictions are
// written "x;" and "(x,y);".
std::string restrict(const PhyloTree& tree, const Block& block);

Embedding embedding(const PhyloTree& tree, const Block& block);

bool sameTaxa(const PhyloTree& t1, const PhyloTree& t2);
bool isAgreementBlock(const PhyloTree& t1, const PhyloTree& t2, const Block& block);

// Throws Error naming the first violated condition: partition of X,
// agreement of every block, vertex-disjoint embeddings in each tree.
void validateAgreementForest(const PhyloTree& t1, const PhyloTree& t2,
                             const std::vector<Block>& blocks);

}  // namespace umaf
