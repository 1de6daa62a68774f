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

#include "umaf/phylo.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace umaf {

TaxonSet::TaxonSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  auto dup = std::adjacent_find(labels_.begin(), labels_.end());
  if (dup != labels_.end()) throw Error("duplicate leaf label \"" + *dup + "\"");
  for (const auto& l : labels_) {
    if (l.empty()) throw Error("empty leaf label");
  }
}

std::optional<TaxonId> TaxonSet::find(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<TaxonId>(it - labels_.begin());
}

TaxonId TaxonSet::id(std::string_view label) const {
  auto found = find(label);
  if (!found) throw Error("unknown taxon \"" + std::string(label) + "\"");
  return *found;
}

// ---------------------------------------------------------------------------

PhyloTree::PhyloTree(std::shared_ptr<const TaxonSet> taxa, int vertexCount,
                     std::span<const std::pair<VertexId, VertexId>> edges)
    : taxa_(std::move(taxa)), adjacency_(vertexCount), degree_(vertexCount, 0) {
  const int n = taxa_->size();
  if (n < 3) throw Error("a tree needs at least 3 leaves");
  if (vertexCount != 2 * n - 2) throw Error("binary tree on n leaves must have 2n-2 vertices");
  if (static_cast<int>(edges.size()) != vertexCount - 1) throw Error("edge count mismatch");
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertexCount || v >= vertexCount || u == v) {
      throw Error("invalid edge");
    }
    for (VertexId w : {u, v}) {
      if (degree_[w] == 3) throw Error("non-binary vertex");
    }
    adjacency_[u][degree_[u]++] = v;
    adjacency_[v][degree_[v]++] = u;
  }
  for (VertexId v = 0; v < vertexCount; ++v) {
    const int expected = isLeaf(v) ? 1 : 3;
    if (degree_[v] != expected) {
      throw Error(isLeaf(v) ? "leaf vertex with degree != 1" : "non-binary vertex");
    }
  }
  // Connectivity (|E| = |V| - 1 plus connected implies a tree).
  std::vector<char> seen(vertexCount, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (VertexId w : neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != vertexCount) throw Error("tree is not connected");
  buildHandles();
}

std::vector<std::pair<VertexId, VertexId>> PhyloTree::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(vertexCount() - 1);
  for (VertexId v = 0; v < vertexCount(); ++v) {
    for (VertexId w : neighbors(v)) {
      if (v < w) out.emplace_back(v, w);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int PhyloTree::handleOf(VertexId parent, VertexId root) const {
  for (int s = 0; s < degree_[parent]; ++s) {
    if (adjacency_[parent][s] == root) return handleBySlot_[parent][s];
  }
  throw Error("vertices are not adjacent");
}

void PhyloTree::buildHandles() {
  const int n = taxonCount();
  const int vc = vertexCount();
  // Leaf counts below each vertex when rooted at leaf 0.
  std::vector<VertexId> parent(vc, -1), order;
  order.reserve(vc);
  std::vector<VertexId> stack{0};
  parent[0] = 0;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (VertexId w : neighbors(v)) {
      if (parent[w] < 0) {
        parent[w] = v;
        stack.push_back(w);
      }
    }
  }
  std::vector<int> below(vc, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VertexId v = *it;
    if (isLeaf(v)) below[v] += 1;
    if (v != 0) below[parent[v]] += below[v];
  }
  below[0] = n;

  struct Raw {
    int leafCount;
    VertexId root, parent;
  };
  std::vector<Raw> raw;
  raw.reserve(2 * (vc - 1));
  for (VertexId u = 0; u < vc; ++u) {
    for (VertexId v : neighbors(u)) {
      // handle u -> v: component containing v once {u, v} is removed
      int count = (parent[v] == u && v != 0) ? below[v] : n - below[u];
      raw.push_back({count, v, u});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    return std::tie(a.leafCount, a.root, a.parent) < std::tie(b.leafCount, b.root, b.parent);
  });
  handles_.resize(raw.size());
  handleBySlot_.assign(vc, {-1, -1, -1});
  for (int h = 0; h < static_cast<int>(raw.size()); ++h) {
    handles_[h].parent = raw[h].parent;
    handles_[h].root = raw[h].root;
    handles_[h].leafCount = raw[h].leafCount;
    VertexId u = raw[h].parent;
    for (int s = 0; s < degree_[u]; ++s) {
      if (adjacency_[u][s] == raw[h].root) handleBySlot_[u][s] = h;
    }
  }
  for (auto& h : handles_) {
    h.reverse = handleOf(h.root, h.parent);
    if (!isLeaf(h.root)) {
      int k = 0;
      for (VertexId w : neighbors(h.root)) {
        if (w != h.parent) h.children[k++] = handleOf(h.root, w);
      }
    }
  }
}

// ---------------------------------------------------------------------------

int TreeBuilder::addLeaf(std::string label) {
  nodes_.push_back({std::move(label), {}});
  return nodeCount() - 1;
}

int TreeBuilder::addInternal() {
  nodes_.push_back({std::nullopt, {}});
  return nodeCount() - 1;
}

void TreeBuilder::connect(int a, int b) {
  nodes_.at(a).neighbors.push_back(b);
  nodes_.at(b).neighbors.push_back(a);
}

PhyloTree TreeBuilder::build() const {
  std::vector<Node> nodes = nodes_;
  std::vector<char> alive(nodes.size(), 1);
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    if (nodes[v].label) continue;
    if (nodes[v].neighbors.size() == 2) {
      int a = nodes[v].neighbors[0], b = nodes[v].neighbors[1];
      std::replace(nodes[a].neighbors.begin(), nodes[a].neighbors.end(), v, b);
      std::replace(nodes[b].neighbors.begin(), nodes[b].neighbors.end(), v, a);
      nodes[v].neighbors.clear();
      alive[v] = 0;
    } else if (nodes[v].neighbors.size() != 3) {
      throw Error("non-binary vertex (degree " + std::to_string(nodes[v].neighbors.size()) + ")");
    }
  }
  std::vector<std::string> labels;
  for (const auto& node : nodes) {
    if (node.label) {
      if (node.neighbors.size() != 1) throw Error("leaf \"" + *node.label + "\" is not pendant");
      labels.push_back(*node.label);
    }
  }
  if (labels.size() < 3) throw Error("fewer than 3 leaves");
  auto taxa = std::make_shared<const TaxonSet>(labels);
  const int n = taxa->size();
  std::vector<int> remap(nodes.size(), -1);
  int next = n;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    if (!alive[v]) continue;
    remap[v] = nodes[v].label ? taxa->id(*nodes[v].label) : next++;
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    if (!alive[v]) continue;
    for (int w : nodes[v].neighbors) {
      if (v < w) edges.emplace_back(remap[v], remap[w]);
    }
  }
  return PhyloTree(std::move(taxa), next, edges);
}

// ---------------------------------------------------------------------------

Block makeBlock(std::vector<TaxonId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Block allTaxa(const PhyloTree& tree) {
  Block all(tree.taxonCount());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::vector<std::string> blockLabels(const TaxonSet& taxa, const Block& block) {
  std::vector<std::string> out;
  out.reserve(block.size());
  for (TaxonId x : block) out.push_back(taxa.label(x));
  return out;
}

namespace {

void checkBlock(const PhyloTree& tree, const Block& block) {
  if (block.empty()) throw Error("empty block");
  for (size_t i = 0; i < block.size(); ++i) {
    if (block[i] < 0 || block[i] >= tree.taxonCount()) throw Error("unknown taxon in block");
    if (i > 0 && block[i] <= block[i - 1]) throw Error("block is not sorted and distinct");
  }
}

struct Piece {
  std::string text;
  TaxonId minId = -1;
  bool empty() const { return minId < 0; }
};

Piece restrictedPiece(const PhyloTree& tree, const std::vector<char>& inBlock, VertexId v,
                      VertexId parent) {
  if (tree.isLeaf(v)) {
    if (!inBlock[v]) return {};
    return {tree.taxa().label(v), v};
  }
  Piece parts[2];
  int k = 0;
  for (VertexId w : tree.neighbors(v)) {
    if (w == parent) continue;
    Piece p = restrictedPiece(tree, inBlock, w, v);
    if (!p.empty()) parts[k++] = std::move(p);
  }
  if (k == 0) return {};
  if (k == 1) return std::move(parts[0]);
  if (parts[1].minId < parts[0].minId) std::swap(parts[0], parts[1]);
  Piece out;
  out.minId = parts[0].minId;
  out.text.reserve(parts[0].text.size() + parts[1].text.size() + 3);
  out.text += '(';
  out.text += parts[0].text;
  out.text += ',';
  out.text += parts[1].text;
  out.text += ')';
  return out;
}

}  // namespace

std::string restrict(const PhyloTree& tree, const Block& block) {
  checkBlock(tree, block);
  const auto& taxa = tree.taxa();
  if (block.size() == 1) return taxa.label(block[0]) + ";";
  if (block.size() == 2) return "(" + taxa.label(block[0]) + "," + taxa.label(block[1]) + ");";
  std::vector<char> inBlock(tree.vertexCount(), 0);
  for (TaxonId x : block) inBlock[x] = 1;
  const VertexId anchor = block.front();
  Piece rest = restrictedPiece(tree, inBlock, tree.neighbors(anchor)[0], anchor);
  // rest is "(A,B)" with A, B ordered; splice the anchor in as a third child.
  return "(" + taxa.label(anchor) + "," + rest.text.substr(1, rest.text.size() - 2) + ");";
}

Embedding embedding(const PhyloTree& tree, const Block& block) {
  checkBlock(tree, block);
  Embedding out;
  out.block = block;
  if (block.size() == 1) {
    out.spanVertices = {block[0]};
    return out;
  }
  const int vc = tree.vertexCount();
  std::vector<char> inBlock(vc, 0);
  for (TaxonId x : block) inBlock[x] = 1;
  // Rooted at a block leaf, a vertex lies on the span iff its subtree holds
  // at least one block leaf.
  const VertexId root = block.front();
  std::vector<VertexId> parent(vc, -1), order;
  order.reserve(vc);
  std::vector<VertexId> stack{root};
  parent[root] = root;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (VertexId w : tree.neighbors(v)) {
      if (parent[w] < 0) {
        parent[w] = v;
        stack.push_back(w);
      }
    }
  }
  std::vector<int> count(vc, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VertexId v = *it;
    if (inBlock[v]) count[v] += 1;
    if (v != root) count[parent[v]] += count[v];
  }
  for (VertexId v = 0; v < vc; ++v) {
    if (count[v] > 0) {
      out.spanVertices.push_back(v);
      if (!tree.isLeaf(v)) out.internalVertices.push_back(v);
    }
  }
  return out;
}

bool sameTaxa(const PhyloTree& t1, const PhyloTree& t2) { return t1.taxa() == t2.taxa(); }

bool isAgreementBlock(const PhyloTree& t1, const PhyloTree& t2, const Block& block) {
  if (block.size() <= 3) {
    checkBlock(t1, block);
    checkBlock(t2, block);
    return true;
  }
  return restrict(t1, block) == restrict(t2, block);
}

void validateAgreementForest(const PhyloTree& t1, const PhyloTree& t2,
                             const std::vector<Block>& blocks) {
  if (!sameTaxa(t1, t2)) throw Error("forest check: trees have different taxa");
  const int n = t1.taxonCount();
  std::vector<int> owner(n, -1);
  for (size_t b = 0; b < blocks.size(); ++b) {
    for (TaxonId x : blocks[b]) {
      if (x < 0 || x >= n) throw Error("forest check: unknown taxon");
      if (owner[x] >= 0) throw Error("forest check: taxon " + t1.taxa().label(x) + " covered twice");
      owner[x] = static_cast<int>(b);
    }
  }
  for (TaxonId x = 0; x < n; ++x) {
    if (owner[x] < 0) throw Error("forest check: taxon " + t1.taxa().label(x) + " uncovered");
  }
  for (const auto& block : blocks) {
    if (!isAgreementBlock(t1, t2, block)) {
      throw Error("forest check: block containing " + t1.taxa().label(block[0]) +
                  " does not agree");
    }
  }
  for (const PhyloTree* tree : {&t1, &t2}) {
    std::vector<int> used(tree->vertexCount(), -1);
    for (size_t b = 0; b < blocks.size(); ++b) {
      for (VertexId v : embedding(*tree, blocks[b]).spanVertices) {
        if (used[v] >= 0) throw Error("forest check: embeddings overlap");
        used[v] = static_cast<int>(b);
      }
    }
  }
}

}  // namespace umaf
