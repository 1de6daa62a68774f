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

#include "umaf/gen.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace umaf {

std::uint64_t Rng::uniformBelow(std::uint64_t bound) {
  if (bound == 0) throw Error("uniformBelow: empty range");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;  // accept [0, limit]
  while (true) {
    const std::uint64_t v = engine_();
    if (v <= limit) return v % bound;
  }
}

void validate(const GenSpec& spec) {
  if (spec.t < 4) throw Error("gen: t must be at least 4");
  if (spec.s < 0 || spec.s > 100) throw Error("gen: skew must lie in [0, 100]");
  if (spec.k < 0) throw Error("gen: k must be non-negative");
}

PhyloTree randomTree(int t, int s, Rng& rng) {
  if (t < 4) throw Error("randomTree: t must be at least 4");
  TreeBuilder builder;
  std::vector<std::pair<int, int>> edges;
  const int center = builder.addInternal();
  int last = -1;
  for (int i = 1; i <= 3; ++i) {
    last = builder.addLeaf(std::to_string(i));
    edges.emplace_back(center, last);
  }
  for (int i = 4; i <= t; ++i) {
    std::size_t target;
    if (static_cast<int>(rng.uniformBelow(100)) < s) {
      target = static_cast<std::size_t>(
          std::find_if(edges.begin(), edges.end(),
                       [&](const auto& e) { return e.second == last; }) -
          edges.begin());
    } else {
      target = rng.uniformBelow(edges.size());
    }
    const auto [u, v] = edges[target];
    const int w = builder.addInternal();
    const int leaf = builder.addLeaf(std::to_string(i));
    edges[target] = {u, w};
    edges.emplace_back(w, v);
    edges.emplace_back(w, leaf);
    last = leaf;
  }
  for (auto [u, v] : edges) builder.connect(u, v);
  return builder.build();
}

PhyloTree randomTree(int t, int s, std::uint64_t seed) {
  Rng rng(seed);
  return randomTree(t, s, rng);
}

namespace {

using Graph = std::map<int, std::vector<int>>;

void removeEdge(Graph& g, int a, int b) {
  auto& na = g[a];
  na.erase(std::find(na.begin(), na.end(), b));
  auto& nb = g[b];
  nb.erase(std::find(nb.begin(), nb.end(), a));
}

void addEdge(Graph& g, int a, int b) {
  g[a].push_back(b);
  g[b].push_back(a);
}

// Canonically ordered edges of the component containing start.
std::vector<std::pair<int, int>> componentEdges(const Graph& g, int start) {
  std::set<std::pair<int, int>> edges;
  std::vector<int> stack{start};
  std::set<int> seen{start};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.at(v)) {
      edges.insert({std::min(v, w), std::max(v, w)});
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return {edges.begin(), edges.end()};
}

}  // namespace

PhyloTree tbrMove(const PhyloTree& tree, Rng& rng) {
  const int n = tree.taxonCount();
  if (n < 4) throw Error("tbrMove: tree must have at least 4 leaves");
  Graph g;
  for (auto [u, v] : tree.edges()) addEdge(g, u, v);
  const auto all = tree.edges();
  const auto [cu, cv] = all[rng.uniformBelow(all.size())];
  removeEdge(g, cu, cv);
  int nextId = tree.vertexCount();

  // Returns the vertex of the component at which the new edge attaches.
  auto prepare = [&](int endpoint) {
    if (tree.isLeaf(endpoint)) {
      if (g[endpoint].empty()) return endpoint;
      return -1;  // unreachable for a binary tree: a leaf has one edge
    }
    const auto nb = g[endpoint];
    removeEdge(g, endpoint, nb[0]);
    removeEdge(g, endpoint, nb[1]);
    g.erase(endpoint);
    addEdge(g, nb[0], nb[1]);
    const auto edges = componentEdges(g, nb[0]);
    const auto [a, b] = edges[rng.uniformBelow(edges.size())];
    const int w = nextId++;
    removeEdge(g, a, b);
    addEdge(g, a, w);
    addEdge(g, w, b);
    return w;
  };
  const int x = prepare(cu);
  const int y = prepare(cv);
  addEdge(g, x, y);

  TreeBuilder builder;
  std::map<int, int> local;
  for (const auto& [v, nb] : g) {
    local[v] = tree.isLeaf(v) ? builder.addLeaf(tree.taxa().label(v)) : builder.addInternal();
  }
  for (const auto& [v, nb] : g) {
    for (int w : nb) {
      if (v < w) builder.connect(local[v], local[w]);
    }
  }
  return builder.build();
}

PhyloTree tbrMove(const PhyloTree& tree, std::uint64_t seed) {
  Rng rng(seed);
  return tbrMove(tree, rng);
}

std::pair<PhyloTree, PhyloTree> generatePair(const GenSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  PhyloTree first = randomTree(spec.t, spec.s, rng);
  PhyloTree second = first;
  for (int i = 0; i < spec.k; ++i) second = tbrMove(second, rng);
  return {std::move(first), std::move(second)};
}

}  // namespace umaf
