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

#include "umaf/reduce.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace umaf {

namespace {

// Copy of tree restricted to keep, with optional leaf renaming.
PhyloTree rebuild(const PhyloTree& tree, const Block& keep,
                  const std::map<TaxonId, std::string>& rename = {}) {
  const Embedding emb = embedding(tree, keep);
  TreeBuilder builder;
  std::map<VertexId, int> local;
  for (VertexId v : emb.spanVertices) {
    if (tree.isLeaf(v)) {
      auto it = rename.find(v);
      local[v] = builder.addLeaf(it != rename.end() ? it->second : tree.taxa().label(v));
    } else {
      local[v] = builder.addInternal();
    }
  }
  for (VertexId v : emb.spanVertices) {
    for (VertexId w : tree.neighbors(v)) {
      if (v < w && local.count(w)) builder.connect(local[v], local[w]);
    }
  }
  return builder.build();
}

Block idsOf(const TaxonSet& taxa, const std::vector<std::string>& labels) {
  std::vector<TaxonId> ids;
  for (const auto& label : labels) {
    auto id = taxa.find(label);
    if (!id) throw Error("reduction step names unknown taxon \"" + label + "\"");
    ids.push_back(*id);
  }
  return makeBlock(std::move(ids));
}

// Leaf set of every handle, indexed like rootedSubtrees().
std::vector<Block> handleLeafSets(const PhyloTree& tree) {
  const auto& handles = tree.rootedSubtrees();
  std::vector<Block> sets(handles.size());
  for (std::size_t h = 0; h < handles.size(); ++h) {
    const auto& rs = handles[h];
    if (rs.isSingleton()) {
      sets[h] = {rs.root};
    } else {
      const auto& a = sets[rs.children[0]];
      const auto& b = sets[rs.children[1]];
      sets[h].reserve(a.size() + b.size());
      std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(sets[h]));
    }
  }
  return sets;
}

bool isSplit(const PhyloTree& tree, const Block& side) {
  for (const auto& set : handleLeafSets(tree)) {
    if (set == side) return true;
  }
  return false;
}

bool samePendantShape(const Instance& inst, const Block& side) {
  const int n = inst.t1.taxonCount();
  TaxonId outside = 0;
  while (outside < n && std::binary_search(side.begin(), side.end(), outside)) ++outside;
  Block probe = side;
  probe.insert(std::upper_bound(probe.begin(), probe.end(), outside), outside);
  return restrict(inst.t1, probe) == restrict(inst.t2, probe);
}

std::optional<Block> findCommonSubtree(const Instance& inst) {
  const int n = inst.t1.taxonCount();
  if (n < 4) return std::nullopt;
  std::set<Block> second;
  for (auto& set : handleLeafSets(inst.t2)) {
    const int size = static_cast<int>(set.size());
    if (size >= 2 && size <= n - 2) second.insert(std::move(set));
  }
  std::vector<Block> candidates;
  for (auto& set : handleLeafSets(inst.t1)) {
    if (second.count(set)) candidates.push_back(std::move(set));
  }
  std::sort(candidates.begin(), candidates.end(), [](const Block& a, const Block& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  for (const auto& side : candidates) {
    if (samePendantShape(inst, side)) return side;
  }
  return std::nullopt;
}

// Leaf pairs whose parents are distinct, adjacent, and each carry exactly
// one leaf.
std::set<std::pair<TaxonId, TaxonId>> chainLinks(const PhyloTree& tree) {
  const int n = tree.taxonCount();
  auto soleLeaf = [&](VertexId p) -> TaxonId {
    TaxonId found = -1;
    for (VertexId w : tree.neighbors(p)) {
      if (!tree.isLeaf(w)) continue;
      if (found >= 0) return -1;
      found = w;
    }
    return found;
  };
  std::set<std::pair<TaxonId, TaxonId>> links;
  for (TaxonId a = 0; a < n; ++a) {
    const VertexId p = tree.neighbors(a)[0];
    if (soleLeaf(p) != a) continue;
    for (VertexId q : tree.neighbors(p)) {
      if (tree.isLeaf(q)) continue;
      const TaxonId b = soleLeaf(q);
      if (b >= 0 && a < b) links.insert({a, b});
    }
  }
  return links;
}

bool isChain(const PhyloTree& tree, const Block& order) {
  const auto links = chainLinks(tree);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const TaxonId a = std::min(order[i], order[i + 1]), b = std::max(order[i], order[i + 1]);
    if (!links.count({a, b})) return false;
  }
  return true;
}

// Longest common chains, each oriented from its smaller-labelled end.
std::optional<std::vector<TaxonId>> findLongChain(const Instance& inst) {
  const auto l1 = chainLinks(inst.t1);
  const auto l2 = chainLinks(inst.t2);
  const int n = inst.t1.taxonCount();
  std::vector<std::vector<TaxonId>> adj(n);
  for (const auto& link : l1) {
    if (!l2.count(link)) continue;
    adj[link.first].push_back(link.second);
    adj[link.second].push_back(link.first);
  }
  std::vector<char> seen(n, 0);
  for (TaxonId start = 0; start < n; ++start) {
    if (seen[start] || adj[start].size() != 1) continue;
    std::vector<TaxonId> chain{start};
    seen[start] = 1;
    TaxonId prev = -1, cur = start;
    while (true) {
      TaxonId next = -1;
      for (TaxonId w : adj[cur]) {
        if (w != prev) next = w;
      }
      if (next < 0) break;
      chain.push_back(next);
      seen[next] = 1;
      prev = cur;
      cur = next;
    }
    if (chain.size() > 3) return chain;
  }
  return std::nullopt;
}

std::string freshLabel(const std::set<std::string>& used, int& counter) {
  while (true) {
    std::string label = "_s" + std::to_string(++counter);
    if (!used.count(label)) return label;
  }
}

std::vector<std::string> labelsOf(const TaxonSet& taxa, const std::vector<TaxonId>& ids) {
  std::vector<std::string> out;
  for (TaxonId id : ids) out.push_back(taxa.label(id));
  return out;
}

// Shared driver: rule returns the next step for an instance, or nullopt.
template <typename Rule>
void runToFixpoint(Reduction& reduction, Rule&& rule) {
  while (auto step = rule(reduction.reduced())) {
    Instance next = applyStep(reduction.reduced(), *step);
    reduction.trace.push_back(std::move(*step));
    reduction.stages.push_back(std::move(next));
  }
}

struct Rules {
  std::set<std::string> used;
  int counter = 0;

  std::optional<ReductionStep> subtree(const Instance& inst) {
    auto side = findCommonSubtree(inst);
    if (!side) return std::nullopt;
    const std::string label = freshLabel(used, counter);
    used.insert(label);
    return ReductionStep{ReductionKind::kSubtree, labelsOf(inst.t1.taxa(), *side), {label}};
  }

  static std::optional<ReductionStep> chain(const Instance& inst) {
    auto order = findLongChain(inst);
    if (!order) return std::nullopt;
    auto labels = labelsOf(inst.t1.taxa(), *order);
    std::vector<std::string> kept(labels.begin(), labels.begin() + 3);
    return ReductionStep{ReductionKind::kChain, std::move(labels), std::move(kept)};
  }
};

Reduction start(const PhyloTree& t1, const PhyloTree& t2, Rules& rules) {
  if (!sameTaxa(t1, t2)) throw Error("trees are on different taxon sets");
  for (const auto& label : t1.taxa().labels()) rules.used.insert(label);
  Reduction reduction;
  reduction.stages.push_back({t1, t2});
  return reduction;
}

}  // namespace

Instance applyStep(const Instance& instance, const ReductionStep& step) {
  const TaxonSet& taxa = instance.t1.taxa();
  const Block all = allTaxa(instance.t1);
  if (step.kind == ReductionKind::kSubtree) {
    if (step.replacement.size() != 1) throw Error("subtree step needs exactly one replacement leaf");
    const Block side = idsOf(taxa, step.replaced);
    if (side.size() != step.replaced.size() || side.size() < 2 ||
        static_cast<int>(side.size()) > instance.t1.taxonCount() - 2) {
      throw Error("subtree step has an invalid leaf set");
    }
    if (taxa.find(step.replacement[0])) throw Error("replacement label already in use");
    if (!isSplit(instance.t1, side) || !isSplit(instance.t2, side) ||
        !samePendantShape(instance, side)) {
      throw Error("subtree step does not name a common pendant subtree");
    }
    Block keep;
    std::set_difference(all.begin(), all.end(), side.begin(), side.end(), std::back_inserter(keep));
    keep = makeBlock([&] { auto k = keep; k.push_back(side.front()); return k; }());
    const std::map<TaxonId, std::string> rename{{side.front(), step.replacement[0]}};
    return {rebuild(instance.t1, keep, rename), rebuild(instance.t2, keep, rename)};
  }
  if (step.replaced.size() <= 3 || step.replacement.size() != 3 ||
      !std::equal(step.replacement.begin(), step.replacement.end(), step.replaced.begin())) {
    throw Error("chain step must keep the first three leaves of a longer chain");
  }
  std::vector<TaxonId> order;
  for (const auto& label : step.replaced) order.push_back(taxa.id(label));
  if (!isChain(instance.t1, order) || !isChain(instance.t2, order)) {
    throw Error("chain step does not name a common chain");
  }
  const Block removed = idsOf(taxa, {step.replaced.begin() + 3, step.replaced.end()});
  Block keep;
  std::set_difference(all.begin(), all.end(), removed.begin(), removed.end(),
                      std::back_inserter(keep));
  return {rebuild(instance.t1, keep), rebuild(instance.t2, keep)};
}

Reduction subtreeReduce(const PhyloTree& t1, const PhyloTree& t2) {
  Rules rules;
  Reduction reduction = start(t1, t2, rules);
  runToFixpoint(reduction, [&](const Instance& inst) { return rules.subtree(inst); });
  return reduction;
}

Reduction chainReduce(const PhyloTree& t1, const PhyloTree& t2) {
  Rules rules;
  Reduction reduction = start(t1, t2, rules);
  runToFixpoint(reduction, &Rules::chain);
  return reduction;
}

Reduction reduceInstance(const PhyloTree& t1, const PhyloTree& t2) {
  Rules rules;
  Reduction reduction = start(t1, t2, rules);
  while (true) {
    const std::size_t before = reduction.trace.size();
    runToFixpoint(reduction, [&](const Instance& inst) { return rules.subtree(inst); });
    runToFixpoint(reduction, &Rules::chain);
    if (reduction.trace.size() == before) break;
  }
  return reduction;
}

Reduction replay(const PhyloTree& t1, const PhyloTree& t2, const ReductionTrace& trace) {
  Rules rules;
  Reduction reduction = start(t1, t2, rules);
  for (const auto& step : trace) {
    Instance next = applyStep(reduction.reduced(), step);
    reduction.trace.push_back(step);
    reduction.stages.push_back(std::move(next));
  }
  return reduction;
}

std::vector<Block> liftForest(const Reduction& reduction, const std::vector<Block>& forest) {
  const auto& reduced = reduction.reduced();
  validateAgreementForest(reduced.t1, reduced.t2, forest);
  std::vector<std::vector<std::string>> blocks;
  for (const auto& block : forest) blocks.push_back(blockLabels(reduced.t1.taxa(), block));

  auto toIds = [](const TaxonSet& taxa, const std::vector<std::vector<std::string>>& labelled) {
    std::vector<Block> out;
    for (const auto& b : labelled) out.push_back(idsOf(taxa, b));
    return out;
  };
  auto indexOf = [&](const std::string& label) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (std::find(blocks[i].begin(), blocks[i].end(), label) != blocks[i].end()) return i;
    }
    throw Error("lift: taxon \"" + label + "\" is not covered");
  };

  for (std::size_t s = reduction.trace.size(); s-- > 0;) {
    const ReductionStep& step = reduction.trace[s];
    const Instance& before = reduction.stages[s];
    if (step.kind == ReductionKind::kSubtree) {
      auto& block = blocks[indexOf(step.replacement[0])];
      block.erase(std::find(block.begin(), block.end(), step.replacement[0]));
      block.insert(block.end(), step.replaced.begin(), step.replaced.end());
      continue;
    }
    // Chain: the removed tail joins the block of a kept chain leaf if that
    // yields a forest; otherwise any block that does.
    const std::vector<std::string> tail(step.replaced.begin() + 3, step.replaced.end());
    std::vector<std::size_t> order;
    for (int k = 2; k >= 0; --k) {
      const std::size_t i = indexOf(step.replaced[k]);
      if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
    }
    bool placed = false;
    for (std::size_t i : order) {
      auto trial = blocks;
      trial[i].insert(trial[i].end(), tail.begin(), tail.end());
      try {
        validateAgreementForest(before.t1, before.t2, toIds(before.t1.taxa(), trial));
      } catch (const Error&) {
        continue;
      }
      blocks = std::move(trial);
      placed = true;
      break;
    }
    if (!placed) throw Error("lift: no block accepts the truncated chain tail");
  }
  const auto& original = reduction.original();
  std::vector<Block> lifted = toIds(original.t1.taxa(), blocks);
  std::sort(lifted.begin(), lifted.end());
  validateAgreementForest(original.t1, original.t2, lifted);
  return lifted;
}

std::string formatStep(const ReductionStep& step) {
  auto join = [](const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) out += ',';
      out += labels[i];
    }
    return out;
  };
  return std::string(step.kind == ReductionKind::kSubtree ? "subtree " : "chain ") +
         join(step.replaced) + " -> " + join(step.replacement);
}

void writeTrace(std::ostream& out, const ReductionTrace& trace) {
  for (const auto& step : trace) out << formatStep(step) << '\n';
}

ReductionTrace readTrace(std::istream& in) {
  auto split = [](const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) throw Error("trace: empty label");
      out.push_back(item);
    }
    return out;
  };
  ReductionTrace trace;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto space = line.find(' ');
    const auto arrow = line.find(" -> ");
    if (space == std::string::npos || arrow == std::string::npos || arrow <= space) {
      throw Error("trace line " + std::to_string(lineNo) + " is malformed");
    }
    ReductionStep step;
    const std::string kind = line.substr(0, space);
    if (kind == "subtree") {
      step.kind = ReductionKind::kSubtree;
    } else if (kind == "chain") {
      step.kind = ReductionKind::kChain;
    } else {
      throw Error("trace line " + std::to_string(lineNo) + " has unknown kind \"" + kind + "\"");
    }
    step.replaced = split(line.substr(space + 1, arrow - space - 1));
    step.replacement = split(line.substr(arrow + 4));
    trace.push_back(std::move(step));
  }
  return trace;
}

}  // namespace umaf
