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


// Instance generation: skewed random binary trees and random TBR moves.
// The generator is std::mt19937_64, whose output sequence is fixed by the
// standard; bounded draws use rejection sampling so results do not depend on
// the standard library's distribution implementations.

#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "umaf/phylo.hpp"

namespace umaf {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound). bound > 0.
  std::uint64_t uniformBelow(std::uint64_t bound);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct GenSpec {
  int t = 0;
  int s = 50;  // skew, percent
  int k = 0;
  std::uint64_t seed = 0;
};

void validate(const GenSpec& spec);

// Leaves are labelled "1".."t".
PhyloTree randomTree(int t, int s, Rng& rng);
PhyloTree randomTree(int t, int s, std::uint64_t seed);

PhyloTree tbrMove(const PhyloTree& tree, Rng& rng);
PhyloTree tbrMove(const PhyloTree& tree, std::uint64_t seed);

// One generator drives the tree and then the k moves in sequence.
std::pair<PhyloTree, PhyloTree> generatePair(const GenSpec& spec);

}  // namespace umaf
