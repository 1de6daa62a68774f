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

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "umaf/phylo.hpp"

namespace umaf {

class NewickError : public Error {
 public:
  NewickError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Strict Newick reader. Branch lengths and internal-node labels are accepted
// and dropped; bracket comments are rejected; a bifurcating top level is
// unrooted by suppressing the top vertex.
PhyloTree parseNewick(std::string_view text);

// Canonical form: trifurcation at the vertex adjacent to the smallest label,
// every grouping ordered by its smallest label.
std::string serializeNewick(const PhyloTree& tree);

// One tree per non-blank line.
std::vector<PhyloTree> readNewickFile(const std::filesystem::path& path);

}  // namespace umaf
