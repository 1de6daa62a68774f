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


// Command-line front end. runCli is the whole program minus process setup, so
// tests can drive it with in-memory streams.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "umaf/bnp.hpp"

namespace umaf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTimeLimit = 3;

struct SolveReport {
  int mafSize = 0;
  std::vector<std::vector<std::string>> blocks;
  int columnsGenerated = 0;
  int branchNodes = 0;
  std::int64_t lpTimeMs = 0;
  std::int64_t pricingTimeMs = 0;
  std::int64_t totalTimeMs = 0;
  bool optimal = true;
  double epsilon = 1e-3;
  std::string strategy = "ratio";
  std::optional<std::uint64_t> seed;
  bool reduced = false;
  int taxa = 0;
  int reducedTaxa = 0;
};

// Optional reduction, solve, lift. Times cover the whole pipeline.
SolveReport solvePipeline(const PhyloTree& t1, const PhyloTree& t2, const SolveConfig& config,
                          bool reduce);

// One-line JSON object with a fixed key order.
std::string toJson(const SolveReport& report);

// args excludes the program name.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace umaf
