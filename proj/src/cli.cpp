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

#include "umaf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "umaf/gen.hpp"
#include "umaf/newick.hpp"
#include "umaf/oracle.hpp"
#include "umaf/reduce.hpp"

namespace umaf {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::int64_t roundMs(double ms) { return static_cast<std::int64_t>(std::llround(ms)); }

std::vector<std::vector<std::string>> labelled(const TaxonSet& taxa, const std::vector<Block>& blocks) {
  std::vector<std::vector<std::string>> out;
  for (const auto& block : blocks) out.push_back(blockLabels(taxa, block));
  return out;
}

PhyloTree readSingleTree(const std::string& path) {
  auto trees = readNewickFile(path);
  if (trees.empty()) throw Error("no tree in " + path);
  if (trees.size() > 1) throw Error(path + " holds more than one tree");
  return std::move(trees.front());
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file << content;
  if (!file) throw Error("failed writing " + path);
}

Json reportJson(const SolveReport& r) {
  Json j;
  j["mafSize"] = r.mafSize;
  j["blocks"] = r.blocks;
  j["columnsGenerated"] = r.columnsGenerated;
  j["branchNodes"] = r.branchNodes;
  j["lpTimeMs"] = r.lpTimeMs;
  j["pricingTimeMs"] = r.pricingTimeMs;
  j["totalTimeMs"] = r.totalTimeMs;
  j["optimal"] = r.optimal;
  j["epsilon"] = r.epsilon;
  j["strategy"] = r.strategy;
  j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
  j["reduced"] = r.reduced;
  j["taxa"] = r.taxa;
  j["reducedTaxa"] = r.reducedTaxa;
  return j;
}

void printHuman(std::ostream& out, const SolveReport& r) {
  out << "uMAF size: " << r.mafSize << (r.optimal ? "" : " (time limit hit, not proven optimal)") << '\n';
  out << "taxa: " << r.taxa;
  if (r.reduced) out << " (reduced to " << r.reducedTaxa << ")";
  out << '\n';
  for (const auto& block : r.blocks) {
    out << "  {";
    for (std::size_t i = 0; i < block.size(); ++i) out << (i ? "," : "") << block[i];
    out << "}\n";
  }
  out << "columns generated: " << r.columnsGenerated << ", branch nodes: " << r.branchNodes << '\n';
  out << "time: " << r.totalTimeMs << " ms (LP " << r.lpTimeMs << " ms, pricing " << r.pricingTimeMs
      << " ms)\n";
}

struct SolveFlags {
  std::string strategy = "ratio";
  double epsilon = 1e-3;
  double timeLimit = 300.0;
  std::string variant = "pinned";
  bool reduce = false;

  void attach(CLI::App* app) {
    app->add_flag("--reduce", reduce, "Apply subtree and chain reductions first");
    app->add_option("--strategy", strategy, "Branching rule")
        ->check(CLI::IsMember({"size", "ratio"}))
        ->capture_default_str();
    app->add_option("--epsilon", epsilon, "Perturbation weight")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--time-limit", timeLimit, "Seconds per instance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--variant", variant, "Pricing combine")
        ->check(CLI::IsMember({"pinned", "paper"}))
        ->capture_default_str();
  }

  SolveConfig config() const {
    SolveConfig c;
    c.strategy = strategy == "size" ? BranchStrategy::kSize : BranchStrategy::kRatio;
    c.epsilon = epsilon;
    c.timeLimitSeconds = timeLimit;
    c.variant = variant == "paper" ? CombineVariant::kPaper : CombineVariant::kPinned;
    return c;
  }
};

int runBench(const std::string& manifestPath, const std::string& outPath, int jobs,
             const SolveFlags& flags, std::ostream& err) {
  std::ifstream manifest(manifestPath);
  if (!manifest) throw Error("cannot read " + manifestPath);
  std::vector<GenSpec> specs;
  std::string line;
  int lineNo = 0;
  while (std::getline(manifest, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream in(line);
    GenSpec spec;
    std::string extra;
    if (!(in >> spec.t >> spec.s >> spec.k >> spec.seed) || (in >> extra)) {
      throw Error("manifest line " + std::to_string(lineNo) + " is not \"t s k seed\"");
    }
    validate(spec);
    specs.push_back(spec);
  }
  std::ofstream out(outPath, std::ios::binary);
  if (!out) throw Error("cannot write " + outPath);

  std::mutex lock;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> timedOut{false};
  std::string failure;
  auto worker = [&] {
    while (true) {
      const std::size_t id = next++;
      if (id >= specs.size()) return;
      const GenSpec& spec = specs[id];
      try {
        auto [t1, t2] = generatePair(spec);
        SolveReport report = solvePipeline(t1, t2, flags.config(), flags.reduce);
        report.seed = spec.seed;
        if (!report.optimal) timedOut = true;
        Json j;
        j["id"] = id;
        j["t"] = spec.t;
        j["s"] = spec.s;
        j["k"] = spec.k;
        const Json fields = reportJson(report);
        for (const auto& [key, value] : fields.items()) j[key] = value;
        std::lock_guard guard(lock);
        out << j.dump() << '\n';
        out.flush();
      } catch (const std::exception& e) {
        std::lock_guard guard(lock);
        if (failure.empty()) failure = "instance " + std::to_string(id) + ": " + e.what();
      }
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!failure.empty()) {
    err << "error: " << failure << '\n';
    return kExitFailure;
  }
  return timedOut ? kExitTimeLimit : kExitOk;
}

}  // namespace

SolveReport solvePipeline(const PhyloTree& t1, const PhyloTree& t2, const SolveConfig& config,
                          bool reduce) {
  const auto start = Clock::now();
  if (!sameTaxa(t1, t2)) throw Error("trees are on different taxon sets");
  SolveReport report;
  report.epsilon = config.epsilon;
  report.strategy = config.strategy == BranchStrategy::kSize ? "size" : "ratio";
  report.reduced = reduce;
  report.taxa = t1.taxonCount();
  SolveResult result;
  std::vector<Block> blocks;
  if (reduce) {
    const Reduction reduction = reduceInstance(t1, t2);
    const Instance& small = reduction.reduced();
    report.reducedTaxa = small.t1.taxonCount();
    result = solve(small.t1, small.t2, config);
    blocks = liftForest(reduction, result.forest.blocks);
  } else {
    report.reducedTaxa = t1.taxonCount();
    result = solve(t1, t2, config);
    blocks = result.forest.blocks;
  }
  report.mafSize = static_cast<int>(blocks.size());
  report.blocks = labelled(t1.taxa(), blocks);
  report.columnsGenerated = result.stats.columnsGenerated;
  report.branchNodes = result.stats.branchNodes;
  report.optimal = result.stats.optimal;
  report.lpTimeMs = roundMs(result.stats.lpTimeMs);
  report.pricingTimeMs = roundMs(result.stats.pricingTimeMs);
  report.totalTimeMs =
      roundMs(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
  return report;
}

std::string toJson(const SolveReport& report) { return reportJson(report).dump(); }

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact unrooted maximum agreement forests by branch-and-price", "umaf"};
  app.require_subcommand(1);

  auto* solveCmd = app.add_subcommand("solve", "Solve one tree pair");
  std::string tree1, tree2;
  bool json = false;
  std::optional<std::uint64_t> seed;
  SolveFlags flags;
  solveCmd->add_option("--tree1", tree1, "First Newick file")->required();
  solveCmd->add_option("--tree2", tree2, "Second Newick file")->required();
  flags.attach(solveCmd);
  solveCmd->add_flag("--json", json, "Machine-readable output");
  solveCmd->add_option("--seed", seed, "Recorded in the report");

  auto* genCmd = app.add_subcommand("gen", "Generate a tree pair");
  GenSpec spec;
  std::string prefix;
  genCmd->add_option("--taxa", spec.t, "Leaf count")->required();
  genCmd->add_option("--skew", spec.s, "Skew percentage")->required();
  genCmd->add_option("--tbr", spec.k, "Number of TBR moves")->required();
  genCmd->add_option("--seed", spec.seed, "PRNG seed")->required();
  genCmd->add_option("--out", prefix, "Output prefix")->required();

  auto* reduceCmd = app.add_subcommand("reduce", "Apply subtree and chain reductions");
  reduceCmd->add_option("--tree1", tree1, "First Newick file")->required();
  reduceCmd->add_option("--tree2", tree2, "Second Newick file")->required();
  reduceCmd->add_option("--out", prefix, "Output prefix")->required();

  auto* oracleCmd = app.add_subcommand("oracle", "Brute-force uMAF for small instances");
  int maxTaxa = OracleLimits{}.maxTaxaUmaf;
  oracleCmd->add_option("--tree1", tree1, "First Newick file")->required();
  oracleCmd->add_option("--tree2", tree2, "Second Newick file")->required();
  oracleCmd->add_option("--max-taxa", maxTaxa, "Refuse larger instances")
      ->check(CLI::Range(3, 20))
      ->capture_default_str();

  auto* benchCmd = app.add_subcommand("bench", "Generate and solve every manifest entry");
  std::string manifest, outPath;
  int jobs = 1;
  benchCmd->add_option("--manifest", manifest, "Lines of \"t s k seed\"")->required();
  benchCmd->add_option("--out", outPath, "JSON-lines output")->required();
  benchCmd->add_option("--jobs", jobs, "Parallel worker slots")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  SolveFlags benchFlags;
  benchFlags.attach(benchCmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    // Subcommand help on a usage error helps more than the top-level text.
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  }

  try {
    if (solveCmd->parsed()) {
      const PhyloTree t1 = readSingleTree(tree1);
      const PhyloTree t2 = readSingleTree(tree2);
      SolveReport report = solvePipeline(t1, t2, flags.config(), flags.reduce);
      report.seed = seed;
      if (json) {
        out << toJson(report) << '\n';
      } else {
        printHuman(out, report);
      }
      return report.optimal ? kExitOk : kExitTimeLimit;
    }
    if (genCmd->parsed()) {
      auto [t1, t2] = generatePair(spec);
      writeFile(prefix + "_1.nwk", serializeNewick(t1) + "\n");
      writeFile(prefix + "_2.nwk", serializeNewick(t2) + "\n");
      writeFile(prefix + ".manifest", std::to_string(spec.t) + " " + std::to_string(spec.s) + " " +
                                           std::to_string(spec.k) + " " +
                                           std::to_string(spec.seed) + "\n");
      out << "wrote " << prefix << "_1.nwk, " << prefix << "_2.nwk, " << prefix << ".manifest\n";
      return kExitOk;
    }
    if (reduceCmd->parsed()) {
      const PhyloTree t1 = readSingleTree(tree1);
      const PhyloTree t2 = readSingleTree(tree2);
      const Reduction reduction = reduceInstance(t1, t2);
      const Instance& small = reduction.reduced();
      writeFile(prefix + "_1.nwk", serializeNewick(small.t1) + "\n");
      writeFile(prefix + "_2.nwk", serializeNewick(small.t2) + "\n");
      std::ostringstream trace;
      writeTrace(trace, reduction.trace);
      writeFile(prefix + ".trace", trace.str());
      out << "taxa " << t1.taxonCount() << " -> " << small.t1.taxonCount() << " in "
          << reduction.trace.size() << " steps\n";
      return kExitOk;
    }
    if (oracleCmd->parsed()) {
      const PhyloTree t1 = readSingleTree(tree1);
      const PhyloTree t2 = readSingleTree(tree2);
      OracleLimits limits;
      limits.maxTaxaUmaf = maxTaxa;
      const auto result = bruteUmaf(t1, t2, limits);
      Json j;
      j["mafSize"] = result.size;
      j["blocks"] = labelled(t1.taxa(), result.forest);
      j["method"] = "brute-force";
      out << j.dump() << '\n';
      return kExitOk;
    }
    if (benchCmd->parsed()) return runBench(manifest, outPath, jobs, benchFlags, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace umaf
