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

// Dense bounded-variable revised simplex with an explicit basis inverse.
// Sized for restricted master problems (hundreds to ~1500 rows); columns are
// stored sparsely since most master columns touch only a handful of rows.

#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace umaf::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kGreaterEqual, kEqual };
enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Row {
  Relation relation = Relation::kGreaterEqual;
  double rhs = 0.0;
  std::string name;
};

struct Column {
  double cost = 0.0;
  std::vector<std::pair<int, double>> coefficients;  // (row, value)
  double lower = 0.0;
  double upper = kInfinity;
  std::string name;
};

// Minimization problem.
class LinearProgram {
 public:
  int addRow(Relation relation, double rhs, std::string name = {});
  int addColumn(double cost, std::vector<std::pair<int, double>> coefficients,
                double lower = 0.0, double upper = kInfinity, std::string name = {});
  void setBounds(int column, double lower, double upper);

  int rowCount() const { return static_cast<int>(rows_.size()); }
  int columnCount() const { return static_cast<int>(columns_.size()); }
  const Row& row(int i) const { return rows_.at(i); }
  const Column& column(int j) const { return columns_.at(j); }

  // CPLEX LP text format, for cross-checking with external solvers.
  std::string toLpFormat() const;

 private:
  std::vector<Row> rows_;
  std::vector<Column> columns_;
};

enum class VarStatus : unsigned char { kBasic, kAtLower, kAtUpper, kFreeZero };

// Statuses for structural columns followed by one slack per row.
struct Basis {
  int rows = 0;
  int columns = 0;
  std::vector<VarStatus> status;
  std::vector<int> basic;  // basic variable of each row position
};

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<double> primal;  // by column
  std::vector<double> dual;    // by row; ≥-rows non-negative, ≤-rows non-positive
  std::vector<double> reducedCost;  // by column
  double objective = 0.0;
  Basis basis;
  int iterations = 0;
  bool warmStarted = false;
};

struct SolverOptions {
  double feasibilityTolerance = 1e-7;
  double optimalityTolerance = 1e-7;
  double pivotTolerance = 1e-9;
  int degeneratePivotLimit = 50;  // consecutive, before switching to Bland's rule
  int refactorInterval = 64;
  int iterationLimit = 500000;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Warm starts from a basis of a smaller LP are extended (new columns
// nonbasic at a bound, new rows with basic slacks); a basis that is singular
// or primal infeasible for the current bounds is ignored.
Solution solve(const LinearProgram& lp, const Basis* warmStart = nullptr,
               const SolverOptions& options = {});

}  // namespace umaf::lp
