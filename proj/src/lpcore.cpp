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

#include "umaf/lpcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace umaf::lp {

int LinearProgram::addRow(Relation relation, double rhs, std::string name) {
  rows_.push_back({relation, rhs, std::move(name)});
  return rowCount() - 1;
}

int LinearProgram::addColumn(double cost, std::vector<std::pair<int, double>> coefficients,
                             double lower, double upper, std::string name) {
  for (auto [r, v] : coefficients) {
    if (r < 0 || r >= rowCount()) throw std::invalid_argument("coefficient references a missing row");
    (void)v;
  }
  if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
  columns_.push_back({cost, std::move(coefficients), lower, upper, std::move(name)});
  return columnCount() - 1;
}

void LinearProgram::setBounds(int column, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
  columns_.at(column).lower = lower;
  columns_.at(column).upper = upper;
}

namespace {

std::string columnName(const LinearProgram& lp, int j) {
  const auto& name = lp.column(j).name;
  return name.empty() ? "x" + std::to_string(j) : name;
}

void writeTerm(std::ostringstream& out, double coef, const std::string& var, bool first) {
  if (coef < 0) {
    out << (first ? "-" : " - ");
  } else if (!first) {
    out << " + ";
  }
  out << std::abs(coef) << ' ' << var;
}

}  // namespace

std::string LinearProgram::toLpFormat() const {
  std::ostringstream out;
  out.precision(17);
  out << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < columnCount(); ++j) {
    if (columns_[j].cost == 0.0) continue;
    out << ' ';
    writeTerm(out, columns_[j].cost, columnName(*this, j), first);
    first = false;
  }
  if (first) out << " 0 " << (columnCount() > 0 ? columnName(*this, 0) : "dummy");
  out << "\nSubject To\n";
  std::vector<std::vector<std::pair<int, double>>> byRow(rowCount());
  for (int j = 0; j < columnCount(); ++j) {
    for (auto [r, v] : columns_[j].coefficients) byRow[r].emplace_back(j, v);
  }
  for (int i = 0; i < rowCount(); ++i) {
    out << ' ' << (rows_[i].name.empty() ? "r" + std::to_string(i) : rows_[i].name) << ':';
    bool firstTerm = true;
    for (auto [j, v] : byRow[i]) {
      out << ' ';
      writeTerm(out, v, columnName(*this, j), firstTerm);
      firstTerm = false;
    }
    if (firstTerm) out << " 0 " << (columnCount() > 0 ? columnName(*this, 0) : "dummy");
    const char* rel = rows_[i].relation == Relation::kLessEqual      ? "<="
                      : rows_[i].relation == Relation::kGreaterEqual ? ">="
                                                                     : "=";
    out << ' ' << rel << ' ' << rows_[i].rhs << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < columnCount(); ++j) {
    const auto& c = columns_[j];
    const auto name = columnName(*this, j);
    if (std::isinf(c.lower) && std::isinf(c.upper)) {
      out << ' ' << name << " free\n";
    } else if (std::isinf(c.lower)) {
      out << " -inf <= " << name << " <= " << c.upper << '\n';
    } else if (std::isinf(c.upper)) {
      if (c.lower != 0.0) out << ' ' << name << " >= " << c.lower << '\n';
    } else {
      out << ' ' << c.lower << " <= " << name << " <= " << c.upper << '\n';
    }
  }
  out << "End\n";
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

// Variables: [0, n) structural, [n, n + m) slacks, [n + m, n + 2m) artificials.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolverOptions& options)
      : lp_(lp),
        opt_(options),
        n_(lp.columnCount()),
        m_(lp.rowCount()),
        total_(n_ + 2 * m_),
        lower_(total_),
        upper_(total_),
        cost_(total_, 0.0),
        x_(total_, 0.0),
        status_(total_, VarStatus::kAtLower),
        sigma_(m_, 1.0),
        head_(m_, -1),
        binv_(static_cast<std::size_t>(m_) * m_, 0.0) {
    for (int j = 0; j < n_; ++j) {
      lower_[j] = lp.column(j).lower;
      upper_[j] = lp.column(j).upper;
    }
    for (int i = 0; i < m_; ++i) {
      switch (lp.row(i).relation) {
        case Relation::kLessEqual: lower_[n_ + i] = 0.0; upper_[n_ + i] = kInfinity; break;
        case Relation::kGreaterEqual: lower_[n_ + i] = -kInfinity; upper_[n_ + i] = 0.0; break;
        case Relation::kEqual: lower_[n_ + i] = 0.0; upper_[n_ + i] = 0.0; break;
      }
      lower_[n_ + m_ + i] = 0.0;
      upper_[n_ + m_ + i] = 0.0;
    }
  }

  Solution run(const Basis* warm) {
    Solution sol;
    bool ready = warm != nullptr && tryWarmStart(*warm);
    sol.warmStarted = ready;
    if (!ready) {
      coldStart();
      std::fill(cost_.begin(), cost_.end(), 0.0);
      bool anyArtificial = false;
      for (int i = 0; i < m_; ++i) {
        if (head_[i] == n_ + m_ + i) {
          cost_[n_ + m_ + i] = 1.0;
          anyArtificial = true;
        }
      }
      if (anyArtificial) {
        iterate();
        double infeasibility = 0.0;
        for (int i = 0; i < m_; ++i) infeasibility += x_[n_ + m_ + i];
        if (infeasibility > opt_.feasibilityTolerance * std::max(1, m_)) {
          sol.status = Status::kInfeasible;
          sol.iterations = iterations_;
          return sol;
        }
        retireArtificials();
      }
    }
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = lp_.column(j).cost;
    if (!iterate()) {
      sol.status = Status::kUnbounded;
      sol.iterations = iterations_;
      return sol;
    }
    refactor();
    sol.status = Status::kOptimal;
    sol.iterations = iterations_;
    sol.primal.assign(x_.begin(), x_.begin() + n_);
    const auto y = duals();
    sol.dual = y;
    sol.reducedCost.resize(n_);
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) {
      sol.reducedCost[j] = cost_[j] - dot(y, j);
      sol.objective += cost_[j] * x_[j];
    }
    sol.basis.rows = m_;
    sol.basis.columns = n_;
    sol.basis.status.assign(status_.begin(), status_.begin() + n_ + m_);
    sol.basis.basic.assign(head_.begin(), head_.end());
    for (int& b : sol.basis.basic) {
      if (b >= n_ + m_) b = -1;  // artificial on a redundant row
    }
    return sol;
  }

 private:
  template <typename Fn>
  void forColumn(int k, Fn&& fn) const {
    if (k < n_) {
      for (auto [r, v] : lp_.column(k).coefficients) fn(r, v);
    } else if (k < n_ + m_) {
      fn(k - n_, 1.0);
    } else {
      fn(k - n_ - m_, sigma_[k - n_ - m_]);
    }
  }

  double dot(const std::vector<double>& y, int k) const {
    double s = 0.0;
    forColumn(k, [&](int r, double v) { s += y[r] * v; });
    return s;
  }

  double& binv(int r, int c) { return binv_[static_cast<std::size_t>(r) * m_ + c]; }
  double binv(int r, int c) const { return binv_[static_cast<std::size_t>(r) * m_ + c]; }

  void placeNonbasic(int k) {
    if (lower_[k] == upper_[k]) {
      status_[k] = VarStatus::kAtLower;
      x_[k] = lower_[k];
    } else if (status_[k] == VarStatus::kAtUpper && std::isfinite(upper_[k])) {
      x_[k] = upper_[k];
    } else if (std::isfinite(lower_[k])) {
      status_[k] = VarStatus::kAtLower;
      x_[k] = lower_[k];
    } else if (std::isfinite(upper_[k])) {
      status_[k] = VarStatus::kAtUpper;
      x_[k] = upper_[k];
    } else {
      status_[k] = VarStatus::kFreeZero;
      x_[k] = 0.0;
    }
  }

  void coldStart() {
    for (int k = 0; k < n_ + m_; ++k) {
      status_[k] = VarStatus::kAtLower;
      placeNonbasic(k);
    }
    // Slacks start at zero, which is a bound for every relation.
    for (int i = 0; i < m_; ++i) x_[n_ + i] = 0.0;
    std::vector<double> residual(m_);
    for (int i = 0; i < m_; ++i) residual[i] = lp_.row(i).rhs;
    for (int j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      forColumn(j, [&](int r, double v) { residual[r] -= v * x_[j]; });
    }
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int i = 0; i < m_; ++i) {
      const int slack = n_ + i, art = n_ + m_ + i;
      const double r = residual[i];
      const bool slackFits = r >= lower_[slack] - opt_.feasibilityTolerance &&
                             r <= upper_[slack] + opt_.feasibilityTolerance;
      status_[art] = VarStatus::kAtLower;
      x_[art] = 0.0;
      lower_[art] = upper_[art] = 0.0;
      if (slackFits) {
        head_[i] = slack;
        status_[slack] = VarStatus::kBasic;
        x_[slack] = r;
        binv(i, i) = 1.0;
      } else {
        sigma_[i] = r >= 0 ? 1.0 : -1.0;
        head_[i] = art;
        status_[art] = VarStatus::kBasic;
        upper_[art] = kInfinity;
        x_[art] = std::abs(r);
        binv(i, i) = sigma_[i];
      }
    }
    sinceRefactor_ = 0;
  }

  bool tryWarmStart(const Basis& warm) {
    if (warm.rows > m_ || warm.columns > n_ ||
        static_cast<int>(warm.status.size()) != warm.rows + warm.columns ||
        static_cast<int>(warm.basic.size()) != warm.rows) {
      return false;
    }
    auto mapVar = [&](int k) { return k < warm.columns ? k : n_ + (k - warm.columns); };
    for (int k = 0; k < n_ + m_; ++k) status_[k] = VarStatus::kAtLower;
    for (int i = 0; i < m_; ++i) {
      lower_[n_ + m_ + i] = upper_[n_ + m_ + i] = 0.0;
      status_[n_ + m_ + i] = VarStatus::kAtLower;
      x_[n_ + m_ + i] = 0.0;
    }
    for (int k = 0; k < warm.columns + warm.rows; ++k) status_[mapVar(k)] = warm.status[k];
    std::vector<char> isHead(total_, 0);
    for (int i = 0; i < m_; ++i) {
      int var;
      if (i < warm.rows) {
        if (warm.basic[i] < 0) return false;
        var = mapVar(warm.basic[i]);
      } else {
        var = n_ + i;
      }
      if (isHead[var]) return false;
      isHead[var] = 1;
      head_[i] = var;
      status_[var] = VarStatus::kBasic;
    }
    for (int k = 0; k < n_ + m_; ++k) {
      if (isHead[k]) continue;
      if (status_[k] == VarStatus::kBasic) status_[k] = VarStatus::kAtLower;
      placeNonbasic(k);
    }
    if (!refactor(false)) return false;
    for (int i = 0; i < m_; ++i) {
      const int k = head_[i];
      if (x_[k] < lower_[k] - opt_.feasibilityTolerance ||
          x_[k] > upper_[k] + opt_.feasibilityTolerance) {
        return false;
      }
    }
    return true;
  }

  // Rebuilds the inverse from scratch and recomputes basic values.
  bool refactor(bool throwOnSingular = true) {
    std::vector<double> work(static_cast<std::size_t>(m_) * 2 * m_, 0.0);
    auto at = [&](int r, int c) -> double& { return work[static_cast<std::size_t>(r) * 2 * m_ + c]; };
    for (int i = 0; i < m_; ++i) {
      forColumn(head_[i], [&](int r, double v) { at(r, i) = v; });
      at(i, m_ + i) = 1.0;
    }
    for (int c = 0; c < m_; ++c) {
      int pivot = c;
      for (int r = c + 1; r < m_; ++r) {
        if (std::abs(at(r, c)) > std::abs(at(pivot, c))) pivot = r;
      }
      if (std::abs(at(pivot, c)) < 1e-11) {
        if (throwOnSingular) throw NumericError("singular basis");
        return false;
      }
      if (pivot != c) {
        for (int k = 0; k < 2 * m_; ++k) std::swap(at(pivot, k), at(c, k));
      }
      const double inv = 1.0 / at(c, c);
      for (int k = 0; k < 2 * m_; ++k) at(c, k) *= inv;
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = at(r, c);
        if (f == 0.0) continue;
        for (int k = 0; k < 2 * m_; ++k) at(r, k) -= f * at(c, k);
      }
    }
    // B X = I with columns of B ordered by basis position: rows of the reduced
    // right half form B^-1 indexed [position][row].
    for (int r = 0; r < m_; ++r) {
      for (int c = 0; c < m_; ++c) binv(r, c) = at(r, m_ + c);
    }
    std::vector<double> rhs(m_);
    for (int i = 0; i < m_; ++i) rhs[i] = lp_.row(i).rhs;
    for (int k = 0; k < total_; ++k) {
      if (status_[k] == VarStatus::kBasic || x_[k] == 0.0) continue;
      forColumn(k, [&](int r, double v) { rhs[r] -= v * x_[k]; });
    }
    for (int p = 0; p < m_; ++p) {
      double s = 0.0;
      for (int r = 0; r < m_; ++r) s += binv(p, r) * rhs[r];
      x_[head_[p]] = s;
    }
    sinceRefactor_ = 0;
    return true;
  }

  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      const double cb = cost_[head_[p]];
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(p) * m_];
      for (int r = 0; r < m_; ++r) y[r] += cb * row[r];
    }
    return y;
  }

  // Returns false on unboundedness.
  bool iterate() {
    int degenerate = 0;
    bool bland = false;
    std::vector<double> alpha(m_);
    while (true) {
      if (iterations_ >= opt_.iterationLimit) throw NumericError("simplex iteration limit reached");
      if (sinceRefactor_ >= opt_.refactorInterval) refactor();
      const auto y = duals();
      int entering = -1;
      double bestScore = 0.0, enteringD = 0.0;
      for (int k = 0; k < total_; ++k) {
        const VarStatus s = status_[k];
        if (s == VarStatus::kBasic || lower_[k] == upper_[k]) continue;
        const double d = cost_[k] - dot(y, k);
        bool eligible = false;
        if (s == VarStatus::kAtLower) eligible = d < -opt_.optimalityTolerance;
        else if (s == VarStatus::kAtUpper) eligible = d > opt_.optimalityTolerance;
        else eligible = std::abs(d) > opt_.optimalityTolerance;
        if (!eligible) continue;
        if (bland) {
          entering = k;
          enteringD = d;
          break;
        }
        if (std::abs(d) > bestScore) {
          bestScore = std::abs(d);
          entering = k;
          enteringD = d;
        }
      }
      if (entering < 0) return true;
      const double dir = enteringD < 0 ? 1.0 : -1.0;

      std::fill(alpha.begin(), alpha.end(), 0.0);
      forColumn(entering, [&](int r, double v) {
        for (int p = 0; p < m_; ++p) alpha[p] += binv(p, r) * v;
      });

      double step = kInfinity;
      int leavePos = -1;
      for (int p = 0; p < m_; ++p) {
        if (std::abs(alpha[p]) < opt_.pivotTolerance) continue;
        const int k = head_[p];
        const double delta = -dir * alpha[p];  // change of x_k per unit step
        double limit;
        if (delta < 0) {
          if (!std::isfinite(lower_[k])) continue;
          limit = (x_[k] - lower_[k]) / -delta;
        } else {
          if (!std::isfinite(upper_[k])) continue;
          limit = (upper_[k] - x_[k]) / delta;
        }
        limit = std::max(limit, 0.0);
        bool take = false;
        if (leavePos < 0 || limit < step - 1e-12) {
          take = true;
        } else if (limit <= step + 1e-12) {
          take = bland ? head_[p] < head_[leavePos]
                       : std::abs(alpha[p]) > std::abs(alpha[leavePos]);
        }
        if (take) {
          step = limit;
          leavePos = p;
        }
      }
      const double flip = upper_[entering] - lower_[entering];
      ++iterations_;
      if (std::isfinite(flip) && flip <= step) {
        x_[entering] += dir * flip;
        status_[entering] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * flip * alpha[p];
        degenerate = 0;
        bland = false;
        continue;
      }
      if (leavePos < 0) return false;

      x_[entering] += dir * step;
      for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * step * alpha[p];
      const int leaving = head_[leavePos];
      const double delta = -dir * alpha[leavePos];
      if (delta < 0) {
        x_[leaving] = lower_[leaving];
        status_[leaving] = VarStatus::kAtLower;
      } else {
        x_[leaving] = upper_[leaving];
        status_[leaving] = VarStatus::kAtUpper;
      }
      if (lower_[leaving] == upper_[leaving]) status_[leaving] = VarStatus::kAtLower;
      head_[leavePos] = entering;
      status_[entering] = VarStatus::kBasic;
      pivot(leavePos, alpha);

      if (step < 1e-12) {
        if (++degenerate > opt_.degeneratePivotLimit) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
  }

  void pivot(int pos, const std::vector<double>& alpha) {
    double* prow = &binv_[static_cast<std::size_t>(pos) * m_];
    const double inv = 1.0 / alpha[pos];
    for (int c = 0; c < m_; ++c) prow[c] *= inv;
    for (int p = 0; p < m_; ++p) {
      if (p == pos || alpha[p] == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(p) * m_];
      const double f = alpha[p];
      for (int c = 0; c < m_; ++c) row[c] -= f * prow[c];
    }
    ++sinceRefactor_;
  }

  // After phase one: fix artificials at zero and pivot basic ones out where a
  // non-artificial column can replace them.
  void retireArtificials() {
    for (int i = 0; i < m_; ++i) {
      const int art = n_ + m_ + i;
      upper_[art] = 0.0;
      if (status_[art] != VarStatus::kBasic) {
        status_[art] = VarStatus::kAtLower;
        x_[art] = 0.0;
      }
    }
    std::vector<double> alpha(m_);
    for (int pos = 0; pos < m_; ++pos) {
      if (head_[pos] < n_ + m_) continue;
      int best = -1;
      double bestAbs = 1e-7;
      for (int k = 0; k < n_ + m_; ++k) {
        if (status_[k] == VarStatus::kBasic) continue;
        double v = 0.0;
        forColumn(k, [&](int r, double a) { v += binv(pos, r) * a; });
        if (std::abs(v) > bestAbs) {
          bestAbs = std::abs(v);
          best = k;
        }
      }
      if (best < 0) continue;
      std::fill(alpha.begin(), alpha.end(), 0.0);
      forColumn(best, [&](int r, double v) {
        for (int p = 0; p < m_; ++p) alpha[p] += binv(p, r) * v;
      });
      const int art = head_[pos];
      status_[art] = VarStatus::kAtLower;
      x_[art] = 0.0;
      head_[pos] = best;
      status_[best] = VarStatus::kBasic;
      pivot(pos, alpha);
    }
    refactor();
  }

  const LinearProgram& lp_;
  const SolverOptions& opt_;
  int n_, m_, total_;
  std::vector<double> lower_, upper_, cost_, x_;
  std::vector<VarStatus> status_;
  std::vector<double> sigma_;
  std::vector<int> head_;
  std::vector<double> binv_;
  int iterations_ = 0;
  int sinceRefactor_ = 0;
};

}  // namespace

Solution solve(const LinearProgram& lp, const Basis* warmStart, const SolverOptions& options) {
  Simplex simplex(lp, options);
  return simplex.run(warmStart);
}

}  // namespace umaf::lp
