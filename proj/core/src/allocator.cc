// Copyright 2026 The causaltok Authors
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

#include "causaltok/allocator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "causaltok/error.h"

namespace causaltok {

namespace {

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

int GridIndex(const std::vector<int>& grid, int value) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), value);
  Require(it != grid.end() && *it == value, ErrorCode::kInvalidArgument,
          "token count " + std::to_string(value) + " is not on the candidate grid");
  return static_cast<int>(it - grid.begin());
}

Allocation Finish(const AllocationProblem& problem, std::vector<int> tokens,
                  Strategy strategy) {
  Allocation a;
  a.strategy = strategy;
  a.objective = Objective(problem, tokens);
  for (int t : tokens) a.realized_budget += t;
  a.tokens = std::move(tokens);
  return a;
}

// Shared driver for the two binary searches. curves[k][j] belongs to
// candidate values[j]; samples whose curve never drops below the threshold
// take `fallback`.
std::vector<int> ThresholdSearch(const std::vector<std::vector<double>>& curves,
                                 const std::vector<int>& values, int fallback,
                                 int budget_per_sample, int max_iters) {
  Require(max_iters >= 1, ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  double hi = -kUnreachable, lo = kUnreachable;
  for (const auto& row : curves)
    for (double s : row) {
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
  const int64_t target = static_cast<int64_t>(budget_per_sample) *
                         static_cast<int64_t>(curves.size());
  std::vector<int> tokens(curves.size(), fallback);
  for (int it = 0; it < max_iters; ++it) {
    const double mid = (hi + lo) / 2;
    int64_t spent = 0;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      tokens[k] = fallback;
      for (std::size_t j = 0; j < curves[k].size(); ++j) {
        if (curves[k][j] < mid) {
          tokens[k] = values[j];
          break;
        }
      }
      spent += tokens[k];
    }
    if (spent > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return tokens;
}

}  // namespace

const char* StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kFixed: return "fixed";
    case Strategy::kBiThr: return "bithr";
    case Strategy::kBiDelta: return "bidelta";
    case Strategy::kIlp: return "ilp";
  }
  return "?";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "fixed") return Strategy::kFixed;
  if (name == "bithr") return Strategy::kBiThr;
  if (name == "bidelta") return Strategy::kBiDelta;
  if (name == "ilp") return Strategy::kIlp;
  Fail(ErrorCode::kInvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

void AllocationProblem::validate() const {
  Require(batch_size() >= 1, ErrorCode::kInvalidArgument, "batch must hold a sample");
  Require(!grid.empty(), ErrorCode::kInvalidArgument, "empty candidate grid");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    Require(grid[j] >= 0, ErrorCode::kInvalidArgument, "negative candidate length");
    Require(j == 0 || grid[j] > grid[j - 1], ErrorCode::kInvalidArgument,
            "candidate grid must be strictly increasing");
  }
  for (const auto& row : scores) {
    Require(row.size() == grid.size(), ErrorCode::kDimensionMismatch,
            "score row length differs from grid size");
    for (double s : row)
      Require(std::isfinite(s), ErrorCode::kInvalidArgument, "non-finite score");
  }
  Require(budget_per_sample >= grid.front() && budget_per_sample <= grid.back(),
          ErrorCode::kInvalidArgument,
          "per-sample budget " + std::to_string(budget_per_sample) + " outside grid range [" +
              std::to_string(grid.front()) + ", " + std::to_string(grid.back()) + "]");
}

AllocationProblem AllocationProblem::FromSlice(const ScoreSlice& slice,
                                               int budget_per_sample) {
  return {slice.rows, slice.grid, budget_per_sample};
}

double Objective(const AllocationProblem& problem, const std::vector<int>& tokens) {
  Require(tokens.size() == problem.scores.size(), ErrorCode::kDimensionMismatch,
          "one token count per sample required");
  double total = 0.0;
  for (std::size_t k = 0; k < tokens.size(); ++k)
    total += problem.scores[k][static_cast<std::size_t>(GridIndex(problem.grid, tokens[k]))];
  return total;
}

Allocation AllocateFixed(const AllocationProblem& problem) {
  problem.validate();
  GridIndex(problem.grid, problem.budget_per_sample);
  return Finish(problem,
                std::vector<int>(problem.scores.size(), problem.budget_per_sample),
                Strategy::kFixed);
}

Allocation AllocateIlp(const AllocationProblem& problem, const IlpOptions& options) {
  problem.validate();
  const int b = problem.batch_size();
  const int g = static_cast<int>(problem.grid.size());
  const int base = problem.grid.front();
  // Budget is tracked as tokens spent above the grid minimum.
  std::vector<int> step(problem.grid.size());
  for (int j = 0; j < g; ++j) step[j] = problem.grid[j] - base;
  const int64_t span64 = static_cast<int64_t>(step.back()) * b;
  const int64_t target64 = problem.total_budget() - static_cast<int64_t>(base) * b;
  Require(span64 < (int64_t{1} << 31), ErrorCode::kLimitExceeded, "budget range too large");
  const int span = static_cast<int>(span64);
  const int cols = span + 1;

  // best[k][w]: least score of samples < k spending w extra tokens.
  std::vector<double> best(static_cast<std::size_t>(b + 1) * cols, kUnreachable);
  auto at = [&](int k, int w) -> double& {
    return best[static_cast<std::size_t>(k) * cols + w];
  };
  at(0, 0) = 0.0;
  for (int k = 0; k < b; ++k) {
    const auto& row = problem.scores[static_cast<std::size_t>(k)];
    for (int w = 0; w <= step.back() * k; ++w) {
      const double v = at(k, w);
      if (v == kUnreachable) continue;
      for (int j = 0; j < g; ++j) {
        double& dst = at(k + 1, w + step[j]);
        dst = std::min(dst, v + row[static_cast<std::size_t>(j)]);
      }
    }
  }

  int goal = -1;
  if (target64 >= 0 && target64 <= span && at(b, static_cast<int>(target64)) != kUnreachable) {
    goal = static_cast<int>(target64);
  }
  if (options.relax_budget && target64 >= 0) {
    const int limit = static_cast<int>(std::min<int64_t>(target64, span));
    double least = kUnreachable;
    for (int w = 0; w <= limit; ++w) {
      // <= keeps the largest spend among equal optima.
      if (at(b, w) != kUnreachable && at(b, w) <= least) {
        least = at(b, w);
        goal = w;
      }
    }
  }
  if (goal < 0) {
    int64_t below = -1, above = -1;
    for (int w = 0; w <= span; ++w) {
      if (at(b, w) == kUnreachable) continue;
      const int64_t total = w + static_cast<int64_t>(base) * b;
      if (total < problem.total_budget()) below = total;
      if (total > problem.total_budget() && above < 0) above = total;
    }
    std::string msg = "no assignment spends exactly " +
                      std::to_string(problem.total_budget()) + " tokens; nearest feasible totals: ";
    msg += below >= 0 ? std::to_string(below) : std::string("none");
    msg += " below, ";
    msg += above >= 0 ? std::to_string(above) : std::string("none");
    msg += " above";
    Fail(ErrorCode::kInfeasibleBudget, msg);
  }

  // on_path[k][w]: state (k, w) continues to the goal through state-optimal
  // transitions.
  std::vector<uint8_t> on_path(best.size(), 0);
  auto path = [&](int k, int w) -> uint8_t& {
    return on_path[static_cast<std::size_t>(k) * cols + w];
  };
  path(b, goal) = 1;
  for (int k = b - 1; k >= 0; --k) {
    const auto& row = problem.scores[static_cast<std::size_t>(k)];
    for (int w = 0; w <= std::min(goal, step.back() * k); ++w) {
      const double v = at(k, w);
      if (v == kUnreachable) continue;
      for (int j = 0; j < g && w + step[j] <= goal; ++j) {
        const int next = w + step[j];
        if (path(k + 1, next) && v + row[static_cast<std::size_t>(j)] == at(k + 1, next)) {
          path(k, w) = 1;
          break;
        }
      }
    }
  }

  std::vector<int> tokens;
  tokens.reserve(static_cast<std::size_t>(b));
  int w = 0;
  for (int k = 0; k < b; ++k) {
    const auto& row = problem.scores[static_cast<std::size_t>(k)];
    int pick = -1;
    for (int j = 0; j < g && w + step[j] <= goal; ++j) {
      const int next = w + step[j];
      if (path(k + 1, next) && at(k, w) + row[static_cast<std::size_t>(j)] == at(k + 1, next)) {
        pick = j;
        break;
      }
    }
    Require(pick >= 0, ErrorCode::kInvalidArgument, "internal: broken optimal path");
    tokens.push_back(problem.grid[static_cast<std::size_t>(pick)]);
    w += step[static_cast<std::size_t>(pick)];
  }
  return Finish(problem, std::move(tokens), Strategy::kIlp);
}

Allocation AllocateBiThr(const AllocationProblem& problem, int max_iters) {
  problem.validate();
  return Finish(problem,
                ThresholdSearch(problem.scores, problem.grid, problem.grid.back(),
                                problem.budget_per_sample, max_iters),
                Strategy::kBiThr);
}

Allocation AllocateBiDelta(const AllocationProblem& problem, int max_iters) {
  problem.validate();
  if (problem.grid.size() == 1) {
    return Finish(problem, std::vector<int>(problem.scores.size(), problem.grid.front()),
                  Strategy::kBiDelta);
  }
  std::vector<std::vector<double>> deltas;
  deltas.reserve(problem.scores.size());
  for (const auto& row : problem.scores) {
    std::vector<double> d(row.size() - 1);
    for (std::size_t j = 0; j + 1 < row.size(); ++j) d[j] = row[j] - row[j + 1];
    deltas.push_back(std::move(d));
  }
  const std::vector<int> values(problem.grid.begin(), problem.grid.end() - 1);
  return Finish(problem,
                ThresholdSearch(deltas, values, problem.grid.back(),
                                problem.budget_per_sample, max_iters),
                Strategy::kBiDelta);
}

Allocation Allocate(Strategy strategy, const AllocationProblem& problem,
                    const AllocatorOptions& options) {
  switch (strategy) {
    case Strategy::kFixed: return AllocateFixed(problem);
    case Strategy::kBiThr: return AllocateBiThr(problem, options.max_iters);
    case Strategy::kBiDelta: return AllocateBiDelta(problem, options.max_iters);
    case Strategy::kIlp: return AllocateIlp(problem, options.ilp);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown strategy");
}

bool VerifyOptimal(const AllocationProblem& problem, const Allocation& allocation,
                   int64_t limit) {
  problem.validate();
  const int b = problem.batch_size();
  const int g = static_cast<int>(problem.grid.size());
  int64_t count = 1;
  for (int k = 0; k < b; ++k) {
    count *= g;
    Require(count <= limit, ErrorCode::kLimitExceeded,
            "exhaustive check needs more than " + std::to_string(limit) + " assignments");
  }
  std::vector<int> digits(static_cast<std::size_t>(b), 0);
  double least = kUnreachable;
  for (int64_t n = 0; n < count; ++n) {
    int64_t spent = 0;
    double total = 0.0;
    for (int k = 0; k < b; ++k) {
      spent += problem.grid[static_cast<std::size_t>(digits[k])];
      total += problem.scores[static_cast<std::size_t>(k)][static_cast<std::size_t>(digits[k])];
    }
    if (spent == problem.total_budget()) least = std::min(least, total);
    for (int k = b - 1; k >= 0; --k) {
      if (++digits[static_cast<std::size_t>(k)] < g) break;
      digits[static_cast<std::size_t>(k)] = 0;
    }
  }
  return allocation.realized_budget == problem.total_budget() &&
         allocation.objective == least;
}

JointAllocation AllocateJointIlp(const ScoreTable& table, int budget_per_sample,
                                 const IlpOptions& options) {
  AllocationProblem problem;
  problem.grid = table.grid();
  problem.budget_per_sample = budget_per_sample;
  for (int s = 0; s < table.samples(); ++s)
    for (int b = 0; b < table.blocks(); ++b) {
      std::vector<double> row;
      for (std::size_t j = 0; j < table.grid().size(); ++j)
        row.push_back(table.at(s, b, static_cast<int>(j)));
      problem.scores.push_back(std::move(row));
    }
  const Allocation flat = AllocateIlp(problem, options);
  JointAllocation out;
  out.objective = flat.objective;
  out.tokens.assign(static_cast<std::size_t>(table.samples()), {});
  for (int s = 0; s < table.samples(); ++s)
    for (int b = 0; b < table.blocks(); ++b)
      out.tokens[static_cast<std::size_t>(s)].push_back(
          flat.tokens[static_cast<std::size_t>(s * table.blocks() + b)]);
  return out;
}

void WriteAllocationCsv(std::ostream& out, const std::vector<AllocationRecord>& rows) {
  out << "sample,block,tokens,score\n";
  char buf[64];
  for (const AllocationRecord& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.score);
    out << r.sample << ',' << r.block << ',' << r.tokens << ',' << buf << '\n';
  }
}

std::vector<AllocationRecord> ReadAllocationCsv(std::istream& in) {
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kFormat,
          "empty allocation CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Require(line == "sample,block,tokens,score", ErrorCode::kFormat,
          "allocation CSV header must be 'sample,block,tokens,score'");
  std::vector<AllocationRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    AllocationRecord r;
    char c1, c2, c3;
    Require(static_cast<bool>(ls >> r.sample >> c1 >> r.block >> c2 >> r.tokens >> c3 >> r.score) &&
                c1 == ',' && c2 == ',' && c3 == ',',
            ErrorCode::kFormat, "bad allocation CSV line: " + line);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace causaltok
