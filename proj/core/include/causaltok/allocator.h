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

#ifndef CAUSALTOK_ALLOCATOR_H_
#define CAUSALTOK_ALLOCATOR_H_

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "causaltok/scorer.h"

namespace causaltok {

enum class Strategy { kFixed, kBiThr, kBiDelta, kIlp };

const char* StrategyName(Strategy strategy);  // "fixed", "bithr", "bidelta", "ilp"
Strategy ParseStrategy(std::string_view name);

// One block index across a batch: pick one grid length per sample so the
// batch spends budget_per_sample tokens per sample on average.
struct AllocationProblem {
  std::vector<std::vector<double>> scores;  // batch x grid, lower is better
  std::vector<int> grid;                    // strictly increasing
  int budget_per_sample = 0;

  int batch_size() const { return static_cast<int>(scores.size()); }
  int64_t total_budget() const {
    return static_cast<int64_t>(budget_per_sample) * batch_size();
  }
  void validate() const;

  static AllocationProblem FromSlice(const ScoreSlice& slice, int budget_per_sample);
};

struct Allocation {
  std::vector<int> tokens;  // one grid value per sample
  Strategy strategy = Strategy::kIlp;
  double objective = 0.0;   // sum of the chosen scores, summed in sample order
  int64_t realized_budget = 0;
};

// Sum of scores[k][index of tokens[k]] accumulated left to right.
double Objective(const AllocationProblem& problem, const std::vector<int>& tokens);

// Everyone gets budget_per_sample, which must lie on the grid.
Allocation AllocateFixed(const AllocationProblem& problem);

struct IlpOptions {
  // Replace the exact budget equality with "at most"; among optimal solutions
  // the one spending the most tokens wins.
  bool relax_budget = false;
};

// Exact solution of
//   min sum_kj s_kj b_kj  s.t.  sum_j b_kj = 1 for all k,  sum_kj g_j b_kj = B N_b
// as a multiple-choice knapsack: a forward dynamic program over (sample,
// tokens spent) holding the least partial score, then a backward pass marking
// states that lie on an optimal path. Reconstruction walks forward taking the
// smallest admissible length, so ties resolve to the lexicographically
// smallest token vector. Partial sums accumulate in sample order, which makes
// the optimum bit-identical to exhaustive enumeration.
//
// Throws kInfeasibleBudget (naming the nearest reachable totals) when no
// assignment spends exactly B N_b tokens.
Allocation AllocateIlp(const AllocationProblem& problem, const IlpOptions& options = {});

// Binary search for a global score threshold; each sample takes the smallest
// length whose score is strictly below it (largest length if none is).
Allocation AllocateBiThr(const AllocationProblem& problem, int max_iters = 30);

// Same search over marginal gains s_j - s_{j+1}: each sample stops at the
// first length whose next step improves the score by less than the threshold.
Allocation AllocateBiDelta(const AllocationProblem& problem, int max_iters = 30);

struct AllocatorOptions {
  IlpOptions ilp;
  int max_iters = 30;
};

Allocation Allocate(Strategy strategy, const AllocationProblem& problem,
                    const AllocatorOptions& options = {});

// Exhaustive check over all grid^B assignments that meet the budget exactly.
// True iff `allocation` meets the budget and its objective equals the minimum.
// Throws kLimitExceeded when grid^B exceeds `limit`.
bool VerifyOptimal(const AllocationProblem& problem, const Allocation& allocation,
                   int64_t limit = int64_t{1} << 24);

// Cross-block variant: every (sample, block) cell of one block-major score
// table becomes a pseudo-sample sharing a single budget of
// samples * blocks * budget_per_sample. tokens[s][b] in the result.
struct JointAllocation {
  std::vector<std::vector<int>> tokens;
  double objective = 0.0;
};
JointAllocation AllocateJointIlp(const ScoreTable& table, int budget_per_sample,
                                 const IlpOptions& options = {});

// CSV rows "sample,block,tokens,score".
struct AllocationRecord {
  int sample = 0;
  int block = 0;
  int tokens = 0;
  double score = 0.0;
};
void WriteAllocationCsv(std::ostream& out, const std::vector<AllocationRecord>& rows);
std::vector<AllocationRecord> ReadAllocationCsv(std::istream& in);

}  // namespace causaltok

#endif  // CAUSALTOK_ALLOCATOR_H_
