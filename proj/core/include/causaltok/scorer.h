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

#ifndef CAUSALTOK_SCORER_H_
#define CAUSALTOK_SCORER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "causaltok/codec.h"
#include "causaltok/masking.h"
#include "causaltok/metrics.h"
#include "causaltok/rng.h"

namespace causaltok {

// Every `stride`-th integer from lo up to hi, always including hi.
std::vector<int> CandidateGrid(int lo, int hi, int stride = 1);

// One ground-truth query: score block q at every candidate length, with
// blocks before q at `lengths_before` and blocks after q dropped.
struct ScorerProbe {
  int block = 0;
  std::vector<int> lengths_before;
  std::vector<int> grid;
  MetricKind metric = MetricKind::kMse;

  void validate(int blocks, int tokens_per_block) const;
};

// Draws the preceding lengths from the training-time block-length sampler.
ScorerProbe SampleProbe(Rng& rng, int block, std::span<const int> grid,
                        MetricKind metric, const SamplerParams& sampler);

// Lower-is-better score of block q per candidate, measured on block q's frames
// only. Block q is coded against the prediction produced by the preceding
// lengths. MSE and PSNR come from the tail energy of the residual spectrum;
// the other metrics reconstruct incrementally along the grid.
std::vector<double> GroundTruthScores(const VideoClip& clip, const ScorerProbe& probe,
                                      const CodecOracle& codec);

enum class ScoreSource { kExact, kNoisy, kFile };
const char* ScoreSourceName(ScoreSource source);

// Stand-ins for a learned score predictor. kNoisy perturbs the exact scores
// with i.i.d. N(0, (noise * row range)^2); each row draws from a sub-seed of
// (seed, sample id, block).
struct ScorerBackend {
  ScoreSource kind = ScoreSource::kExact;
  double noise = 0.0;
  uint64_t seed = 0;

  static ScorerBackend Exact() { return {}; }
  static ScorerBackend Noisy(double noise, uint64_t seed) {
    return {ScoreSource::kNoisy, noise, seed};
  }
};

struct ScoreSlice {
  int block = 0;
  std::vector<int> grid;
  MetricKind metric = MetricKind::kMse;
  ScoreSource source = ScoreSource::kExact;
  std::vector<std::vector<double>> rows;  // samples x candidates
};

// Scores block q for a batch. lengths_before[k] are the lengths already chosen
// for sample k's earlier blocks. Sample ids for noise seeding start at
// first_sample.
ScoreSlice PredictScores(std::span<const VideoClip> clips, int block,
                         std::span<const std::vector<int>> lengths_before,
                         const ScorerBackend& backend, MetricKind metric,
                         std::span<const int> grid, const CodecOracle& codec,
                         int first_sample = 0);

// samples x blocks x candidates, lower is better.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(int samples, int blocks, std::vector<int> grid, MetricKind metric,
             ScoreSource source);

  int samples() const { return samples_; }
  int blocks() const { return blocks_; }
  const std::vector<int>& grid() const { return grid_; }
  MetricKind metric() const { return metric_; }
  ScoreSource source() const { return source_; }

  double& at(int sample, int block, int candidate);
  double at(int sample, int block, int candidate) const;

  void SetSlice(const ScoreSlice& slice);
  ScoreSlice Slice(int block) const;

 private:
  std::size_t offset(int sample, int block, int candidate) const;

  int samples_ = 0;
  int blocks_ = 0;
  std::vector<int> grid_;
  MetricKind metric_ = MetricKind::kMse;
  ScoreSource source_ = ScoreSource::kExact;
  std::vector<double> scores_;
};

// Mean squared difference between two tables on the same grid.
double ScoreLoss(const ScoreTable& predicted, const ScoreTable& truth);

// CSV with header "sample,block,candidate,score".
void WriteScoreCsv(std::ostream& out, const ScoreTable& table);
ScoreTable ReadScoreCsv(std::istream& in, MetricKind metric = MetricKind::kMse);

}  // namespace causaltok

#endif  // CAUSALTOK_SCORER_H_
