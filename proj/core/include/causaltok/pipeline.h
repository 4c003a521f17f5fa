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

#ifndef CAUSALTOK_PIPELINE_H_
#define CAUSALTOK_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "causaltok/allocator.h"
#include "causaltok/config.h"
#include "causaltok/scorer.h"
#include "causaltok/video.h"

namespace causaltok {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is handled
// exactly once; callers write results into slot i.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

struct PipelineResult {
  Strategy strategy = Strategy::kIlp;
  MetricKind metric = MetricKind::kMse;
  int budget = 0;
  std::vector<std::vector<int>> lengths;  // clip x block
  std::vector<AllocationRecord> records;  // score = the score the allocator saw
  std::vector<double> distortion;         // per clip, metric value (PSNR capped)
  std::vector<double> mse;                // per clip
  double mean_distortion = 0.0;
  double mean_mse = 0.0;
  double mean_tokens = 0.0;
  double allocation_ms = 0.0;  // wall time spent inside the allocator
};

// Blocks are processed in temporal order. For each block the backend scores
// every clip given the lengths already chosen for its earlier blocks, the
// strategy allocates per batch, and after the last block every clip is coded
// and decoded at its chosen lengths and measured on the whole clip.
// With cfg.joint and the ILP strategy, all blocks are scored up front with
// earlier blocks at `budget` and one budget is shared across blocks.
PipelineResult RunPipeline(std::span<const VideoClip> clips, const RunConfig& cfg,
                           Strategy strategy, MetricKind metric, int budget,
                           const ScorerBackend& backend = ScorerBackend::Exact());

struct SweepRow {
  Strategy strategy = Strategy::kIlp;
  MetricKind metric = MetricKind::kMse;
  int budget = 0;
  double mean_distortion = 0.0;
  double mean_tokens = 0.0;
  double mean_mse = 0.0;
  double runtime_ms = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  uint64_t corpus_seed = 0;
  uint64_t run_seed = 0;
  std::string config_hash;
  int clips = 0;
  bool joint = false;
};

// Cross product strategies x budgets x metrics from cfg, one row each, in
// that nesting order. Runtime columns stay 0 unless `timing` is set, so
// identical inputs give byte-identical reports.
SweepReport Sweep(std::span<const VideoClip> clips, const RunConfig& cfg, bool timing = false);

void WriteSweepCsv(std::ostream& out, const SweepReport& report);
void WriteSweepJson(std::ostream& out, const SweepReport& report);

struct RobustnessPoint {
  double noise = 0.0;
  double mean_distortion = 0.0;  // averaged over seeds
  double seed_stddev = 0.0;
  bool violation = false;        // lower than the previous noise level
};

struct RobustnessReport {
  MetricKind metric = MetricKind::kMse;
  int budget = 0;
  int seeds = 0;
  std::vector<RobustnessPoint> points;
  bool monotone() const;
};

// ILP with the noisy backend at every cfg.noise_levels entry, averaged over
// cfg.noise_seeds seeds derived from cfg.seed.
RobustnessReport RobustnessCurve(std::span<const VideoClip> clips, const RunConfig& cfg,
                                 int budget, MetricKind metric = MetricKind::kMse);

void WriteRobustnessCsv(std::ostream& out, const RobustnessReport& report);
void WriteRobustnessJson(std::ostream& out, const RobustnessReport& report);

}  // namespace causaltok

#endif  // CAUSALTOK_PIPELINE_H_
