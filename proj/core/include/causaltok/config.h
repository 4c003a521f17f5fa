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

#ifndef CAUSALTOK_CONFIG_H_
#define CAUSALTOK_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "causaltok/allocator.h"
#include "causaltok/corpus.h"
#include "causaltok/masking.h"
#include "causaltok/metrics.h"
#include "causaltok/patchify.h"

namespace causaltok {

// Everything a run depends on. Defaults are the desk-scale setup: 16x32x32
// single-channel clips, 4x8x8 patches, 4 blocks of 32 tokens.
struct RunConfig {
  CorpusSpec corpus;
  PatchConfig patch{4, 8, 4, 32};
  int grid_min = 2;
  int grid_max = 32;
  int grid_stride = 1;
  SamplerParams sampler{16.0, 8.0, 2, 32};
  int max_iters = 30;
  bool relax_budget = false;
  int codebook_size = 8192;
  int codebook_dim = 16;
  int batch_size = 0;  // 0: the whole corpus is one batch
  int threads = 1;
  uint64_t seed = 0;
  std::vector<int> budgets{4, 8, 16, 32};
  std::vector<Strategy> strategies{Strategy::kFixed, Strategy::kBiThr, Strategy::kBiDelta,
                                   Strategy::kIlp};
  std::vector<MetricKind> metrics{MetricKind::kMse};
  std::vector<double> noise_levels{0.0, 0.05, 0.1, 0.2};
  int noise_seeds = 20;
  bool joint = false;  // share one budget across blocks instead of per block

  const ClipDims& dims() const { return corpus.dims; }
  std::vector<int> grid() const;
  void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
// Keys:
//   frame_resolution = 16x32x32      (T x H x W)
//   channels, patch_size = 4x8x8     (t x p x p)
//   num_blocks, tokens_per_block
//   grid_min, grid_max, grid_stride
//   sampler_mean, sampler_std, sampler_min, sampler_max
//   max_iters, relax_budget, codebook_size, codebook_dim
//   batch_size, threads, seed, joint
//   budgets, strategies, metrics, noise_levels   (comma separated)
//   noise_seeds
//   corpus_clips, corpus_seed, scene_weights = static:1,moving-shapes:2,...
//   shape_count, shape_speed, cut_position
RunConfig ParseConfig(std::istream& in);
RunConfig LoadConfig(const std::filesystem::path& path);
// Applies one key; used by the parser and by command-line overrides.
void SetConfigValue(RunConfig& cfg, const std::string& key, const std::string& value);
// Canonical text covering every key; ParseConfig(WriteConfig(c)) == c.
std::string WriteConfig(const RunConfig& cfg);
// FNV-1a of the canonical text, as 16 hex digits.
std::string ConfigHash(const RunConfig& cfg);

}  // namespace causaltok

#endif  // CAUSALTOK_CONFIG_H_
