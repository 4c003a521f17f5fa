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

#ifndef CAUSALTOK_CORPUS_H_
#define CAUSALTOK_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "causaltok/rng.h"
#include "causaltok/video.h"

namespace causaltok {

enum class SceneKind { kStatic, kDriftingGradient, kMovingShapes, kSceneCut };

const char* SceneKindName(SceneKind kind);  // "static", "drifting-gradient", ...
SceneKind ParseSceneKind(std::string_view name);

struct CorpusSpec {
  int n_clips = 64;
  ClipDims dims{16, 32, 32, 1};
  // Sampling weights, indexed by SceneKind.
  std::vector<double> weights{1.0, 1.0, 1.0, 1.0};
  int shape_count = 3;
  double shape_speed = 1.5;  // pixels per frame
  // Frame index where a cut happens; 0 draws one uniformly from [1, T - 1].
  int cut_position = 0;
  uint64_t seed = 0;

  void validate() const;
};

// Clip `index` of the corpus; depends only on (spec, index).
SceneKind SceneKindOf(const CorpusSpec& spec, int index);
VideoClip GenerateClip(const CorpusSpec& spec, int index);
std::vector<VideoClip> GenerateCorpus(const CorpusSpec& spec);

// Renders one scene with an explicit generator; samples are clamped to [0, 1].
VideoClip RenderScene(SceneKind kind, const CorpusSpec& spec, Rng& rng);

std::string ClipFileName(int index);  // clip_0000.atv
// Writes clip files and returns their paths.
std::vector<std::filesystem::path> WriteCorpus(const std::filesystem::path& dir,
                                               const std::vector<VideoClip>& clips);
// Reads every clip_*.atv in `dir` in name order. Throws kIo when none exist
// and kDimensionMismatch when the clips disagree on shape.
std::vector<VideoClip> LoadCorpus(const std::filesystem::path& dir);

}  // namespace causaltok

#endif  // CAUSALTOK_CORPUS_H_
