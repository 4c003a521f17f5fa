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

#include "causaltok/patchify.h"

#include <string>

#include "causaltok/error.h"

namespace causaltok {

int PatchConfig::num_patches(const ClipDims& dims) const {
  return (dims.frames / temporal_patch) * (dims.height / spatial_patch) *
         (dims.width / spatial_patch);
}

void PatchConfig::validate(const ClipDims& dims) const {
  Require(temporal_patch > 0 && spatial_patch > 0 && blocks > 0 &&
              tokens_per_block > 0,
          ErrorCode::kInvalidArgument, "patch config values must be positive");
  Require(dims.frames % temporal_patch == 0 && dims.height % spatial_patch == 0 &&
              dims.width % spatial_patch == 0,
          ErrorCode::kDimensionMismatch,
          "clip " + ToString(dims) + " does not tile into " +
              std::to_string(temporal_patch) + "x" + std::to_string(spatial_patch) +
              "x" + std::to_string(spatial_patch) + " patches");
  Require((dims.frames / temporal_patch) % blocks == 0,
          ErrorCode::kDimensionMismatch,
          "time chunk count " + std::to_string(dims.frames / temporal_patch) +
              " is not divisible by block count " + std::to_string(blocks));
}

std::vector<PatchCoord> CanonicalOrder(const PatchConfig& cfg, const ClipDims& dims) {
  const int chunks = dims.frames / cfg.temporal_patch;
  const int rows = dims.height / cfg.spatial_patch;
  const int cols = dims.width / cfg.spatial_patch;
  std::vector<PatchCoord> order;
  order.reserve(static_cast<std::size_t>(chunks) * rows * cols);
  for (int t = 0; t < chunks; ++t)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) order.push_back({t, r, c});
  return order;
}

namespace {

// Visits every sample of the patch at `coord` in row layout order.
template <typename Fn>
void ForEachPatchSample(const PatchConfig& cfg, const ClipDims& dims,
                        const PatchCoord& coord, Fn&& fn) {
  const int tp = cfg.temporal_patch;
  const int p = cfg.spatial_patch;
  int k = 0;
  for (int dt = 0; dt < tp; ++dt)
    for (int dy = 0; dy < p; ++dy)
      for (int dx = 0; dx < p; ++dx)
        for (int ch = 0; ch < dims.channels; ++ch)
          fn(k++, coord.chunk * tp + dt, coord.row * p + dy, coord.col * p + dx, ch);
}

}  // namespace

PatchSequence Patchify(const VideoClip& clip, const PatchConfig& cfg) {
  cfg.validate(clip.dims());
  PatchSequence seq;
  seq.order = CanonicalOrder(cfg, clip.dims());
  seq.patches.resize(static_cast<Eigen::Index>(seq.order.size()),
                     cfg.embed_dim(clip.channels()));
  for (std::size_t i = 0; i < seq.order.size(); ++i) {
    auto row = seq.patches.row(static_cast<Eigen::Index>(i));
    ForEachPatchSample(cfg, clip.dims(), seq.order[i],
                       [&](int k, int t, int y, int x, int c) { row(k) = clip.at(t, y, x, c); });
  }
  return seq;
}

VideoClip Unpatchify(const PatchSequence& seq, const PatchConfig& cfg,
                     const ClipDims& dims) {
  cfg.validate(dims);
  const int n = cfg.num_patches(dims);
  Require(seq.patches.rows() == n && static_cast<int>(seq.order.size()) == n &&
              seq.patches.cols() == cfg.embed_dim(dims.channels),
          ErrorCode::kDimensionMismatch,
          "patch sequence shape does not match dims " + ToString(dims));
  const int chunks = dims.frames / cfg.temporal_patch;
  const int rows = dims.height / cfg.spatial_patch;
  const int cols = dims.width / cfg.spatial_patch;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  VideoClip clip(dims);
  for (int i = 0; i < n; ++i) {
    const PatchCoord& pc = seq.order[static_cast<std::size_t>(i)];
    Require(pc.chunk >= 0 && pc.chunk < chunks && pc.row >= 0 && pc.row < rows &&
                pc.col >= 0 && pc.col < cols,
            ErrorCode::kDimensionMismatch, "order map points outside the patch grid");
    char& s = seen[static_cast<std::size_t>((pc.chunk * rows + pc.row) * cols + pc.col)];
    Require(!s, ErrorCode::kDimensionMismatch, "order map is not a bijection");
    s = 1;
    auto row = seq.patches.row(i);
    ForEachPatchSample(cfg, dims, pc,
                       [&](int k, int t, int y, int x, int c) { clip.at(t, y, x, c) = row(k); });
  }
  return clip;
}

int BlockOf(int patch_index, const PatchConfig& cfg, int num_patches) {
  Require(num_patches > 0 && num_patches % cfg.blocks == 0,
          ErrorCode::kDimensionMismatch, "patch count not divisible by block count");
  Require(patch_index >= 0 && patch_index < num_patches, ErrorCode::kOutOfRange,
          "patch index " + std::to_string(patch_index) + " outside [0, " +
              std::to_string(num_patches) + ")");
  return patch_index / (num_patches / cfg.blocks);
}

}  // namespace causaltok
