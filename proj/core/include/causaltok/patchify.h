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

#ifndef CAUSALTOK_PATCHIFY_H_
#define CAUSALTOK_PATCHIFY_H_

#include <vector>

#include <Eigen/Core>

#include "causaltok/video.h"

namespace causaltok {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tokenizer geometry. Defaults are the full-scale values: 4x8x8 patches and
// K = 4 latent blocks of M = 512 tokens.
struct PatchConfig {
  int temporal_patch = 4;
  int spatial_patch = 8;
  int blocks = 4;
  int tokens_per_block = 512;

  int latent_capacity() const { return blocks * tokens_per_block; }
  // Identity embedding: one row holds the raw t*p*p*C samples of a patch.
  int embed_dim(int channels) const {
    return temporal_patch * spatial_patch * spatial_patch * channels;
  }
  int num_patches(const ClipDims& dims) const;
  int frames_per_block(const ClipDims& dims) const { return dims.frames / blocks; }

  // Throws kDimensionMismatch unless the clip tiles exactly into patches and
  // the time chunks split evenly across the blocks.
  void validate(const ClipDims& dims) const;
};

struct PatchCoord {
  int chunk = 0;  // temporal patch index
  int row = 0;
  int col = 0;

  bool operator==(const PatchCoord&) const = default;
};

struct PatchSequence {
  RowMatrix patches;              // L x (t*p*p*C)
  std::vector<PatchCoord> order;  // row i came from grid cell order[i]
};

// Canonical order is time chunk, then patch row, then patch column; inside a
// row samples are laid out (dt, dy, dx, c).
std::vector<PatchCoord> CanonicalOrder(const PatchConfig& cfg, const ClipDims& dims);

PatchSequence Patchify(const VideoClip& clip, const PatchConfig& cfg);

// Inverse of Patchify. Honors seq.order, so rows may arrive permuted as long
// as the order map travels with them.
VideoClip Unpatchify(const PatchSequence& seq, const PatchConfig& cfg,
                     const ClipDims& dims);

// Temporal block owning a patch index: floor(index / (L / K)).
int BlockOf(int patch_index, const PatchConfig& cfg, int num_patches);

}  // namespace causaltok

#endif  // CAUSALTOK_PATCHIFY_H_
