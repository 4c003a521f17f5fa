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

#ifndef CAUSALTOK_CODEC_H_
#define CAUSALTOK_CODEC_H_

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "causaltok/patchify.h"
#include "causaltok/quantizer.h"
#include "causaltok/video.h"

namespace causaltok {

// Orthonormal separable DCT-II over one temporal block (F x H x W x C, channels
// transformed independently). Coefficients are ranked by a fixed importance
// order: ascending f + u + v, ties by temporal, then vertical, then horizontal
// frequency, then channel. Rank 0 is the DC term.
class BlockTransform {
 public:
  BlockTransform(int frames, int height, int width, int channels);

  int size() const { return static_cast<int>(order_.size()); }
  int frames() const { return frames_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  // Flat (f, u, v, c) index of the coefficient with importance `rank`.
  int flat_index(int rank) const { return order_[static_cast<std::size_t>(rank)]; }
  std::array<int, 4> frequency(int rank) const;

  // Frequency-domain array in flat (f, u, v, c) layout.
  std::vector<double> Forward(std::span<const double> samples) const;
  std::vector<double> Inverse(std::span<const double> spectrum) const;

  // First `count` coefficients in importance order (zero-padded past size()).
  std::vector<double> Ranked(std::span<const double> spectrum, int count) const;

  // out += weight * basis function of importance rank `rank`.
  void AddBasis(int rank, double weight, std::span<double> out) const;

  // Samples for the first `length` ranked coefficients, all others zero.
  std::vector<double> Synthesize(std::span<const double> ranked, int length) const;

 private:
  std::vector<double> ApplyAxis(std::span<const double> in, int axis, bool inverse) const;
  const std::vector<double>& Matrix(int axis) const;

  int frames_, height_, width_, channels_;
  std::array<std::vector<double>, 3> dct_;  // per axis, row k = basis k
  std::vector<int> order_;
};

// Latent coefficients per temporal block. `lengths` are the retained counts;
// coefficients at or past a block's length are zero.
struct LatentSequence {
  int tokens_per_block = 0;
  std::vector<std::vector<double>> blocks;
  std::vector<int> lengths;
  std::string basis_id = "dct3-zigzag";

  int num_blocks() const { return static_cast<int>(blocks.size()); }
};

struct ReconstructionReport {
  VideoClip clip;
  // Filled only when a reference clip is supplied to Decode().
  std::vector<double> per_block_mse;
  // Energy of the reference residual (reference minus the prediction actually
  // used) in ranks >= the retained length, including ranks past capacity.
  std::vector<double> dropped_energy;
};

// Desk-scale stand-in for a learned causal tokenizer. Block 0 is transformed
// directly; block i > 0 transforms the residual against the last reconstructed
// frame of block i - 1 held for the whole block. Prediction uses the block's
// reconstruction at the length that block is coded with, so the encoder runs
// the decoder in its loop.
class CodecOracle {
 public:
  CodecOracle(const PatchConfig& cfg, const ClipDims& dims);

  const PatchConfig& config() const { return cfg_; }
  const ClipDims& dims() const { return dims_; }
  const BlockTransform& transform() const { return transform_; }
  int frames_per_block() const { return frames_per_block_; }
  std::size_t block_samples() const { return block_samples_; }

  // Streaming primitives. `held_frame` is the prediction frame (empty span or
  // all zeros for block 0).
  std::span<const double> BlockSamples(const VideoClip& clip, int block) const;
  std::vector<double> EncodeBlock(std::span<const double> samples,
                                  std::span<const double> held_frame) const;
  std::vector<double> ReconstructBlock(std::span<const double> coefficients, int length,
                                       std::span<const double> held_frame) const;
  std::vector<double> LastFrame(std::span<const double> block_samples) const;

  // Encodes every block with prediction from reconstructions at `lengths`
  // (default: M everywhere). The result's lengths equal `lengths`.
  LatentSequence Encode(const VideoClip& clip, std::span<const int> lengths = {}) const;

  // Decodes at `lengths` (<= lat.lengths component-wise). With a reference the
  // report carries per-block MSE and dropped energy.
  ReconstructionReport Decode(const LatentSequence& lat, std::span<const int> lengths,
                              const VideoClip* reference = nullptr) const;

  // Keeps the first mask.lengths[i] coefficients of each block.
  LatentSequence TailDrop(const LatentSequence& lat, std::span<const int> lengths) const;

 private:
  void CheckLengths(std::span<const int> lengths, std::span<const int> limit) const;

  PatchConfig cfg_;
  ClipDims dims_;
  int frames_per_block_;
  std::size_t block_samples_;
  BlockTransform transform_;
};

// Mean absolute difference over all samples.
double L1Loss(const VideoClip& a, const VideoClip& b);

// "ATOKLAT1", u32 K, u32 M, then per block u32 length + M f32 coefficients.
void WriteLatents(const std::filesystem::path& path, const LatentSequence& lat);
LatentSequence ReadLatents(const std::filesystem::path& path);

// Optional lossy path: every retained coefficient v becomes the feature
// (v / scale, 1, 0, ...) and is quantized with SVQ; the code maps back to
// scale * code[0] / code[1]. Returns per-block token ids and the dequantized
// latents. Requires a codebook width of at least 2.
struct TokenizedLatents {
  std::vector<std::vector<int>> ids;
  LatentSequence dequantized;
};
TokenizedLatents TokenizeLatents(const LatentSequence& lat, const Codebook& book,
                                 Rng& rng, double scale = 1.0);

}  // namespace causaltok

#endif  // CAUSALTOK_CODEC_H_
