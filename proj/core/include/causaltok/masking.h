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

#ifndef CAUSALTOK_MASKING_H_
#define CAUSALTOK_MASKING_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causaltok/patchify.h"
#include "causaltok/rng.h"

namespace causaltok {

// Per-block prefix mask over the N = M*K latent positions: inside block i the
// first lengths[i] bits are set and the rest are clear.
struct LatentMask {
  int tokens_per_block = 0;
  std::vector<int> lengths;
  std::vector<uint8_t> bits;

  int blocks() const { return static_cast<int>(lengths.size()); }
  int retained() const;
  bool operator==(const LatentMask&) const = default;
};

LatentMask MakeLatentMask(std::span<const int> lengths, int tokens_per_block);

// Truncated-Gaussian block-length sampler.
struct SamplerParams {
  double mean = 256.0;
  double stddev = 128.0;
  int min_tokens = 32;
  int max_tokens = 512;

  // Checks 1 <= min <= max <= tokens_per_block and stddev > 0.
  void validate(int tokens_per_block) const;
};

// K independent draws: Normal(mean, stddev) rejected until it lands in
// [min_tokens, max_tokens], then rounded to nearest and clamped.
std::vector<int> SampleLengths(Rng& rng, int blocks, const SamplerParams& params);

enum class TokenKind : uint8_t {
  kImage,       // patch embedding (encoder input)
  kLatent,      // learnable latent query (encoder)
  kQuantized,   // quantized latent z_q
  kImageQuery,  // image latent query (decoder)
  kContinuous,  // continuous latent z (scorer)
};

const char* TokenKindName(TokenKind kind);

struct PositionLabel {
  TokenKind kind = TokenKind::kImage;
  int block = 0;
  int index = 0;  // index within its own stream (patch index, latent index, ...)

  bool operator==(const PositionLabel&) const = default;
};

// Dense boolean attention pattern; allowed(r, c) means query r may read key c.
class AttentionMask {
 public:
  AttentionMask() = default;
  explicit AttentionMask(std::vector<PositionLabel> labels);

  int size() const { return static_cast<int>(labels_.size()); }
  bool allowed(int r, int c) const { return allow_[index(r, c)] != 0; }
  void set(int r, int c, bool v) { allow_[index(r, c)] = v ? 1 : 0; }
  const std::vector<PositionLabel>& labels() const { return labels_; }
  const std::vector<uint8_t>& cells() const { return allow_; }

  bool operator==(const AttentionMask&) const = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * labels_.size() + static_cast<std::size_t>(c);
  }

  std::vector<PositionLabel> labels_;
  std::vector<uint8_t> allow_;
};

// Encoder pattern over image tokens followed by N latent queries. Position r
// may attend to c iff block(c) <= block(r); image and latent tokens of one
// block see each other.
AttentionMask EncoderMask(int num_patches, int blocks, int tokens_per_block);

// Decoder pattern over N quantized latents followed by L image queries.
// Latents see latents of the same or earlier blocks only; image queries see
// the image queries of their own block plus latents of the same or earlier
// blocks.
AttentionMask DecoderBaseMask(int num_patches, int blocks, int tokens_per_block);

// Deletes the rows and columns of dropped latent positions (bit == 0) from a
// decoder base pattern, leaving N' + L positions.
AttentionMask DecoderMask(const AttentionMask& base, const LatentMask& mask);

// Scorer pattern over N continuous latents followed by N quantized latents,
// block-causal with full visibility inside a block.
AttentionMask ScorerBaseMask(int blocks, int tokens_per_block);

// Scorer pattern for target block q: blocks before q keep their sampled
// lengths, block q keeps all M tokens, later blocks are dropped. The same
// retention applies to both streams.
AttentionMask ScorerMask(int blocks, int tokens_per_block,
                         std::span<const int> lengths_before, int q);

// Keeps positions whose keep flag is set, preserving order.
AttentionMask ReduceMask(const AttentionMask& mask, std::span<const uint8_t> keep);

bool IsBlockCausal(const AttentionMask& mask);

// Run-length form: for each row, half-open column ranges that are allowed.
struct MaskRuns {
  std::vector<PositionLabel> labels;
  std::vector<std::vector<std::pair<int, int>>> rows;
};

MaskRuns ToRuns(const AttentionMask& mask);
AttentionMask Expand(const MaskRuns& runs);
// Builds the encoder pattern directly in run-length form (two runs per row),
// for shapes where the dense matrix is not worth materializing.
MaskRuns EncoderMaskRuns(int num_patches, int blocks, int tokens_per_block);

// Plain PBM ("P1") rendering, one row per query.
std::string ToPbm(const AttentionMask& mask);
// Parses a P1 grid; returns (size, cells). The grid must be square.
std::pair<int, std::vector<uint8_t>> ParsePbm(const std::string& text);

// softmax(Q K^T / sqrt(d) + bias) V where disallowed entries carry a large
// negative bias whose exponential underflows to exactly zero.
RowMatrix MaskedAttentionForward(const RowMatrix& queries, const RowMatrix& keys,
                                 const RowMatrix& values, const AttentionMask& mask);

}  // namespace causaltok

#endif  // CAUSALTOK_MASKING_H_
