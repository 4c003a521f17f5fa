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

#include "causaltok/codec.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "binary_io.h"
#include "causaltok/error.h"

namespace causaltok {

namespace {

// Row k holds the k-th orthonormal DCT-II basis vector of length n.
std::vector<double> DctMatrix(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i)
      m[static_cast<std::size_t>(k) * n + i] =
          alpha * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
  }
  return m;
}

}  // namespace

BlockTransform::BlockTransform(int frames, int height, int width, int channels)
    : frames_(frames), height_(height), width_(width), channels_(channels) {
  Require(frames > 0 && height > 0 && width > 0 && channels > 0,
          ErrorCode::kDimensionMismatch, "block transform dims must be positive");
  dct_[0] = DctMatrix(frames);
  dct_[1] = DctMatrix(height);
  dct_[2] = DctMatrix(width);

  const int n = frames * height * width * channels;
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), 0);
  auto key = [&](int flat) {
    const int c = flat % channels;
    const int v = (flat / channels) % width;
    const int u = (flat / channels / width) % height;
    const int f = flat / channels / width / height;
    return std::make_tuple(f + u + v, f, u, v, c);
  };
  std::sort(order_.begin(), order_.end(),
            [&](int a, int b) { return key(a) < key(b); });
}

std::array<int, 4> BlockTransform::frequency(int rank) const {
  const int flat = flat_index(rank);
  return {flat / channels_ / width_ / height_, (flat / channels_ / width_) % height_,
          (flat / channels_) % width_, flat % channels_};
}

const std::vector<double>& BlockTransform::Matrix(int axis) const {
  return dct_[static_cast<std::size_t>(axis)];
}

std::vector<double> BlockTransform::ApplyAxis(std::span<const double> in, int axis,
                                              bool inverse) const {
  const std::array<int, 4> dims{frames_, height_, width_, channels_};
  const int n = dims[static_cast<std::size_t>(axis)];
  std::size_t stride = 1;
  for (int a = axis + 1; a < 4; ++a) stride *= static_cast<std::size_t>(dims[a]);
  const std::size_t outer = in.size() / (stride * n);
  const std::vector<double>& m = Matrix(axis);
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < stride; ++i) {
      const std::size_t base = o * n * stride + i;
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          const double w = inverse ? m[static_cast<std::size_t>(j) * n + k]
                                   : m[static_cast<std::size_t>(k) * n + j];
          acc += w * in[base + j * stride];
        }
        out[base + k * stride] = acc;
      }
    }
  }
  return out;
}

std::vector<double> BlockTransform::Forward(std::span<const double> samples) const {
  Require(static_cast<int>(samples.size()) == size(), ErrorCode::kDimensionMismatch,
          "block sample count mismatch");
  std::vector<double> a = ApplyAxis(samples, 0, false);
  a = ApplyAxis(a, 1, false);
  return ApplyAxis(a, 2, false);
}

std::vector<double> BlockTransform::Inverse(std::span<const double> spectrum) const {
  Require(static_cast<int>(spectrum.size()) == size(), ErrorCode::kDimensionMismatch,
          "spectrum size mismatch");
  std::vector<double> a = ApplyAxis(spectrum, 2, true);
  a = ApplyAxis(a, 1, true);
  return ApplyAxis(a, 0, true);
}

std::vector<double> BlockTransform::Ranked(std::span<const double> spectrum,
                                           int count) const {
  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  const int n = std::min(count, size());
  for (int r = 0; r < n; ++r) out[static_cast<std::size_t>(r)] = spectrum[flat_index(r)];
  return out;
}

void BlockTransform::AddBasis(int rank, double weight, std::span<double> out) const {
  const auto [f, u, v, c] = frequency(rank);
  const double* bt = &dct_[0][static_cast<std::size_t>(f) * frames_];
  const double* by = &dct_[1][static_cast<std::size_t>(u) * height_];
  const double* bx = &dct_[2][static_cast<std::size_t>(v) * width_];
  for (int t = 0; t < frames_; ++t) {
    for (int y = 0; y < height_; ++y) {
      const double wty = weight * bt[t] * by[y];
      double* row = &out[(static_cast<std::size_t>(t) * height_ + y) * width_ * channels_];
      for (int x = 0; x < width_; ++x) row[x * channels_ + c] += wty * bx[x];
    }
  }
}

std::vector<double> BlockTransform::Synthesize(std::span<const double> ranked,
                                               int length) const {
  const int n = std::min({length, size(), static_cast<int>(ranked.size())});
  const long direct_cost = static_cast<long>(n) * frames_ * height_ * width_;
  const long separable_cost = static_cast<long>(size()) * (frames_ + height_ + width_);
  if (direct_cost <= separable_cost) {
    std::vector<double> out(static_cast<std::size_t>(size()), 0.0);
    for (int r = 0; r < n; ++r) {
      if (ranked[static_cast<std::size_t>(r)] != 0.0)
        AddBasis(r, ranked[static_cast<std::size_t>(r)], out);
    }
    return out;
  }
  std::vector<double> spectrum(static_cast<std::size_t>(size()), 0.0);
  for (int r = 0; r < n; ++r) spectrum[flat_index(r)] = ranked[static_cast<std::size_t>(r)];
  return Inverse(spectrum);
}

CodecOracle::CodecOracle(const PatchConfig& cfg, const ClipDims& dims)
    : cfg_(cfg),
      dims_(dims),
      frames_per_block_((cfg.validate(dims), dims.frames / cfg.blocks)),
      block_samples_(dims.frame_size() * static_cast<std::size_t>(frames_per_block_)),
      transform_(frames_per_block_, dims.height, dims.width, dims.channels) {}

std::span<const double> CodecOracle::BlockSamples(const VideoClip& clip, int block) const {
  Require(clip.dims() == dims_, ErrorCode::kDimensionMismatch,
          "clip dims " + ToString(clip.dims()) + " != codec dims " + ToString(dims_));
  Require(block >= 0 && block < cfg_.blocks, ErrorCode::kOutOfRange, "block index");
  return std::span<const double>(clip.data()).subspan(block * block_samples_,
                                                      block_samples_);
}

std::vector<double> CodecOracle::LastFrame(std::span<const double> block_samples) const {
  const std::size_t fs = dims_.frame_size();
  auto last = block_samples.subspan(block_samples.size() - fs, fs);
  return {last.begin(), last.end()};
}

std::vector<double> CodecOracle::EncodeBlock(std::span<const double> samples,
                                             std::span<const double> held_frame) const {
  std::vector<double> residual(samples.begin(), samples.end());
  if (!held_frame.empty()) {
    const std::size_t fs = dims_.frame_size();
    Require(held_frame.size() == fs, ErrorCode::kDimensionMismatch, "held frame size");
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= held_frame[i % fs];
  }
  return transform_.Ranked(transform_.Forward(residual), cfg_.tokens_per_block);
}

std::vector<double> CodecOracle::ReconstructBlock(std::span<const double> coefficients,
                                                  int length,
                                                  std::span<const double> held_frame) const {
  std::vector<double> out = transform_.Synthesize(coefficients, length);
  if (!held_frame.empty()) {
    const std::size_t fs = dims_.frame_size();
    Require(held_frame.size() == fs, ErrorCode::kDimensionMismatch, "held frame size");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += held_frame[i % fs];
  }
  return out;
}

void CodecOracle::CheckLengths(std::span<const int> lengths,
                               std::span<const int> limit) const {
  Require(static_cast<int>(lengths.size()) == cfg_.blocks, ErrorCode::kDimensionMismatch,
          "expected " + std::to_string(cfg_.blocks) + " block lengths");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const int cap = limit.empty() ? cfg_.tokens_per_block : limit[i];
    Require(lengths[i] >= 0 && lengths[i] <= cap, ErrorCode::kOutOfRange,
            "block " + std::to_string(i) + " length " + std::to_string(lengths[i]) +
                " outside [0, " + std::to_string(cap) + "]");
  }
}

LatentSequence CodecOracle::Encode(const VideoClip& clip,
                                   std::span<const int> lengths) const {
  std::vector<int> lens(lengths.begin(), lengths.end());
  if (lens.empty()) lens.assign(static_cast<std::size_t>(cfg_.blocks), cfg_.tokens_per_block);
  CheckLengths(lens, {});

  LatentSequence lat;
  lat.tokens_per_block = cfg_.tokens_per_block;
  lat.lengths = lens;
  std::vector<double> held;
  for (int b = 0; b < cfg_.blocks; ++b) {
    std::vector<double> coefs = EncodeBlock(BlockSamples(clip, b), held);
    const int len = lens[static_cast<std::size_t>(b)];
    std::fill(coefs.begin() + len, coefs.end(), 0.0);
    if (b + 1 < cfg_.blocks) held = LastFrame(ReconstructBlock(coefs, len, held));
    lat.blocks.push_back(std::move(coefs));
  }
  return lat;
}

ReconstructionReport CodecOracle::Decode(const LatentSequence& lat,
                                         std::span<const int> lengths,
                                         const VideoClip* reference) const {
  Require(lat.num_blocks() == cfg_.blocks && lat.tokens_per_block == cfg_.tokens_per_block &&
              static_cast<int>(lat.lengths.size()) == cfg_.blocks,
          ErrorCode::kDimensionMismatch, "latent sequence does not match codec config");
  std::vector<int> lens(lengths.begin(), lengths.end());
  if (lens.empty()) lens = lat.lengths;
  CheckLengths(lens, lat.lengths);

  ReconstructionReport report;
  report.clip = VideoClip(dims_);
  if (reference) RequireSameDims(*reference, report.clip);
  std::vector<double> held;
  for (int b = 0; b < cfg_.blocks; ++b) {
    const int len = lens[static_cast<std::size_t>(b)];
    std::vector<double> recon = ReconstructBlock(lat.blocks[static_cast<std::size_t>(b)], len, held);
    if (reference) {
      auto ref = BlockSamples(*reference, b);
      double sse = 0.0;
      for (std::size_t i = 0; i < recon.size(); ++i) sse += (ref[i] - recon[i]) * (ref[i] - recon[i]);
      report.per_block_mse.push_back(sse / static_cast<double>(recon.size()));

      std::vector<double> residual(ref.begin(), ref.end());
      if (!held.empty())
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= held[i % held.size()];
      const std::vector<double> spectrum = transform_.Forward(residual);
      double dropped = 0.0;
      for (int r = std::min(len, transform_.size()); r < transform_.size(); ++r)
        dropped += spectrum[transform_.flat_index(r)] * spectrum[transform_.flat_index(r)];
      report.dropped_energy.push_back(dropped);
    }
    std::copy(recon.begin(), recon.end(), report.clip.data().begin() + b * block_samples_);
    held = LastFrame(recon);
  }
  return report;
}

LatentSequence CodecOracle::TailDrop(const LatentSequence& lat,
                                     std::span<const int> lengths) const {
  CheckLengths(lengths, lat.lengths);
  LatentSequence out = lat;
  out.lengths.assign(lengths.begin(), lengths.end());
  for (int b = 0; b < out.num_blocks(); ++b) {
    auto& blk = out.blocks[static_cast<std::size_t>(b)];
    std::fill(blk.begin() + lengths[static_cast<std::size_t>(b)], blk.end(), 0.0);
  }
  return out;
}

double L1Loss(const VideoClip& a, const VideoClip& b) {
  RequireSameDims(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) sum += std::abs(a.data()[i] - b.data()[i]);
  return sum / static_cast<double>(a.data().size());
}

void WriteLatents(const std::filesystem::path& path, const LatentSequence& lat) {
  internal::BinaryWriter w(path);
  w.magic("ATOKLAT1");
  w.u32(static_cast<uint32_t>(lat.num_blocks()));
  w.u32(static_cast<uint32_t>(lat.tokens_per_block));
  for (int b = 0; b < lat.num_blocks(); ++b) {
    w.u32(static_cast<uint32_t>(lat.lengths[static_cast<std::size_t>(b)]));
    for (double v : lat.blocks[static_cast<std::size_t>(b)]) w.f32(static_cast<float>(v));
  }
  w.finish();
}

LatentSequence ReadLatents(const std::filesystem::path& path) {
  internal::BinaryReader r(path);
  r.expect_magic("ATOKLAT1");
  LatentSequence lat;
  const uint32_t k = r.u32();
  const uint32_t m = r.u32();
  Require(k >= 1 && m >= 1 && static_cast<uint64_t>(k) * m < (uint64_t{1} << 28),
          ErrorCode::kFormat, path.string() + ": implausible latent shape");
  lat.tokens_per_block = static_cast<int>(m);
  for (uint32_t b = 0; b < k; ++b) {
    const uint32_t len = r.u32();
    Require(len <= m, ErrorCode::kFormat, path.string() + ": block length exceeds M");
    lat.lengths.push_back(static_cast<int>(len));
    std::vector<double> coefs(m);
    for (double& v : coefs) v = r.f32();
    lat.blocks.push_back(std::move(coefs));
  }
  r.expect_eof();
  return lat;
}

TokenizedLatents TokenizeLatents(const LatentSequence& lat, const Codebook& book,
                                 Rng& rng, double scale) {
  Require(book.dim() >= 2, ErrorCode::kInvalidArgument,
          "latent tokenization needs codes of width >= 2");
  Require(scale > 0.0, ErrorCode::kInvalidArgument, "scale must be positive");
  TokenizedLatents out;
  out.dequantized = lat;
  for (int b = 0; b < lat.num_blocks(); ++b) {
    const int len = lat.lengths[static_cast<std::size_t>(b)];
    auto& coefs = out.dequantized.blocks[static_cast<std::size_t>(b)];
    RowMatrix features = RowMatrix::Zero(len, book.dim());
    for (int j = 0; j < len; ++j) {
      features(j, 0) = coefs[static_cast<std::size_t>(j)] / scale;
      features(j, 1) = 1.0;
    }
    QuantizerOutput q = SvqSample(features, book, rng);
    for (int j = 0; j < len; ++j) {
      const double denom = q.vectors(j, 1);
      coefs[static_cast<std::size_t>(j)] =
          std::abs(denom) > 1e-12 ? scale * q.vectors(j, 0) / denom : 0.0;
    }
    out.ids.push_back(std::move(q.indices));
  }
  return out;
}

}  // namespace causaltok
