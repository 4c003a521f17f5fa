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

#include "causaltok/masking.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "causaltok/error.h"

namespace causaltok {

namespace {

// exp(kMaskedLogit - max) is exactly 0 in double arithmetic for any finite max.
constexpr double kMaskedLogit = -1e300;

void RequireBlockShape(int num_patches, int blocks, int tokens_per_block) {
  Require(blocks > 0 && tokens_per_block > 0 && num_patches > 0,
          ErrorCode::kInvalidArgument, "mask shape values must be positive");
  Require(num_patches % blocks == 0, ErrorCode::kDimensionMismatch,
          "patch count " + std::to_string(num_patches) +
              " not divisible by block count " + std::to_string(blocks));
}

std::vector<PositionLabel> Stream(TokenKind kind, int count, int per_block) {
  std::vector<PositionLabel> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back({kind, i / per_block, i});
  return out;
}

std::vector<PositionLabel> Concat(std::vector<PositionLabel> a,
                                  const std::vector<PositionLabel>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

int LatentMask::retained() const {
  return std::accumulate(lengths.begin(), lengths.end(), 0);
}

LatentMask MakeLatentMask(std::span<const int> lengths, int tokens_per_block) {
  Require(tokens_per_block > 0, ErrorCode::kInvalidArgument,
          "tokens per block must be positive");
  LatentMask m;
  m.tokens_per_block = tokens_per_block;
  m.lengths.assign(lengths.begin(), lengths.end());
  m.bits.reserve(lengths.size() * static_cast<std::size_t>(tokens_per_block));
  for (int len : lengths) {
    Require(len >= 0 && len <= tokens_per_block, ErrorCode::kOutOfRange,
            "block length " + std::to_string(len) + " outside [0, " +
                std::to_string(tokens_per_block) + "]");
    for (int j = 0; j < tokens_per_block; ++j) m.bits.push_back(j < len ? 1 : 0);
  }
  return m;
}

void SamplerParams::validate(int tokens_per_block) const {
  Require(min_tokens >= 1 && min_tokens <= max_tokens &&
              max_tokens <= tokens_per_block,
          ErrorCode::kInvalidArgument,
          "sampler bounds must satisfy 1 <= min <= max <= tokens per block");
  Require(stddev > 0.0 && std::isfinite(stddev) && std::isfinite(mean),
          ErrorCode::kInvalidArgument, "sampler stddev must be positive");
}

std::vector<int> SampleLengths(Rng& rng, int blocks, const SamplerParams& params) {
  params.validate(params.max_tokens);
  std::normal_distribution<double> normal(params.mean, params.stddev);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(blocks));
  for (int i = 0; i < blocks; ++i) {
    double x;
    do {
      x = normal(rng);
    } while (x < params.min_tokens || x > params.max_tokens);
    const int rounded = static_cast<int>(std::lround(x));
    out.push_back(std::clamp(rounded, params.min_tokens, params.max_tokens));
  }
  return out;
}

const char* TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kImage: return "image";
    case TokenKind::kLatent: return "latent";
    case TokenKind::kQuantized: return "quantized";
    case TokenKind::kImageQuery: return "image-query";
    case TokenKind::kContinuous: return "continuous";
  }
  return "?";
}

AttentionMask::AttentionMask(std::vector<PositionLabel> labels)
    : labels_(std::move(labels)), allow_(labels_.size() * labels_.size(), 0) {}

AttentionMask EncoderMask(int num_patches, int blocks, int tokens_per_block) {
  RequireBlockShape(num_patches, blocks, tokens_per_block);
  AttentionMask mask(Concat(Stream(TokenKind::kImage, num_patches, num_patches / blocks),
                            Stream(TokenKind::kLatent, blocks * tokens_per_block,
                                   tokens_per_block)));
  const auto& lab = mask.labels();
  for (int r = 0; r < mask.size(); ++r)
    for (int c = 0; c < mask.size(); ++c) mask.set(r, c, lab[c].block <= lab[r].block);
  return mask;
}

AttentionMask DecoderBaseMask(int num_patches, int blocks, int tokens_per_block) {
  RequireBlockShape(num_patches, blocks, tokens_per_block);
  AttentionMask mask(Concat(Stream(TokenKind::kQuantized, blocks * tokens_per_block,
                                   tokens_per_block),
                            Stream(TokenKind::kImageQuery, num_patches,
                                   num_patches / blocks)));
  const auto& lab = mask.labels();
  for (int r = 0; r < mask.size(); ++r) {
    for (int c = 0; c < mask.size(); ++c) {
      bool ok = false;
      if (lab[c].kind == TokenKind::kQuantized) {
        ok = lab[c].block <= lab[r].block;
      } else if (lab[r].kind == TokenKind::kImageQuery) {
        ok = lab[c].block == lab[r].block;
      }
      mask.set(r, c, ok);
    }
  }
  return mask;
}

AttentionMask DecoderMask(const AttentionMask& base, const LatentMask& mask) {
  const auto& lab = base.labels();
  const std::size_t n = mask.bits.size();
  Require(n <= lab.size(), ErrorCode::kDimensionMismatch,
          "latent mask longer than decoder pattern");
  for (std::size_t i = 0; i < lab.size(); ++i) {
    const TokenKind want = i < n ? TokenKind::kQuantized : TokenKind::kImageQuery;
    Require(lab[i].kind == want, ErrorCode::kDimensionMismatch,
            "decoder pattern expects " + std::to_string(n) +
                " quantized latents followed by image queries");
  }
  std::vector<uint8_t> keep(lab.size(), 1);
  std::copy(mask.bits.begin(), mask.bits.end(), keep.begin());
  return ReduceMask(base, keep);
}

AttentionMask ScorerBaseMask(int blocks, int tokens_per_block) {
  Require(blocks > 0 && tokens_per_block > 0, ErrorCode::kInvalidArgument,
          "mask shape values must be positive");
  const int n = blocks * tokens_per_block;
  AttentionMask mask(Concat(Stream(TokenKind::kContinuous, n, tokens_per_block),
                            Stream(TokenKind::kQuantized, n, tokens_per_block)));
  const auto& lab = mask.labels();
  for (int r = 0; r < mask.size(); ++r)
    for (int c = 0; c < mask.size(); ++c) mask.set(r, c, lab[c].block <= lab[r].block);
  return mask;
}

AttentionMask ScorerMask(int blocks, int tokens_per_block,
                         std::span<const int> lengths_before, int q) {
  Require(q >= 0 && q < blocks, ErrorCode::kOutOfRange,
          "target block " + std::to_string(q) + " outside [0, " +
              std::to_string(blocks) + ")");
  Require(static_cast<int>(lengths_before.size()) == q, ErrorCode::kDimensionMismatch,
          "expected " + std::to_string(q) + " preceding block lengths");
  std::vector<int> lengths(lengths_before.begin(), lengths_before.end());
  lengths.push_back(tokens_per_block);
  lengths.resize(static_cast<std::size_t>(blocks), 0);
  const LatentMask m = MakeLatentMask(lengths, tokens_per_block);
  std::vector<uint8_t> keep = m.bits;
  keep.insert(keep.end(), m.bits.begin(), m.bits.end());
  return ReduceMask(ScorerBaseMask(blocks, tokens_per_block), keep);
}

AttentionMask ReduceMask(const AttentionMask& mask, std::span<const uint8_t> keep) {
  Require(static_cast<int>(keep.size()) == mask.size(), ErrorCode::kDimensionMismatch,
          "keep vector does not match mask size");
  std::vector<int> survivors;
  std::vector<PositionLabel> labels;
  for (int i = 0; i < mask.size(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) {
      survivors.push_back(i);
      labels.push_back(mask.labels()[static_cast<std::size_t>(i)]);
    }
  }
  AttentionMask out(std::move(labels));
  for (int r = 0; r < out.size(); ++r)
    for (int c = 0; c < out.size(); ++c)
      out.set(r, c, mask.allowed(survivors[static_cast<std::size_t>(r)],
                                 survivors[static_cast<std::size_t>(c)]));
  return out;
}

bool IsBlockCausal(const AttentionMask& mask) {
  const auto& lab = mask.labels();
  for (int r = 0; r < mask.size(); ++r)
    for (int c = 0; c < mask.size(); ++c)
      if (mask.allowed(r, c) && lab[c].block > lab[r].block) return false;
  return true;
}

MaskRuns ToRuns(const AttentionMask& mask) {
  MaskRuns runs;
  runs.labels = mask.labels();
  runs.rows.resize(static_cast<std::size_t>(mask.size()));
  for (int r = 0; r < mask.size(); ++r) {
    auto& row = runs.rows[static_cast<std::size_t>(r)];
    int c = 0;
    while (c < mask.size()) {
      if (!mask.allowed(r, c)) {
        ++c;
        continue;
      }
      const int start = c;
      while (c < mask.size() && mask.allowed(r, c)) ++c;
      row.emplace_back(start, c);
    }
  }
  return runs;
}

AttentionMask Expand(const MaskRuns& runs) {
  AttentionMask mask(runs.labels);
  Require(runs.rows.size() == runs.labels.size(), ErrorCode::kDimensionMismatch,
          "run rows do not match labels");
  for (int r = 0; r < mask.size(); ++r) {
    for (auto [begin, end] : runs.rows[static_cast<std::size_t>(r)]) {
      Require(0 <= begin && begin <= end && end <= mask.size(), ErrorCode::kOutOfRange,
              "run outside mask");
      for (int c = begin; c < end; ++c) mask.set(r, c, true);
    }
  }
  return mask;
}

MaskRuns EncoderMaskRuns(int num_patches, int blocks, int tokens_per_block) {
  RequireBlockShape(num_patches, blocks, tokens_per_block);
  const int per_block = num_patches / blocks;
  MaskRuns runs;
  runs.labels = Concat(Stream(TokenKind::kImage, num_patches, per_block),
                       Stream(TokenKind::kLatent, blocks * tokens_per_block,
                              tokens_per_block));
  runs.rows.reserve(runs.labels.size());
  for (const PositionLabel& l : runs.labels) {
    const int b = l.block + 1;
    runs.rows.push_back({{0, b * per_block},
                         {num_patches, num_patches + b * tokens_per_block}});
  }
  return runs;
}

std::string ToPbm(const AttentionMask& mask) {
  std::ostringstream os;
  os << "P1\n" << mask.size() << " " << mask.size() << "\n";
  for (int r = 0; r < mask.size(); ++r) {
    for (int c = 0; c < mask.size(); ++c) {
      if (c) os << ' ';
      os << (mask.allowed(r, c) ? '1' : '0');
    }
    os << '\n';
  }
  return os.str();
}

std::pair<int, std::vector<uint8_t>> ParsePbm(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  Require(tokens.size() >= 3 && tokens[0] == "P1", ErrorCode::kFormat,
          "not a P1 bitmap");
  const int w = std::stoi(tokens[1]);
  const int h = std::stoi(tokens[2]);
  Require(w == h && w >= 0, ErrorCode::kFormat, "mask bitmap must be square");
  std::vector<uint8_t> cells;
  cells.reserve(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 3; i < tokens.size(); ++i) {
    for (char ch : tokens[i]) {
      Require(ch == '0' || ch == '1', ErrorCode::kFormat, "bad bitmap cell");
      cells.push_back(ch == '1');
    }
  }
  Require(cells.size() == static_cast<std::size_t>(w) * h, ErrorCode::kFormat,
          "bitmap cell count mismatch");
  return {w, std::move(cells)};
}

RowMatrix MaskedAttentionForward(const RowMatrix& queries, const RowMatrix& keys,
                                 const RowMatrix& values, const AttentionMask& mask) {
  const Eigen::Index n = mask.size();
  Require(queries.rows() == n && keys.rows() == n && values.rows() == n &&
              queries.cols() == keys.cols() && queries.cols() > 0,
          ErrorCode::kDimensionMismatch, "attention operands do not match the mask");
  const double scale = 1.0 / std::sqrt(static_cast<double>(queries.cols()));
  RowMatrix out = RowMatrix::Zero(n, values.cols());
  Eigen::VectorXd logits(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    bool any = false;
    for (Eigen::Index c = 0; c < n; ++c) {
      const bool ok = mask.allowed(static_cast<int>(r), static_cast<int>(c));
      any |= ok;
      logits(c) = queries.row(r).dot(keys.row(c)) * scale + (ok ? 0.0 : kMaskedLogit);
    }
    Require(any, ErrorCode::kInvalidArgument,
            "query " + std::to_string(r) + " cannot attend to any position");
    const double peak = logits.maxCoeff();
    Eigen::VectorXd weights = (logits.array() - peak).exp();
    weights /= weights.sum();
    out.row(r) = weights.transpose() * values;
  }
  return out;
}

}  // namespace causaltok
