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

#include "causaltok/scorer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "causaltok/error.h"

namespace causaltok {

std::vector<int> CandidateGrid(int lo, int hi, int stride) {
  Require(lo >= 0 && lo <= hi && stride >= 1, ErrorCode::kInvalidArgument,
          "grid needs 0 <= lo <= hi and stride >= 1");
  std::vector<int> grid;
  for (int v = lo; v < hi; v += stride) grid.push_back(v);
  grid.push_back(hi);
  return grid;
}

void ScorerProbe::validate(int blocks, int tokens_per_block) const {
  Require(block >= 0 && block < blocks, ErrorCode::kOutOfRange,
          "probe block " + std::to_string(block) + " outside [0, " +
              std::to_string(blocks) + ")");
  Require(static_cast<int>(lengths_before.size()) == block, ErrorCode::kDimensionMismatch,
          "probe needs exactly one preceding length per earlier block");
  for (int len : lengths_before)
    Require(len >= 0 && len <= tokens_per_block, ErrorCode::kOutOfRange,
            "preceding length outside [0, M]");
  Require(!grid.empty(), ErrorCode::kInvalidArgument, "empty candidate grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Require(grid[i] >= 0 && grid[i] <= tokens_per_block, ErrorCode::kOutOfRange,
            "candidate outside [0, M]");
    Require(i == 0 || grid[i] > grid[i - 1], ErrorCode::kInvalidArgument,
            "candidate grid must be strictly increasing");
  }
}

ScorerProbe SampleProbe(Rng& rng, int block, std::span<const int> grid,
                        MetricKind metric, const SamplerParams& sampler) {
  ScorerProbe probe;
  probe.block = block;
  probe.grid.assign(grid.begin(), grid.end());
  probe.metric = metric;
  probe.lengths_before = SampleLengths(rng, block, sampler);
  return probe;
}

std::vector<double> GroundTruthScores(const VideoClip& clip, const ScorerProbe& probe,
                                      const CodecOracle& codec) {
  const PatchConfig& cfg = codec.config();
  probe.validate(cfg.blocks, cfg.tokens_per_block);

  std::vector<double> held;
  for (int b = 0; b < probe.block; ++b) {
    const std::vector<double> coefs = codec.EncodeBlock(codec.BlockSamples(clip, b), held);
    held = codec.LastFrame(codec.ReconstructBlock(
        coefs, probe.lengths_before[static_cast<std::size_t>(b)], held));
  }
  const std::span<const double> samples = codec.BlockSamples(clip, probe.block);
  const BlockTransform& tx = codec.transform();

  if (probe.metric == MetricKind::kMse || probe.metric == MetricKind::kPsnr) {
    // The basis is orthonormal, so the error at length p is the energy of the
    // residual spectrum from rank p on. Suffix sums of squares never shrink
    // in floating point, which keeps the scores monotone along the grid where
    // incremental pixel updates can wobble by an ulp.
    std::vector<double> residual(samples.begin(), samples.end());
    for (std::size_t i = 0; i < residual.size() && !held.empty(); ++i)
      residual[i] -= held[i % held.size()];
    const std::vector<double> ranked = tx.Ranked(tx.Forward(residual), tx.size());
    std::vector<double> tail(ranked.size() + 1, 0.0);
    for (std::size_t r = ranked.size(); r-- > 0;) tail[r] = tail[r + 1] + ranked[r] * ranked[r];
    const double count = static_cast<double>(residual.size());
    std::vector<double> scores;
    scores.reserve(probe.grid.size());
    for (int p : probe.grid) {
      const double mse = tail[static_cast<std::size_t>(std::min(p, tx.size()))] / count;
      scores.push_back(ToScore(probe.metric, probe.metric == MetricKind::kMse
                                                 ? mse
                                                 : PsnrFromMse(mse)));
    }
    return scores;
  }

  const std::vector<double> coefs = codec.EncodeBlock(samples, held);
  const int span_frames = codec.frames_per_block();
  const VideoClip reference = clip.frame_range(probe.block * span_frames, span_frames);
  VideoClip recon(reference.dims());
  if (!held.empty()) {
    for (std::size_t i = 0; i < recon.data().size(); ++i)
      recon.data()[i] = held[i % held.size()];
  }

  std::vector<double> scores;
  scores.reserve(probe.grid.size());
  int added = 0;
  for (int p : probe.grid) {
    for (; added < std::min(p, tx.size()); ++added) {
      const double c = coefs[static_cast<std::size_t>(added)];
      if (c != 0.0) tx.AddBasis(added, c, recon.data());
    }
    scores.push_back(ToScore(probe.metric, Evaluate(probe.metric, reference, recon)));
  }
  return scores;
}

const char* ScoreSourceName(ScoreSource source) {
  switch (source) {
    case ScoreSource::kExact: return "exact";
    case ScoreSource::kNoisy: return "noisy";
    case ScoreSource::kFile: return "file";
  }
  return "?";
}

ScoreSlice PredictScores(std::span<const VideoClip> clips, int block,
                         std::span<const std::vector<int>> lengths_before,
                         const ScorerBackend& backend, MetricKind metric,
                         std::span<const int> grid, const CodecOracle& codec,
                         int first_sample) {
  Require(backend.kind != ScoreSource::kFile, ErrorCode::kInvalidArgument,
          "file scores are loaded, not predicted");
  Require(backend.noise >= 0.0 && std::isfinite(backend.noise), ErrorCode::kInvalidArgument,
          "noise level must be a finite value >= 0");
  Require(lengths_before.size() == clips.size(), ErrorCode::kDimensionMismatch,
          "one preceding-length vector per clip required");
  ScoreSlice slice;
  slice.block = block;
  slice.grid.assign(grid.begin(), grid.end());
  slice.metric = metric;
  slice.source = backend.kind;
  slice.rows.reserve(clips.size());
  for (std::size_t k = 0; k < clips.size(); ++k) {
    ScorerProbe probe{block, lengths_before[k], slice.grid, metric};
    std::vector<double> row = GroundTruthScores(clips[k], probe, codec);
    if (backend.kind == ScoreSource::kNoisy && backend.noise > 0.0) {
      const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
      const double sd = backend.noise * (*hi - *lo);
      if (sd > 0.0) {
        Rng rng = MakeRng(backend.seed, "scorer-noise",
                          {static_cast<uint64_t>(first_sample) + k,
                           static_cast<uint64_t>(block)});
        std::normal_distribution<double> normal(0.0, sd);
        for (double& s : row) s += normal(rng);
      }
    }
    slice.rows.push_back(std::move(row));
  }
  return slice;
}

ScoreTable::ScoreTable(int samples, int blocks, std::vector<int> grid, MetricKind metric,
                       ScoreSource source)
    : samples_(samples), blocks_(blocks), grid_(std::move(grid)), metric_(metric),
      source_(source) {
  Require(samples >= 0 && blocks >= 1 && !grid_.empty(), ErrorCode::kInvalidArgument,
          "score table needs blocks >= 1 and a non-empty grid");
  scores_.assign(static_cast<std::size_t>(samples) * blocks * grid_.size(), 0.0);
}

std::size_t ScoreTable::offset(int sample, int block, int candidate) const {
  Require(sample >= 0 && sample < samples_ && block >= 0 && block < blocks_ &&
              candidate >= 0 && candidate < static_cast<int>(grid_.size()),
          ErrorCode::kOutOfRange, "score table index out of range");
  return (static_cast<std::size_t>(sample) * blocks_ + block) * grid_.size() + candidate;
}

double& ScoreTable::at(int sample, int block, int candidate) {
  return scores_[offset(sample, block, candidate)];
}

double ScoreTable::at(int sample, int block, int candidate) const {
  return scores_[offset(sample, block, candidate)];
}

void ScoreTable::SetSlice(const ScoreSlice& slice) {
  Require(slice.grid == grid_ && static_cast<int>(slice.rows.size()) == samples_,
          ErrorCode::kDimensionMismatch, "slice does not match the table");
  for (int s = 0; s < samples_; ++s)
    for (std::size_t j = 0; j < grid_.size(); ++j)
      at(s, slice.block, static_cast<int>(j)) = slice.rows[static_cast<std::size_t>(s)][j];
}

ScoreSlice ScoreTable::Slice(int block) const {
  ScoreSlice slice{block, grid_, metric_, source_, {}};
  for (int s = 0; s < samples_; ++s) {
    std::vector<double> row;
    for (std::size_t j = 0; j < grid_.size(); ++j)
      row.push_back(at(s, block, static_cast<int>(j)));
    slice.rows.push_back(std::move(row));
  }
  return slice;
}

double ScoreLoss(const ScoreTable& predicted, const ScoreTable& truth) {
  Require(predicted.samples() == truth.samples() && predicted.blocks() == truth.blocks() &&
              predicted.grid() == truth.grid(),
          ErrorCode::kDimensionMismatch, "score tables differ in shape or grid");
  double sum = 0.0;
  long count = 0;
  for (int s = 0; s < truth.samples(); ++s)
    for (int b = 0; b < truth.blocks(); ++b)
      for (int j = 0; j < static_cast<int>(truth.grid().size()); ++j) {
        const double d = predicted.at(s, b, j) - truth.at(s, b, j);
        sum += d * d;
        ++count;
      }
  Require(count > 0, ErrorCode::kInvalidArgument, "empty score tables");
  return sum / static_cast<double>(count);
}

void WriteScoreCsv(std::ostream& out, const ScoreTable& table) {
  out << "sample,block,candidate,score\n";
  char buf[64];
  for (int s = 0; s < table.samples(); ++s)
    for (int b = 0; b < table.blocks(); ++b)
      for (std::size_t j = 0; j < table.grid().size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", table.at(s, b, static_cast<int>(j)));
        out << s << ',' << b << ',' << table.grid()[j] << ',' << buf << '\n';
      }
}

ScoreTable ReadScoreCsv(std::istream& in, MetricKind metric) {
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kFormat, "empty score CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Require(line == "sample,block,candidate,score", ErrorCode::kFormat,
          "score CSV header must be 'sample,block,candidate,score'");
  std::map<std::tuple<int, int, int>, double> cells;
  int max_sample = -1, max_block = -1;
  std::vector<int> grid;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    int s, b, c;
    double v;
    char c1, c2, c3;
    Require(static_cast<bool>(ls >> s >> c1 >> b >> c2 >> c >> c3 >> v) && c1 == ',' &&
                c2 == ',' && c3 == ',' && s >= 0 && b >= 0 && std::isfinite(v),
            ErrorCode::kFormat, "bad score CSV line " + std::to_string(line_no));
    Require(cells.emplace(std::make_tuple(s, b, c), v).second, ErrorCode::kFormat,
            "duplicate score CSV entry on line " + std::to_string(line_no));
    max_sample = std::max(max_sample, s);
    max_block = std::max(max_block, b);
    grid.push_back(c);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  Require(max_sample >= 0, ErrorCode::kFormat, "score CSV has no rows");
  ScoreTable table(max_sample + 1, max_block + 1, grid, metric, ScoreSource::kFile);
  Require(cells.size() == static_cast<std::size_t>(table.samples()) * table.blocks() *
                              grid.size(),
          ErrorCode::kFormat, "score CSV is not a complete samples x blocks x grid table");
  for (const auto& [key, v] : cells) {
    const auto [s, b, c] = key;
    const int j = static_cast<int>(std::lower_bound(grid.begin(), grid.end(), c) - grid.begin());
    table.at(s, b, j) = v;
  }
  return table;
}

}  // namespace causaltok
