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

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "causaltok/error.h"
#include "test_util.h"

namespace causaltok {
namespace {

using testing::RandomClip;

class ScorerTest : public ::testing::Test {
 protected:
  PatchConfig cfg{2, 4, 4, 12};
  ClipDims dims{8, 8, 8, 1};
  CodecOracle codec{cfg, dims};
  std::vector<int> grid = CandidateGrid(0, 12);
};

TEST(CandidateGridTest, Examples) {
  EXPECT_EQ(CandidateGrid(2, 32).size(), 31u);
  EXPECT_EQ(CandidateGrid(2, 32, 5), (std::vector<int>{2, 7, 12, 17, 22, 27, 32}));
  EXPECT_EQ(CandidateGrid(4, 4), (std::vector<int>{4}));
  EXPECT_THROW(CandidateGrid(5, 4), Error);
}

TEST_F(ScorerTest, ConstantClipNeedsOnlyDc) {
  const VideoClip clip(dims, 0.6);
  const std::vector<double> s = GroundTruthScores(clip, {0, {}, grid, MetricKind::kMse}, codec);
  EXPECT_NEAR(s[0], 0.36, 1e-15);  // zeros against 0.6
  for (std::size_t j = 1; j < s.size(); ++j) EXPECT_NEAR(s[j], 0.0, 1e-25);
}

TEST_F(ScorerTest, BlockZeroMseIsTailEnergy) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const VideoClip clip = RandomClip(dims, seed);
    const std::vector<double> s = GroundTruthScores(clip, {0, {}, grid, MetricKind::kMse}, codec);
    const std::vector<double> spec = codec.transform().Forward(codec.BlockSamples(clip, 0));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double tail = 0;
      for (int r = grid[j]; r < codec.transform().size(); ++r) {
        const double c = spec[static_cast<std::size_t>(codec.transform().flat_index(r))];
        tail += c * c;
      }
      EXPECT_NEAR(s[j], tail / static_cast<double>(codec.block_samples()), 1e-9);
    }
  }
}

// The protocol spelled out: lengths (before, p, 0, ...) through encode and
// decode, metric on block q's frames.
TEST_F(ScorerTest, MatchesFullDecodeProtocol) {
  const VideoClip clip = RandomClip(dims, 11);
  for (MetricKind metric : {MetricKind::kMse, MetricKind::kPsnr, MetricKind::kSsim,
                            MetricKind::kPerceptualProxy}) {
    const ScorerProbe probe{2, {5, 9}, grid, metric};
    const std::vector<double> s = GroundTruthScores(clip, probe, codec);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const std::vector<int> lengths{5, 9, grid[j], 0};
      const VideoClip rec = codec.Decode(codec.Encode(clip, lengths), lengths).clip;
      const double want =
          ToScore(metric, Evaluate(metric, clip.frame_range(4, 2), rec.frame_range(4, 2)));
      EXPECT_NEAR(s[j], want, 1e-10) << MetricName(metric) << " p=" << grid[j];
    }
  }
}

TEST_F(ScorerTest, MseScoresNeverIncrease) {
  Rng rng(3);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const VideoClip clip = RandomClip(dims, 100 + seed);
    for (int q = 0; q < 4; ++q) {
      const ScorerProbe probe = SampleProbe(rng, q, grid, MetricKind::kMse, {6, 3, 1, 12});
      const std::vector<double> s = GroundTruthScores(clip, probe, codec);
      for (std::size_t j = 1; j < s.size(); ++j) EXPECT_LE(s[j], s[j - 1]);
      EXPECT_LE(s.back(), *std::min_element(s.begin(), s.end()));
    }
  }
}

TEST_F(ScorerTest, IgnoresContentAfterTargetBlock) {
  const VideoClip a = RandomClip(dims, 12);
  VideoClip b = a;
  for (int t = 6; t < 8; ++t)
    for (int y = 0; y < 8; ++y) b.at(t, y, 2) = 1.0 - b.at(t, y, 2);
  const ScorerProbe probe{2, {3, 12}, grid, MetricKind::kSsim};
  EXPECT_EQ(GroundTruthScores(a, probe, codec), GroundTruthScores(b, probe, codec));
}

TEST_F(ScorerTest, FullLengthLastBlockMatchesFullReconstruction) {
  const VideoClip clip = RandomClip(dims, 13);
  const ScorerProbe probe{3, {12, 12, 12}, {12}, MetricKind::kMse};
  const ReconstructionReport rec = codec.Decode(codec.Encode(clip), {}, &clip);
  EXPECT_NEAR(GroundTruthScores(clip, probe, codec)[0], rec.per_block_mse[3], 1e-12);
}

TEST_F(ScorerTest, ProbeValidation) {
  const VideoClip clip = RandomClip(dims, 14);
  EXPECT_THROW(GroundTruthScores(clip, {4, {1, 1, 1, 1}, grid, MetricKind::kMse}, codec), Error);
  EXPECT_THROW(GroundTruthScores(clip, {1, {}, grid, MetricKind::kMse}, codec), Error);
  EXPECT_THROW(GroundTruthScores(clip, {0, {}, {3, 2}, MetricKind::kMse}, codec), Error);
  EXPECT_THROW(GroundTruthScores(clip, {0, {}, {13}, MetricKind::kMse}, codec), Error);
}

TEST_F(ScorerTest, SampledProbeUsesSamplerBounds) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const ScorerProbe p = SampleProbe(rng, 3, grid, MetricKind::kMse, {6, 3, 2, 10});
    ASSERT_EQ(p.lengths_before.size(), 3u);
    for (int v : p.lengths_before) EXPECT_TRUE(v >= 2 && v <= 10);
  }
}

TEST_F(ScorerTest, NoiselessBackendEqualsExact) {
  const std::vector<VideoClip> clips{RandomClip(dims, 1), RandomClip(dims, 2)};
  const std::vector<std::vector<int>> before(2, std::vector<int>{4});
  const ScoreSlice exact =
      PredictScores(clips, 1, before, ScorerBackend::Exact(), MetricKind::kMse, grid, codec);
  const ScoreSlice noisy = PredictScores(clips, 1, before, ScorerBackend::Noisy(0.0, 99),
                                         MetricKind::kMse, grid, codec);
  EXPECT_EQ(exact.rows, noisy.rows);
}

TEST_F(ScorerTest, IdenticalClipsGiveIdenticalRows) {
  const VideoClip c = RandomClip(dims, 5);
  const std::vector<VideoClip> clips{c, c};
  const std::vector<std::vector<int>> before(2);
  const ScoreSlice s =
      PredictScores(clips, 0, before, ScorerBackend::Exact(), MetricKind::kPsnr, grid, codec);
  EXPECT_EQ(s.rows[0], s.rows[1]);
}

TEST_F(ScorerTest, NoiseMagnitudeIsHalfNormal) {
  const std::vector<VideoClip> clips{RandomClip(dims, 6)};
  const std::vector<std::vector<int>> before(1);
  const ScoreSlice exact =
      PredictScores(clips, 0, before, ScorerBackend::Exact(), MetricKind::kMse, grid, codec);
  const auto [lo, hi] = std::minmax_element(exact.rows[0].begin(), exact.rows[0].end());
  const double range = *hi - *lo;
  double dev = 0;
  long n = 0;
  for (uint64_t seed = 0; n < 10000; ++seed) {
    const ScoreSlice noisy = PredictScores(clips, 0, before, ScorerBackend::Noisy(0.1, seed),
                                           MetricKind::kMse, grid, codec);
    for (std::size_t j = 0; j < grid.size(); ++j, ++n)
      dev += std::abs(noisy.rows[0][j] - exact.rows[0][j]);
  }
  const double want = 0.1 * range * std::sqrt(2 / std::numbers::pi);
  EXPECT_NEAR(dev / n, want, 0.1 * want);
}

TEST_F(ScorerTest, NoiseIsSeededPerSample) {
  const VideoClip c = RandomClip(dims, 7);
  const std::vector<VideoClip> clips{c, c};
  const std::vector<std::vector<int>> before(2);
  const ScorerBackend backend = ScorerBackend::Noisy(0.2, 5);
  const ScoreSlice both = PredictScores(clips, 0, before, backend, MetricKind::kMse, grid, codec);
  EXPECT_NE(both.rows[0], both.rows[1]);
  const ScoreSlice second = PredictScores(std::span(clips).subspan(1), 0,
                                          std::span(before).subspan(1), backend,
                                          MetricKind::kMse, grid, codec, 1);
  EXPECT_EQ(second.rows[0], both.rows[1]);
  EXPECT_THROW(PredictScores(clips, 0, before, ScorerBackend::Noisy(-1, 0), MetricKind::kMse,
                             grid, codec),
               Error);
}

TEST(ScoreLossTest, Examples) {
  ScoreTable a(2, 3, {1, 2}, MetricKind::kMse, ScoreSource::kExact);
  Rng rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int s = 0; s < 2; ++s)
    for (int b = 0; b < 3; ++b)
      for (int j = 0; j < 2; ++j) a.at(s, b, j) = u(rng);
  EXPECT_EQ(ScoreLoss(a, a), 0.0);
  ScoreTable shifted = a, other = a;
  double naive = 0;
  for (int s = 0; s < 2; ++s)
    for (int b = 0; b < 3; ++b)
      for (int j = 0; j < 2; ++j) {
        shifted.at(s, b, j) += 0.5;
        other.at(s, b, j) = u(rng);
        naive += (other.at(s, b, j) - a.at(s, b, j)) * (other.at(s, b, j) - a.at(s, b, j));
      }
  EXPECT_NEAR(ScoreLoss(shifted, a), 0.25, 1e-15);
  EXPECT_NEAR(ScoreLoss(other, a), naive / 12, 1e-12);
  EXPECT_THROW(ScoreLoss(a, ScoreTable(2, 3, {1, 3}, MetricKind::kMse, ScoreSource::kExact)),
               Error);
}

TEST(ScoreTableTest, CsvRoundTripAndSlices) {
  ScoreTable t(3, 2, {2, 5, 9}, MetricKind::kMse, ScoreSource::kExact);
  for (int s = 0; s < 3; ++s)
    for (int b = 0; b < 2; ++b)
      for (int j = 0; j < 3; ++j) t.at(s, b, j) = 1.0 / (1 + s + 7 * b + 13 * j);
  std::stringstream ss;
  WriteScoreCsv(ss, t);
  const ScoreTable back = ReadScoreCsv(ss);
  EXPECT_EQ(back.grid(), t.grid());
  EXPECT_EQ(back.source(), ScoreSource::kFile);
  EXPECT_EQ(ScoreLoss(back, t), 0.0);
  const ScoreSlice slice = t.Slice(1);
  EXPECT_EQ(slice.rows[2][1], t.at(2, 1, 1));
  ScoreTable copy(3, 2, {2, 5, 9}, MetricKind::kMse, ScoreSource::kExact);
  copy.SetSlice(t.Slice(0));
  copy.SetSlice(t.Slice(1));
  EXPECT_EQ(ScoreLoss(copy, t), 0.0);

  std::stringstream missing("sample,block,candidate,score\n0,0,2,1.0\n0,0,5,1.0\n1,0,2,1.0\n");
  EXPECT_THROW(ReadScoreCsv(missing), Error);
  std::stringstream header("s,b,c,v\n");
  EXPECT_THROW(ReadScoreCsv(header), Error);
}

}  // namespace
}  // namespace causaltok
