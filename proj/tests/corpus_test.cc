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

#include "causaltok/corpus.h"

#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "causaltok/error.h"
#include "test_util.h"

namespace causaltok {
namespace {

using testing::TempDir;

double FrameStep(const VideoClip& clip, int t) {
  double sum = 0.0;
  for (int y = 0; y < clip.height(); ++y)
    for (int x = 0; x < clip.width(); ++x)
      for (int c = 0; c < clip.channels(); ++c) {
        const double d = clip.at(t, y, x, c) - clip.at(t - 1, y, x, c);
        sum += d * d;
      }
  return sum / (clip.height() * clip.width() * clip.channels());
}

CorpusSpec Only(SceneKind kind) {
  CorpusSpec spec;
  spec.n_clips = 4;
  spec.weights.assign(4, 0.0);
  spec.weights[static_cast<int>(kind)] = 1.0;
  return spec;
}

TEST(CorpusTest, SceneNamesRoundTrip) {
  for (SceneKind k : {SceneKind::kStatic, SceneKind::kDriftingGradient, SceneKind::kMovingShapes,
                      SceneKind::kSceneCut})
    EXPECT_EQ(ParseSceneKind(SceneKindName(k)), k);
  EXPECT_THROW(ParseSceneKind("explosion"), Error);
}

TEST(CorpusTest, StaticSceneHasConstantFrames) {
  const CorpusSpec spec = Only(SceneKind::kStatic);
  for (int i = 0; i < spec.n_clips; ++i) {
    EXPECT_EQ(SceneKindOf(spec, i), SceneKind::kStatic);
    const VideoClip clip = GenerateClip(spec, i);
    for (int t = 1; t < clip.frames(); ++t) EXPECT_EQ(FrameStep(clip, t), 0.0);
  }
}

TEST(CorpusTest, MovingSceneChangesBetweenFrames) {
  const CorpusSpec spec = Only(SceneKind::kMovingShapes);
  const VideoClip clip = GenerateClip(spec, 0);
  double motion = 0.0;
  for (int t = 1; t < clip.frames(); ++t) motion += FrameStep(clip, t);
  EXPECT_GT(motion, 0.0);
}

TEST(CorpusTest, SceneCutJumpsAtTheCut) {
  CorpusSpec spec = Only(SceneKind::kSceneCut);
  spec.cut_position = 9;
  const VideoClip clip = GenerateClip(spec, 1);
  double largest = 0.0;
  int where = -1;
  for (int t = 1; t < clip.frames(); ++t) {
    if (FrameStep(clip, t) > largest) {
      largest = FrameStep(clip, t);
      where = t;
    }
  }
  EXPECT_EQ(where, 9);
}

TEST(CorpusTest, SamplesStayInUnitRange) {
  CorpusSpec spec;
  spec.n_clips = 8;
  for (const VideoClip& clip : GenerateCorpus(spec)) {
    EXPECT_EQ(clip.dims(), spec.dims);
    EXPECT_NO_THROW(clip.validate_range());
  }
}

TEST(CorpusTest, ClipDependsOnlyOnSpecAndIndex) {
  CorpusSpec spec;
  spec.n_clips = 6;
  const auto all = GenerateCorpus(spec);
  EXPECT_EQ(GenerateClip(spec, 4).data(), all[4].data());
  spec.seed = 1;
  EXPECT_NE(GenerateClip(spec, 4).data(), all[4].data());
}

TEST(CorpusTest, SameSeedWritesIdenticalFiles) {
  CorpusSpec spec;
  spec.n_clips = 3;
  TempDir a("corpus_a"), b("corpus_b");
  const auto pa = WriteCorpus(a.path(), GenerateCorpus(spec));
  const auto pb = WriteCorpus(b.path(), GenerateCorpus(spec));
  ASSERT_EQ(pa.size(), 3u);
  EXPECT_EQ(pa[2].filename(), ClipFileName(2));
  EXPECT_EQ(ClipFileName(12), "clip_0012.atv");
  for (std::size_t i = 0; i < pa.size(); ++i) {
    std::ifstream fa(pa[i], std::ios::binary), fb(pb[i], std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, sb);
  }
}

TEST(CorpusTest, LoadReturnsWhatWasWritten) {
  CorpusSpec spec;
  spec.n_clips = 3;
  const auto clips = GenerateCorpus(spec);
  TempDir dir("corpus_load");
  WriteCorpus(dir.path(), clips);
  const auto back = LoadCorpus(dir.path());
  ASSERT_EQ(back.size(), clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) EXPECT_EQ(back[i].data(), clips[i].data());
}

TEST(CorpusTest, LoadFromEmptyDirectoryFails) {
  TempDir dir("corpus_empty");
  try {
    LoadCorpus(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(CorpusTest, ValidateRejectsBadSpecs) {
  CorpusSpec spec;
  spec.n_clips = 0;
  EXPECT_THROW(spec.validate(), Error);
  spec = CorpusSpec{};
  spec.weights = {0, 0, 0, 0};
  EXPECT_THROW(spec.validate(), Error);
  spec = CorpusSpec{};
  spec.weights = {1, -1, 1, 1};
  EXPECT_THROW(spec.validate(), Error);
  spec = CorpusSpec{};
  spec.cut_position = 16;
  EXPECT_THROW(spec.validate(), Error);
}

}  // namespace
}  // namespace causaltok
