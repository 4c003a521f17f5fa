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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "causaltok/error.h"
#include "test_util.h"

namespace causaltok {
namespace {

using testing::RandomClip;

TEST(PatchifyTest, FullScaleGridHas1024Patches) {
  PatchConfig cfg;  // 4x8x8, K = 4
  EXPECT_EQ(cfg.num_patches({16, 128, 128, 3}), 1024);
}

TEST(PatchifyTest, SinglePatchIsTheWholeClip) {
  PatchConfig cfg{4, 8, 1, 16};
  const VideoClip clip = RandomClip({4, 8, 8, 1}, 1);
  const PatchSequence seq = Patchify(clip, cfg);
  ASSERT_EQ(seq.patches.rows(), 1);
  ASSERT_EQ(seq.patches.cols(), 256);
  for (int i = 0; i < 256; ++i) EXPECT_EQ(seq.patches(0, i), clip.data()[i]);
}

TEST(PatchifyTest, RowMatchesSubBlockByIndexArithmetic) {
  // T=8, H=W=16, t=4, p=8: two time chunks of 2x2 cells. Row 3 is chunk 0,
  // cell (1, 1).
  PatchConfig cfg{4, 8, 2, 8};
  const ClipDims dims{8, 16, 16, 2};
  const VideoClip clip = RandomClip(dims, 2);
  const PatchSequence seq = Patchify(clip, cfg);
  ASSERT_EQ(seq.patches.rows(), 8);
  EXPECT_EQ(seq.order[3], (PatchCoord{0, 1, 1}));
  int col = 0;
  for (int dt = 0; dt < 4; ++dt)
    for (int dy = 0; dy < 8; ++dy)
      for (int dx = 0; dx < 8; ++dx)
        for (int c = 0; c < 2; ++c)
          EXPECT_EQ(seq.patches(3, col++), clip.at(dt, 8 + dy, 8 + dx, c));
}

TEST(PatchifyTest, RoundTripIsExact) {
  PatchConfig cfg{2, 4, 2, 8};
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const ClipDims dims{8, 12, 16, 3};
    const VideoClip clip = RandomClip(dims, seed);
    const VideoClip back = Unpatchify(Patchify(clip, cfg), cfg, dims);
    EXPECT_EQ(back.data(), clip.data());
  }
}

TEST(PatchifyTest, ZeroPatchesGiveZeroClip) {
  PatchConfig cfg{2, 4, 2, 8};
  const ClipDims dims{4, 8, 8, 1};
  PatchSequence seq;
  seq.patches = RowMatrix::Zero(cfg.num_patches(dims), cfg.embed_dim(1));
  seq.order = CanonicalOrder(cfg, dims);
  const VideoClip clip = Unpatchify(seq, cfg, dims);
  EXPECT_TRUE(std::all_of(clip.data().begin(), clip.data().end(),
                          [](double v) { return v == 0.0; }));
}

TEST(PatchifyTest, PermutedRowsWithOrderMapRoundTrip) {
  PatchConfig cfg{2, 4, 2, 8};
  const ClipDims dims{4, 8, 12, 1};
  const VideoClip clip = RandomClip(dims, 3);
  const PatchSequence seq = Patchify(clip, cfg);
  std::vector<int> perm(seq.order.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::shuffle(perm.begin(), perm.end(), Rng(9));
  PatchSequence shuffled;
  shuffled.patches.resize(seq.patches.rows(), seq.patches.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.patches.row(static_cast<Eigen::Index>(i)) = seq.patches.row(perm[i]);
    shuffled.order.push_back(seq.order[static_cast<std::size_t>(perm[i])]);
  }
  // Brute-force walk: every pixel lands where its patch coordinate says.
  VideoClip walk(dims);
  for (std::size_t i = 0; i < shuffled.order.size(); ++i) {
    const PatchCoord pc = shuffled.order[i];
    int col = 0;
    for (int dt = 0; dt < 2; ++dt)
      for (int dy = 0; dy < 4; ++dy)
        for (int dx = 0; dx < 4; ++dx)
          walk.at(pc.chunk * 2 + dt, pc.row * 4 + dy, pc.col * 4 + dx) =
              shuffled.patches(static_cast<Eigen::Index>(i), col++);
  }
  EXPECT_EQ(Unpatchify(shuffled, cfg, dims).data(), walk.data());
  EXPECT_EQ(walk.data(), clip.data());
}

TEST(PatchifyTest, DuplicateOrderEntryIsRejected) {
  PatchConfig cfg{2, 4, 2, 8};
  const ClipDims dims{4, 8, 8, 1};
  PatchSequence seq = Patchify(RandomClip(dims, 4), cfg);
  seq.order[1] = seq.order[0];
  EXPECT_THROW(Unpatchify(seq, cfg, dims), Error);
}

TEST(PatchifyTest, DivisibilityFailuresAreDimensionErrors) {
  PatchConfig cfg{4, 8, 4, 32};
  try {
    Patchify(VideoClip({16, 30, 32, 1}), cfg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  // 3 time chunks cannot split into 4 blocks.
  EXPECT_THROW(Patchify(VideoClip({12, 32, 32, 1}), cfg), Error);
}

TEST(PatchifyTest, BlockOfBoundaries) {
  PatchConfig cfg{4, 8, 4, 512};
  EXPECT_EQ(BlockOf(0, cfg, 1024), 0);
  EXPECT_EQ(BlockOf(255, cfg, 1024), 0);
  EXPECT_EQ(BlockOf(256, cfg, 1024), 1);
  PatchConfig two{4, 8, 2, 8};
  EXPECT_EQ(BlockOf(5, two, 8), 1);
  EXPECT_THROW(BlockOf(8, two, 8), Error);
  EXPECT_THROW(BlockOf(-1, two, 8), Error);
}

TEST(PatchifyTest, BlockOfIsMonotoneAndBalanced) {
  PatchConfig cfg{4, 8, 4, 512};
  std::vector<int> count(4, 0);
  int prev = 0;
  for (int i = 0; i < 1024; ++i) {
    const int b = BlockOf(i, cfg, 1024);
    EXPECT_GE(b, prev);
    prev = b;
    ++count[static_cast<std::size_t>(b)];
  }
  for (int c : count) EXPECT_EQ(c, 256);
}

TEST(PatchifyTest, OnePixelChangesOneRow) {
  PatchConfig cfg{2, 4, 2, 8};
  const ClipDims dims{4, 8, 8, 1};
  VideoClip clip = RandomClip(dims, 5);
  const PatchSequence before = Patchify(clip, cfg);
  clip.at(3, 5, 2) += 0.25;
  const PatchSequence after = Patchify(clip, cfg);
  int changed = 0;
  for (Eigen::Index r = 0; r < before.patches.rows(); ++r)
    changed += before.patches.row(r) != after.patches.row(r);
  EXPECT_EQ(changed, 1);
}

}  // namespace
}  // namespace causaltok
