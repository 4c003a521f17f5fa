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

#include "causaltok/seqpack.h"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "causaltok/error.h"

namespace causaltok {
namespace {

TEST(SeqpackTest, EmptyBlocksAreBareMarkers) {
  const Vocabulary v;
  const PackedSequence seq = Pack({{}, {}}, v, 4);
  EXPECT_EQ(seq.ids, (std::vector<int>{8192, 8192}));
  EXPECT_EQ(seq.eob_id(), 8192);
}

TEST(SeqpackTest, PacksBlocksWithMarkers) {
  const PackedSequence seq = Pack({{5}, {7, 9}}, Vocabulary{}, 4);
  EXPECT_EQ(seq.ids, (std::vector<int>{5, 8192, 7, 9, 8192}));
  EXPECT_EQ(Unpack(seq, 2), (std::vector<std::vector<int>>{{5}, {7, 9}}));
}

TEST(SeqpackTest, ConditionPrefix) {
  const Vocabulary v{16, 3};
  EXPECT_EQ(v.size(), 20);
  const std::vector<int> cond = {17, 19};
  const PackedSequence seq = Pack({{1, 2}}, v, 4, cond);
  EXPECT_EQ(seq.condition_length, 2);
  EXPECT_EQ(seq.ids, (std::vector<int>{17, 19, 1, 2, 16}));
  EXPECT_EQ(Unpack(seq, 1), (std::vector<std::vector<int>>{{1, 2}}));
  const std::vector<int> marker = {16};
  EXPECT_THROW(Pack({{1}}, v, 4, marker), Error);
}

TEST(SeqpackTest, RejectsBadInput) {
  const Vocabulary v{16, 0};
  EXPECT_THROW(Pack({{16}}, v, 4), Error);      // marker inside a block
  EXPECT_THROW(Pack({{-1}}, v, 4), Error);
  EXPECT_THROW(Pack({{1, 2, 3}}, v, 2), Error);  // too long
  try {
    Pack({{99}}, v, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
}

TEST(SeqpackTest, UnpackRequiresExactMarkerCount) {
  const PackedSequence seq = Pack({{1}, {2}, {3}}, Vocabulary{16, 0}, 4);
  try {
    Unpack(seq, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  EXPECT_THROW(Unpack(seq, 2), Error);
  PackedSequence trailing = seq;
  trailing.ids.push_back(4);
  EXPECT_THROW(Unpack(trailing, 3), Error);
}

TEST(SeqpackTest, RandomRoundTrip) {
  std::mt19937_64 rng(1);
  const Vocabulary v{64, 2};
  std::uniform_int_distribution<int> len(0, 6), code(0, 63), nblocks(1, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<int>> blocks(nblocks(rng));
    for (auto& b : blocks) {
      b.resize(len(rng));
      for (int& id : b) id = code(rng);
    }
    const PackedSequence seq = Pack(blocks, v, 6);
    EXPECT_EQ(Unpack(seq, static_cast<int>(blocks.size())), blocks);
  }
}

TEST(SeqpackTest, UniformModelGivesLogVocab) {
  const Vocabulary v{100, 0};
  const PackedSequence seq = Pack({{1, 2, 3}, {4}, {}}, v, 8);
  const TokenModel uniform = [&](std::span<const int>) {
    return std::vector<double>(static_cast<std::size_t>(v.size()), 1.0 / v.size());
  };
  EXPECT_EQ(NegativeLogLikelihood(seq, uniform), -std::log(1.0 / v.size()));
}

TEST(SeqpackTest, OracleModelGivesZero) {
  const Vocabulary v{8, 1};
  const std::vector<int> cond = {9};
  const PackedSequence seq = Pack({{1, 2}, {7}}, v, 4, cond);
  const TokenModel oracle = [&](std::span<const int> prefix) {
    std::vector<double> d(static_cast<std::size_t>(v.size()), 0.0);
    d[static_cast<std::size_t>(seq.ids[prefix.size()])] = 1.0;
    return d;
  };
  EXPECT_EQ(NegativeLogLikelihood(seq, oracle), 0.0);
}

TEST(SeqpackTest, BigramHandComputed) {
  // Codes {0, 1}, marker 2. Sequence 0 1 | 1 |  ->  0 1 2 1 2.
  const Vocabulary v{2, 0};
  const PackedSequence seq = Pack({{0, 1}, {1}}, v, 2);
  BigramModel model(v.size());
  model.Fit(seq.ids);
  EXPECT_DOUBLE_EQ(model.Probability(-1, 0), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(model.Probability(0, 1), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(model.Probability(1, 2), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(model.Probability(2, 1), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(model.Probability(2, 0), 1.0 / 4.0);
  const double expected =
      (3 * std::log(2.0) + 2 * std::log(5.0 / 3.0)) / 5.0;
  EXPECT_NEAR(NegativeLogLikelihood(seq, model.AsModel()), expected, 1e-12);
}

TEST(SeqpackTest, BigramDistributionSumsToOne) {
  BigramModel model(5);
  const std::vector<int> data = {0, 1, 1, 4, 2, 0};
  model.Fit(data);
  for (int prev = -1; prev < 5; ++prev) {
    std::vector<int> prefix;
    if (prev >= 0) prefix.push_back(prev);
    double sum = 0.0;
    for (double p : model.Distribution(prefix)) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_THROW(model.Fit(std::vector<int>{5}), Error);
}

TEST(SeqpackTest, RejectsInvalidDistributions) {
  const Vocabulary v{4, 0};
  const PackedSequence seq = Pack({{1}}, v, 2);
  const TokenModel short_model = [](std::span<const int>) { return std::vector<double>(3, 1.0 / 3); };
  const TokenModel unnormalized = [](std::span<const int>) { return std::vector<double>(5, 0.3); };
  const TokenModel negative = [](std::span<const int>) {
    return std::vector<double>{-0.2, 0.6, 0.2, 0.2, 0.2};
  };
  for (const TokenModel& m : {short_model, unnormalized, negative}) {
    try {
      NegativeLogLikelihood(seq, m);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
}

TEST(SeqpackTest, NllIsTokenWeightedMeanOfParts) {
  // A model that ignores the prefix makes per-token losses independent, so
  // the NLL of a concatenation is the length-weighted mean of its halves.
  const Vocabulary v{6, 0};
  const std::vector<double> probs = {0.05, 0.1, 0.15, 0.2, 0.2, 0.25, 0.05};
  const TokenModel fixed = [&](std::span<const int>) { return probs; };
  const PackedSequence a = Pack({{0, 1, 2}}, v, 4);
  const PackedSequence b = Pack({{3}, {4, 5}}, v, 4);
  const PackedSequence ab = Pack({{0, 1, 2}, {3}, {4, 5}}, v, 4);
  const double na = a.ids.size(), nb = b.ids.size();
  EXPECT_NEAR(NegativeLogLikelihood(ab, fixed),
              (na * NegativeLogLikelihood(a, fixed) + nb * NegativeLogLikelihood(b, fixed)) /
                  (na + nb),
              1e-12);
}

TEST(SeqpackTest, TextRoundTrip) {
  const Vocabulary v{32, 2};
  const std::vector<int> cond = {33};
  const std::vector<PackedSequence> seqs = {Pack({{1, 2}, {}}, v, 4, cond),
                                            Pack({{31}}, v, 4)};
  std::stringstream ss;
  WritePacked(ss, seqs);
  EXPECT_EQ(ss.str().substr(0, 4), "#33 ");
  const auto back = ReadPacked(ss, v);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].ids, seqs[i].ids);
    EXPECT_EQ(back[i].condition_length, seqs[i].condition_length);
  }
  std::istringstream bad("1 #33 32\n");
  EXPECT_THROW(ReadPacked(bad, v), Error);
  std::istringstream junk("1 x 32\n");
  EXPECT_THROW(ReadPacked(junk, v), Error);
}

}  // namespace
}  // namespace causaltok
