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

#include "causaltok/metrics.h"

#include <cmath>

#include <gtest/gtest.h>

#include "causaltok/error.h"
#include "test_util.h"

namespace causaltok {
namespace {

using testing::RandomClip;

double NaiveMse(const VideoClip& a, const VideoClip& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.data().size());
}

// Direct window loops, no summed-area tables.
double NaiveSsim(const VideoClip& a, const VideoClip& b) {
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0;
  int planes = 0;
  for (int t = 0; t < a.frames(); ++t) {
    for (int c = 0; c < a.channels(); ++c, ++planes) {
      double plane = 0;
      int windows = 0;
      for (int y0 = 0; y0 + 8 <= a.height(); ++y0) {
        for (int x0 = 0; x0 + 8 <= a.width(); ++x0, ++windows) {
          double ma = 0, mb = 0;
          for (int y = y0; y < y0 + 8; ++y)
            for (int x = x0; x < x0 + 8; ++x) {
              ma += a.at(t, y, x, c);
              mb += b.at(t, y, x, c);
            }
          ma /= 64;
          mb /= 64;
          double va = 0, vb = 0, cov = 0;
          for (int y = y0; y < y0 + 8; ++y)
            for (int x = x0; x < x0 + 8; ++x) {
              const double da = a.at(t, y, x, c) - ma, db = b.at(t, y, x, c) - mb;
              va += da * da;
              vb += db * db;
              cov += da * db;
            }
          va /= 64;
          vb /= 64;
          cov /= 64;
          plane += (2 * ma * mb + c1) * (2 * cov + c2) /
                   ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
      }
      total += plane / windows;
    }
  }
  return total / planes;
}

// Two passes: build gradient and block-mean images, then take MSEs.
double NaiveProxy(const VideoClip& a, const VideoClip& b) {
  const int h = a.height(), w = a.width(), ch = a.channels();
  double total = 0;
  for (int t = 0; t < a.frames(); ++t) {
    std::vector<double> ga, gb, ma, mb;
    for (int c = 0; c < ch; ++c) {
      for (int y = 0; y < h; ++y)
        for (int x = 0; x + 1 < w; ++x) {
          ga.push_back(a.at(t, y, x + 1, c) - a.at(t, y, x, c));
          gb.push_back(b.at(t, y, x + 1, c) - b.at(t, y, x, c));
        }
      for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x < w; ++x) {
          ga.push_back(a.at(t, y + 1, x, c) - a.at(t, y, x, c));
          gb.push_back(b.at(t, y + 1, x, c) - b.at(t, y, x, c));
        }
      for (int y0 = 0; y0 + 4 <= h; y0 += 4)
        for (int x0 = 0; x0 + 4 <= w; x0 += 4) {
          double sa = 0, sb = 0;
          for (int y = y0; y < y0 + 4; ++y)
            for (int x = x0; x < x0 + 4; ++x) {
              sa += a.at(t, y, x, c);
              sb += b.at(t, y, x, c);
            }
          ma.push_back(sa / 16);
          mb.push_back(sb / 16);
        }
    }
    auto mse = [](const std::vector<double>& p, const std::vector<double>& q) {
      double s = 0;
      for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
      return s / static_cast<double>(p.size());
    };
    total += 0.5 * mse(ga, gb) + 0.5 * mse(ma, mb);
  }
  return total / a.frames();
}

TEST(MseTest, Examples) {
  const ClipDims d{2, 4, 4, 1};
  EXPECT_EQ(Mse(VideoClip(d, 0.2), VideoClip(d, 0.2)), 0.0);
  EXPECT_EQ(Mse(VideoClip(d, 1.0), VideoClip(d, 0.0)), 1.0);
  const VideoClip a = RandomClip(d, 1), b = RandomClip(d, 2);
  EXPECT_NEAR(Mse(a, b), NaiveMse(a, b), 1e-12);
  EXPECT_EQ(Mse(a, b), Mse(b, a));
  EXPECT_THROW(Mse(a, VideoClip({2, 4, 4, 3})), Error);
}

TEST(PsnrTest, Examples) {
  const ClipDims d{1, 10, 10, 1};
  VideoClip a(d, 0.5), b(d, 0.5);
  EXPECT_TRUE(std::isinf(Psnr(a, b)));
  for (double& v : b.data()) v += 0.1;  // MSE 0.01
  EXPECT_NEAR(Psnr(a, b), 20.0, 1e-9);
  const VideoClip x = RandomClip(d, 3), y = RandomClip(d, 4);
  EXPECT_NEAR(Psnr(x, y), 10 * std::log10(1.0 / NaiveMse(x, y)), 1e-12);
  EXPECT_NEAR(Psnr(x, y, 2.0), 10 * std::log10(4.0 / NaiveMse(x, y)), 1e-12);
  EXPECT_EQ(Psnr(x, y), Psnr(y, x));
}

TEST(SsimTest, IdenticalIsOne) {
  const VideoClip a = RandomClip({2, 12, 12, 2}, 5);
  EXPECT_NEAR(Ssim(a, a), 1.0, 1e-12);
  const ClipDims d{1, 8, 8, 1};
  EXPECT_NEAR(Ssim(VideoClip(d, 0.5), VideoClip(d, 0.5)), 1.0, 1e-12);
}

TEST(SsimTest, IndependentNoiseIsNearZero) {
  const ClipDims d{1, 64, 64, 1};
  EXPECT_LT(std::abs(Ssim(RandomClip(d, 6), RandomClip(d, 7))), 0.2);
}

TEST(SsimTest, MatchesDirectWindowLoops) {
  const ClipDims d{2, 11, 13, 2};
  const VideoClip a = RandomClip(d, 8), b = RandomClip(d, 9);
  EXPECT_NEAR(Ssim(a, b), NaiveSsim(a, b), 1e-12);
  EXPECT_NEAR(Ssim(a, b), Ssim(b, a), 1e-15);
  EXPECT_THROW(Ssim(VideoClip({1, 7, 8, 1}), VideoClip({1, 7, 8, 1})), Error);
}

TEST(ProxyTest, Examples) {
  const ClipDims d{3, 8, 12, 1};
  const VideoClip a = RandomClip(d, 10);
  EXPECT_EQ(PerceptualProxy(a, a), 0.0);
  VideoClip b = a;
  for (double& v : b.data()) v += 0.125;  // exact in binary
  EXPECT_NEAR(PerceptualProxy(a, b), 0.5 * 0.125 * 0.125, 1e-15);
  const VideoClip c = RandomClip(d, 11);
  EXPECT_NEAR(PerceptualProxy(a, c), NaiveProxy(a, c), 1e-12);
  EXPECT_NEAR(PerceptualProxy(a, c), PerceptualProxy(c, a), 1e-15);
  EXPECT_GT(PerceptualProxy(a, c), 0.0);
}

TEST(MetricKindTest, NamesAndOrientation) {
  for (MetricKind k : {MetricKind::kMse, MetricKind::kPsnr, MetricKind::kSsim,
                       MetricKind::kPerceptualProxy})
    EXPECT_EQ(ParseMetric(MetricName(k)), k);
  EXPECT_STREQ(MetricName(MetricKind::kPerceptualProxy), "pproxy");
  EXPECT_THROW(ParseMetric("lpips"), Error);
  EXPECT_TRUE(LowerIsBetter(MetricKind::kMse));
  EXPECT_TRUE(LowerIsBetter(MetricKind::kPerceptualProxy));
  EXPECT_FALSE(LowerIsBetter(MetricKind::kPsnr));
  EXPECT_FALSE(LowerIsBetter(MetricKind::kSsim));
}

TEST(MetricKindTest, ScoresAreLowerIsBetter) {
  const ClipDims d{1, 16, 16, 1};
  const VideoClip ref = RandomClip(d, 12);
  VideoClip close = ref, far = ref;
  for (std::size_t i = 0; i < ref.data().size(); ++i) {
    close.data()[i] += (i % 2 ? 0.01 : -0.01);
    far.data()[i] += (i % 3 ? 0.2 : -0.3);
  }
  for (MetricKind k : {MetricKind::kMse, MetricKind::kPsnr, MetricKind::kSsim,
                       MetricKind::kPerceptualProxy}) {
    EXPECT_LT(ToScore(k, Evaluate(k, ref, close)), ToScore(k, Evaluate(k, ref, far)))
        << MetricName(k);
  }
  EXPECT_EQ(ToScore(MetricKind::kPsnr, INFINITY), -kPsnrScoreCap);
}

}  // namespace
}  // namespace causaltok
