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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "causaltok/error.h"

namespace causaltok {

namespace {

constexpr int kSsimWindow = 8;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;
constexpr int kProxyBlock = 4;

// Summed-area table with a zero guard row/column.
class BoxSums {
 public:
  BoxSums(int h, int w) : w_(w + 1), t_(static_cast<std::size_t>(h + 1) * (w + 1), 0.0) {}

  template <typename Fn>
  void fill(int h, int w, Fn&& value) {
    for (int y = 0; y < h; ++y) {
      double row = 0.0;
      for (int x = 0; x < w; ++x) {
        row += value(y, x);
        at(y + 1, x + 1) = at(y, x + 1) + row;
      }
    }
  }

  double box(int y, int x, int size) const {
    return at(y + size, x + size) - at(y, x + size) - at(y + size, x) + at(y, x);
  }

 private:
  double& at(int y, int x) { return t_[static_cast<std::size_t>(y) * w_ + x]; }
  double at(int y, int x) const { return t_[static_cast<std::size_t>(y) * w_ + x]; }

  int w_;
  std::vector<double> t_;
};

double SsimPlane(const VideoClip& a, const VideoClip& b, int t, int c) {
  const int h = a.height(), w = a.width();
  BoxSums sa(h, w), sb(h, w), saa(h, w), sbb(h, w), sab(h, w);
  sa.fill(h, w, [&](int y, int x) { return a.at(t, y, x, c); });
  sb.fill(h, w, [&](int y, int x) { return b.at(t, y, x, c); });
  saa.fill(h, w, [&](int y, int x) { return a.at(t, y, x, c) * a.at(t, y, x, c); });
  sbb.fill(h, w, [&](int y, int x) { return b.at(t, y, x, c) * b.at(t, y, x, c); });
  sab.fill(h, w, [&](int y, int x) { return a.at(t, y, x, c) * b.at(t, y, x, c); });
  const double n = kSsimWindow * kSsimWindow;
  double total = 0.0;
  int windows = 0;
  for (int y = 0; y + kSsimWindow <= h; ++y) {
    for (int x = 0; x + kSsimWindow <= w; ++x) {
      const double ma = sa.box(y, x, kSsimWindow) / n;
      const double mb = sb.box(y, x, kSsimWindow) / n;
      const double va = saa.box(y, x, kSsimWindow) / n - ma * ma;
      const double vb = sbb.box(y, x, kSsimWindow) / n - mb * mb;
      const double cov = sab.box(y, x, kSsimWindow) / n - ma * mb;
      total += ((2 * ma * mb + kSsimC1) * (2 * cov + kSsimC2)) /
               ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
      ++windows;
    }
  }
  return total / windows;
}

}  // namespace

const char* MetricName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kMse: return "mse";
    case MetricKind::kPsnr: return "psnr";
    case MetricKind::kSsim: return "ssim";
    case MetricKind::kPerceptualProxy: return "pproxy";
  }
  return "?";
}

MetricKind ParseMetric(std::string_view name) {
  if (name == "mse") return MetricKind::kMse;
  if (name == "psnr") return MetricKind::kPsnr;
  if (name == "ssim") return MetricKind::kSsim;
  if (name == "pproxy") return MetricKind::kPerceptualProxy;
  Fail(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

bool LowerIsBetter(MetricKind kind) {
  return kind == MetricKind::kMse || kind == MetricKind::kPerceptualProxy;
}

double Mse(const VideoClip& a, const VideoClip& b) {
  RequireSameDims(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.data().size());
}

double PsnrFromMse(double mse, double peak) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double Psnr(const VideoClip& a, const VideoClip& b, double peak) {
  return PsnrFromMse(Mse(a, b), peak);
}

double Ssim(const VideoClip& a, const VideoClip& b) {
  RequireSameDims(a, b);
  Require(a.height() >= kSsimWindow && a.width() >= kSsimWindow,
          ErrorCode::kDimensionMismatch, "SSIM needs frames of at least 8x8");
  double total = 0.0;
  for (int t = 0; t < a.frames(); ++t)
    for (int c = 0; c < a.channels(); ++c) total += SsimPlane(a, b, t, c);
  return total / (a.frames() * a.channels());
}

double PerceptualProxy(const VideoClip& a, const VideoClip& b) {
  RequireSameDims(a, b);
  const int h = a.height(), w = a.width(), ch = a.channels();
  Require(h >= kProxyBlock && w >= kProxyBlock, ErrorCode::kDimensionMismatch,
          "perceptual proxy needs frames of at least 4x4");
  const int by = h / kProxyBlock, bx = w / kProxyBlock;
  double total = 0.0;
  for (int t = 0; t < a.frames(); ++t) {
    double grad = 0.0;
    long grad_count = 0;
    double block = 0.0;
    for (int c = 0; c < ch; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (x + 1 < w) {
            const double d = (a.at(t, y, x + 1, c) - a.at(t, y, x, c)) -
                             (b.at(t, y, x + 1, c) - b.at(t, y, x, c));
            grad += d * d;
            ++grad_count;
          }
          if (y + 1 < h) {
            const double d = (a.at(t, y + 1, x, c) - a.at(t, y, x, c)) -
                             (b.at(t, y + 1, x, c) - b.at(t, y, x, c));
            grad += d * d;
            ++grad_count;
          }
        }
      }
      for (int j = 0; j < by; ++j) {
        for (int i = 0; i < bx; ++i) {
          double sa = 0.0, sb = 0.0;
          for (int y = 0; y < kProxyBlock; ++y)
            for (int x = 0; x < kProxyBlock; ++x) {
              sa += a.at(t, j * kProxyBlock + y, i * kProxyBlock + x, c);
              sb += b.at(t, j * kProxyBlock + y, i * kProxyBlock + x, c);
            }
          const double d = (sa - sb) / (kProxyBlock * kProxyBlock);
          block += d * d;
        }
      }
    }
    total += 0.5 * grad / static_cast<double>(grad_count) +
             0.5 * block / static_cast<double>(by * bx * ch);
  }
  return total / a.frames();
}

double Evaluate(MetricKind kind, const VideoClip& reference, const VideoClip& test) {
  switch (kind) {
    case MetricKind::kMse: return Mse(reference, test);
    case MetricKind::kPsnr: return Psnr(reference, test);
    case MetricKind::kSsim: return Ssim(reference, test);
    case MetricKind::kPerceptualProxy: return PerceptualProxy(reference, test);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown metric kind");
}

double ToScore(MetricKind kind, double value) {
  switch (kind) {
    case MetricKind::kPsnr: return -std::min(value, kPsnrScoreCap);
    case MetricKind::kSsim: return -value;
    default: return value;
  }
}

}  // namespace causaltok
