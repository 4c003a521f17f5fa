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

#ifndef CAUSALTOK_METRICS_H_
#define CAUSALTOK_METRICS_H_

#include <string_view>

#include "causaltok/video.h"

namespace causaltok {

enum class MetricKind { kMse, kPsnr, kSsim, kPerceptualProxy };

// Stable names used in every CSV/JSON output: "mse", "psnr", "ssim", "pproxy".
const char* MetricName(MetricKind kind);
MetricKind ParseMetric(std::string_view name);

// MSE and the perceptual proxy are lower-is-better; PSNR and SSIM are not.
bool LowerIsBetter(MetricKind kind);

double Mse(const VideoClip& a, const VideoClip& b);

// 10 log10(peak^2 / MSE); +infinity when the clips are identical.
double Psnr(const VideoClip& a, const VideoClip& b, double peak = 1.0);
double PsnrFromMse(double mse, double peak = 1.0);

// Single-scale SSIM with uniform 8x8 windows (every offset), k1 = 0.01,
// k2 = 0.03, dynamic range 1; averaged over windows, channels and frames.
double Ssim(const VideoClip& a, const VideoClip& b);

// Mean over frames of 0.5 * MSE(forward-difference gradients) +
// 0.5 * MSE(4x4 block means). A deterministic stand-in for a learned
// perceptual distance; its values are not comparable to LPIPS.
double PerceptualProxy(const VideoClip& a, const VideoClip& b);

double Evaluate(MetricKind kind, const VideoClip& reference, const VideoClip& test);

// PSNR at or above this is treated as this value when turned into a score.
inline constexpr double kPsnrScoreCap = 100.0;

// Lower-is-better score: the value itself, or its negation for PSNR and SSIM.
double ToScore(MetricKind kind, double value);

}  // namespace causaltok

#endif  // CAUSALTOK_METRICS_H_
