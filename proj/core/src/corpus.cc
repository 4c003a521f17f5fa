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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "causaltok/error.h"

namespace causaltok {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Smooth random still: a couple of low-frequency cosine waves over a base
// level plus one soft blob.
std::vector<double> Still(const ClipDims& d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> img(d.frame_size());
  const double base = 0.3 + 0.4 * u(rng);
  struct Wave { double fx, fy, phase, amp; };
  Wave waves[2];
  for (Wave& w : waves) {
    w = {std::floor(1 + 3 * u(rng)), std::floor(1 + 3 * u(rng)), kTwoPi * u(rng),
         0.05 + 0.1 * u(rng)};
  }
  const double bx = d.width * u(rng), by = d.height * u(rng);
  const double br = 2.0 + 0.25 * d.width * u(rng), ba = 0.4 * (u(rng) - 0.5);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      double v = base;
      for (const Wave& w : waves) {
        v += w.amp * std::cos(kTwoPi * (w.fx * x / d.width + w.fy * y / d.height) + w.phase);
      }
      const double r2 = ((x - bx) * (x - bx) + (y - by) * (y - by)) / (br * br);
      v += ba * std::exp(-r2);
      for (int c = 0; c < d.channels; ++c) {
        img[(static_cast<std::size_t>(y) * d.width + x) * d.channels + c] =
            Clamp01(v + 0.05 * c);
      }
    }
  }
  return img;
}

VideoClip StaticScene(const ClipDims& d, Rng& rng) {
  const std::vector<double> img = Still(d, rng);
  VideoClip clip(d);
  for (int t = 0; t < d.frames; ++t) {
    std::copy(img.begin(), img.end(), clip.data().begin() + clip.index(t, 0, 0));
  }
  return clip;
}

VideoClip DriftingGradient(const ClipDims& d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double angle = kTwoPi * u(rng);
  const double spin = 0.05 * (u(rng) - 0.5);
  const double cycles = 0.5 + 1.5 * u(rng);
  const double drift = 0.02 + 0.08 * u(rng);  // cycles per frame
  const double phase = kTwoPi * u(rng);
  const double amp = 0.2 + 0.25 * u(rng);
  VideoClip clip(d);
  for (int t = 0; t < d.frames; ++t) {
    const double a = angle + spin * t;
    const double cx = std::cos(a) / d.width, cy = std::sin(a) / d.height;
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        const double v = 0.5 + amp * std::sin(kTwoPi * (cycles * (cx * x + cy * y) +
                                                          drift * t) + phase);
        for (int c = 0; c < d.channels; ++c) clip.at(t, y, x, c) = Clamp01(v);
      }
    }
  }
  return clip;
}

VideoClip MovingShapes(const ClipDims& d, int count, double speed, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Shape { double x, y, vx, vy, half_w, half_h, level; bool disc; };
  std::vector<Shape> shapes(static_cast<std::size_t>(count));
  for (Shape& s : shapes) {
    const double dir = kTwoPi * u(rng);
    s.x = d.width * u(rng);
    s.y = d.height * u(rng);
    s.vx = speed * std::cos(dir);
    s.vy = speed * std::sin(dir);
    s.half_w = 2.0 + 0.15 * d.width * u(rng);
    s.half_h = 2.0 + 0.15 * d.height * u(rng);
    s.level = u(rng);
    s.disc = u(rng) < 0.5;
  }
  const double background = 0.2 + 0.6 * u(rng);
  VideoClip clip(d, background);
  for (int t = 0; t < d.frames; ++t) {
    for (const Shape& s : shapes) {
      // Positions wrap around the frame.
      const double cx = std::fmod(std::fmod(s.x + s.vx * t, d.width) + d.width, d.width);
      const double cy = std::fmod(std::fmod(s.y + s.vy * t, d.height) + d.height, d.height);
      for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
          double dx = std::abs(x + 0.5 - cx), dy = std::abs(y + 0.5 - cy);
          dx = std::min(dx, d.width - dx);
          dy = std::min(dy, d.height - dy);
          const bool inside =
              s.disc ? (dx * dx) / (s.half_w * s.half_w) + (dy * dy) / (s.half_h * s.half_h) <= 1
                     : dx <= s.half_w && dy <= s.half_h;
          if (!inside) continue;
          for (int c = 0; c < d.channels; ++c) clip.at(t, y, x, c) = s.level;
        }
      }
    }
  }
  return clip;
}

VideoClip SceneCut(const ClipDims& d, int position, Rng& rng) {
  const VideoClip before = StaticScene(d, rng);
  const VideoClip after = StaticScene(d, rng);
  VideoClip clip(d);
  for (int t = 0; t < d.frames; ++t) {
    const VideoClip& src = t < position ? before : after;
    std::copy_n(src.data().begin() + src.index(t, 0, 0), d.frame_size(),
                clip.data().begin() + clip.index(t, 0, 0));
  }
  return clip;
}

}  // namespace

const char* SceneKindName(SceneKind kind) {
  switch (kind) {
    case SceneKind::kStatic: return "static";
    case SceneKind::kDriftingGradient: return "drifting-gradient";
    case SceneKind::kMovingShapes: return "moving-shapes";
    case SceneKind::kSceneCut: return "scene-cut";
  }
  return "?";
}

SceneKind ParseSceneKind(std::string_view name) {
  for (SceneKind k : {SceneKind::kStatic, SceneKind::kDriftingGradient,
                      SceneKind::kMovingShapes, SceneKind::kSceneCut}) {
    if (name == SceneKindName(k)) return k;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown scene kind '" + std::string(name) + "'");
}

void CorpusSpec::validate() const {
  Require(n_clips >= 1, ErrorCode::kInvalidArgument, "corpus needs at least one clip");
  Require(dims.frames >= 2 && dims.height >= 1 && dims.width >= 1 && dims.channels >= 1,
          ErrorCode::kInvalidArgument, "bad clip dims " + ToString(dims));
  Require(weights.size() == 4, ErrorCode::kInvalidArgument, "need one weight per scene kind");
  double total = 0.0;
  for (double w : weights) {
    Require(w >= 0.0 && std::isfinite(w), ErrorCode::kInvalidArgument,
            "scene weights must be non-negative");
    total += w;
  }
  Require(total > 0.0, ErrorCode::kInvalidArgument, "scene weights sum to zero");
  Require(shape_count >= 0 && shape_speed >= 0.0, ErrorCode::kInvalidArgument,
          "shape count and speed must be non-negative");
  Require(cut_position == 0 || (cut_position > 0 && cut_position < dims.frames),
          ErrorCode::kOutOfRange, "scene cut position must lie in (0, T)");
}

SceneKind SceneKindOf(const CorpusSpec& spec, int index) {
  Rng rng = MakeRng(spec.seed, "corpus.kind", {static_cast<uint64_t>(index)});
  std::discrete_distribution<int> pick(spec.weights.begin(), spec.weights.end());
  return static_cast<SceneKind>(pick(rng));
}

VideoClip RenderScene(SceneKind kind, const CorpusSpec& spec, Rng& rng) {
  switch (kind) {
    case SceneKind::kStatic: return StaticScene(spec.dims, rng);
    case SceneKind::kDriftingGradient: return DriftingGradient(spec.dims, rng);
    case SceneKind::kMovingShapes:
      return MovingShapes(spec.dims, spec.shape_count, spec.shape_speed, rng);
    case SceneKind::kSceneCut: {
      int position = spec.cut_position;
      if (position == 0) {
        position = std::uniform_int_distribution<int>(1, spec.dims.frames - 1)(rng);
      }
      return SceneCut(spec.dims, position, rng);
    }
  }
  Fail(ErrorCode::kInvalidArgument, "unknown scene kind");
}

VideoClip GenerateClip(const CorpusSpec& spec, int index) {
  spec.validate();
  Require(index >= 0 && index < spec.n_clips, ErrorCode::kOutOfRange,
          "clip index out of range");
  Rng rng = MakeRng(spec.seed, "corpus.clip", {static_cast<uint64_t>(index)});
  VideoClip clip = RenderScene(SceneKindOf(spec, index), spec, rng);
  // Round through f32 so a clip read back from disk equals the generated one.
  for (double& v : clip.data()) v = static_cast<float>(v);
  return clip;
}

std::vector<VideoClip> GenerateCorpus(const CorpusSpec& spec) {
  spec.validate();
  std::vector<VideoClip> clips;
  clips.reserve(static_cast<std::size_t>(spec.n_clips));
  for (int i = 0; i < spec.n_clips; ++i) clips.push_back(GenerateClip(spec, i));
  return clips;
}

std::string ClipFileName(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%04d.atv", index);
  return buf;
}

std::vector<std::filesystem::path> WriteCorpus(const std::filesystem::path& dir,
                                               const std::vector<VideoClip>& clips) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  Require(!ec, ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    paths.push_back(dir / ClipFileName(static_cast<int>(i)));
    WriteClip(paths.back(), clips[i]);
  }
  return paths;
}

std::vector<VideoClip> LoadCorpus(const std::filesystem::path& dir) {
  std::error_code ec;
  Require(std::filesystem::is_directory(dir, ec), ErrorCode::kIo,
          "corpus directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("clip_") && name.ends_with(".atv")) {
      paths.push_back(entry.path());
    }
  }
  Require(!paths.empty(), ErrorCode::kIo, "no clip_*.atv files in " + dir.string());
  std::sort(paths.begin(), paths.end());
  std::vector<VideoClip> clips;
  for (const auto& p : paths) {
    clips.push_back(ReadClip(p));
    RequireSameDims(clips.front(), clips.back());
  }
  return clips;
}

}  // namespace causaltok
