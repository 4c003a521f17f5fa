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

#include "causaltok/video.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "binary_io.h"
#include "causaltok/error.h"

namespace causaltok {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInfeasibleBudget: return "infeasible-budget";
    case ErrorCode::kLimitExceeded: return "limit-exceeded";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

std::string ToString(const ClipDims& dims) {
  std::ostringstream os;
  os << dims.frames << "x" << dims.height << "x" << dims.width << "x"
     << dims.channels;
  return os.str();
}

namespace {

void RequirePositive(const ClipDims& dims) {
  Require(dims.frames > 0 && dims.height > 0 && dims.width > 0 &&
              dims.channels > 0,
          ErrorCode::kDimensionMismatch,
          "clip dimensions must be positive, got " + ToString(dims));
}

}  // namespace

VideoClip::VideoClip(ClipDims dims, double fill) : dims_(dims) {
  RequirePositive(dims);
  data_.assign(dims.size(), fill);
}

VideoClip::VideoClip(ClipDims dims, std::vector<double> data)
    : dims_(dims), data_(std::move(data)) {
  RequirePositive(dims);
  Require(data_.size() == dims.size(), ErrorCode::kDimensionMismatch,
          "sample count does not match dims " + ToString(dims));
}

VideoClip VideoClip::frame_range(int first, int count) const {
  Require(first >= 0 && count > 0 && first + count <= dims_.frames,
          ErrorCode::kOutOfRange, "frame range outside clip");
  ClipDims sub = dims_;
  sub.frames = count;
  const std::size_t fs = dims_.frame_size();
  std::vector<double> out(data_.begin() + first * fs,
                          data_.begin() + (first + count) * fs);
  return VideoClip(sub, std::move(out));
}

void VideoClip::validate_range() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      Fail(ErrorCode::kOutOfRange,
           "sample " + std::to_string(i) + " outside [0,1]: " + std::to_string(v));
    }
  }
}

void RequireSameDims(const VideoClip& a, const VideoClip& b) {
  Require(a.dims() == b.dims(), ErrorCode::kDimensionMismatch,
          "clip dims differ: " + ToString(a.dims()) + " vs " + ToString(b.dims()));
}

void WriteClip(const std::filesystem::path& path, const VideoClip& clip) {
  internal::BinaryWriter w(path);
  w.magic("ATOKVID1");
  w.u32(clip.frames());
  w.u32(clip.height());
  w.u32(clip.width());
  w.u32(clip.channels());
  for (double v : clip.data()) w.f32(static_cast<float>(v));
  w.finish();
}

VideoClip ReadClip(const std::filesystem::path& path) {
  internal::BinaryReader r(path);
  r.expect_magic("ATOKVID1");
  ClipDims dims;
  dims.frames = static_cast<int>(r.u32());
  dims.height = static_cast<int>(r.u32());
  dims.width = static_cast<int>(r.u32());
  dims.channels = static_cast<int>(r.u32());
  Require(dims.frames > 0 && dims.height > 0 && dims.width > 0 &&
              dims.channels > 0 && dims.size() < (std::size_t{1} << 31),
          ErrorCode::kFormat, path.string() + ": implausible dims " + ToString(dims));
  std::vector<double> data(dims.size());
  for (double& v : data) v = r.f32();
  r.expect_eof();
  return VideoClip(dims, std::move(data));
}

}  // namespace causaltok
