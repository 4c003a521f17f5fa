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

#ifndef CAUSALTOK_VIDEO_H_
#define CAUSALTOK_VIDEO_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace causaltok {

struct ClipDims {
  int frames = 0;
  int height = 0;
  int width = 0;
  int channels = 1;

  std::size_t frame_size() const {
    return static_cast<std::size_t>(height) * width * channels;
  }
  std::size_t size() const { return frame_size() * frames; }

  bool operator==(const ClipDims&) const = default;
};

std::string ToString(const ClipDims& dims);

// A T x H x W x C frame tensor stored frame-major (t, y, x, c).
class VideoClip {
 public:
  VideoClip() = default;
  explicit VideoClip(ClipDims dims, double fill = 0.0);
  VideoClip(ClipDims dims, std::vector<double> data);

  const ClipDims& dims() const { return dims_; }
  int frames() const { return dims_.frames; }
  int height() const { return dims_.height; }
  int width() const { return dims_.width; }
  int channels() const { return dims_.channels; }

  std::size_t index(int t, int y, int x, int c = 0) const {
    return ((static_cast<std::size_t>(t) * dims_.height + y) * dims_.width + x) *
               dims_.channels + c;
  }
  double& at(int t, int y, int x, int c = 0) { return data_[index(t, y, x, c)]; }
  double at(int t, int y, int x, int c = 0) const {
    return data_[index(t, y, x, c)];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  // Copy of frames [first, first + count).
  VideoClip frame_range(int first, int count) const;

  // Throws kOutOfRange when any sample is non-finite or outside [0, 1].
  void validate_range() const;

  std::optional<double> frame_rate;

 private:
  ClipDims dims_;
  std::vector<double> data_;
};

void RequireSameDims(const VideoClip& a, const VideoClip& b);

// Clip file: "ATOKVID1", u32 T, H, W, C (little-endian), then T*H*W*C
// little-endian f32 samples in frame-major order.
void WriteClip(const std::filesystem::path& path, const VideoClip& clip);
VideoClip ReadClip(const std::filesystem::path& path);

}  // namespace causaltok

#endif  // CAUSALTOK_VIDEO_H_
