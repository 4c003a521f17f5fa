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

#ifndef CAUSALTOK_SRC_BINARY_IO_H_
#define CAUSALTOK_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "causaltok/error.h"

namespace causaltok::internal {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    Require(out_.good(), ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  }

  void magic(std::string_view tag) { out_.write(tag.data(), tag.size()); }
  void u32(uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void f32(float v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }

  void finish() {
    out_.flush();
    Require(out_.good(), ErrorCode::kIo, "write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    Require(in_.good(), ErrorCode::kIo, "cannot open " + path.string());
  }

  void expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    in_.read(got.data(), got.size());
    Require(in_.good() && got == tag, ErrorCode::kFormat,
            path_.string() + ": bad magic, expected " + std::string(tag));
  }
  uint32_t u32() {
    uint32_t v = 0;
    read(&v, sizeof v);
    return v;
  }
  float f32() {
    float v = 0;
    read(&v, sizeof v);
    return v;
  }
  void expect_eof() {
    in_.peek();
    Require(in_.eof(), ErrorCode::kFormat, path_.string() + ": trailing bytes");
  }

 private:
  void read(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    Require(in_.good(), ErrorCode::kFormat, path_.string() + ": truncated file");
  }

  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace causaltok::internal

#endif  // CAUSALTOK_SRC_BINARY_IO_H_
