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

#ifndef CAUSALTOK_RNG_H_
#define CAUSALTOK_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace causaltok {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t HashName(std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent stream seed from a root seed, a purpose tag and a
// list of indices (clip, block, ...). Work split across threads draws from
// sub-seeds only, so results never depend on scheduling.
inline uint64_t SubSeed(uint64_t root, std::string_view tag,
                        std::initializer_list<uint64_t> indices = {}) {
  uint64_t s = MixBits(root ^ HashName(tag));
  for (uint64_t i : indices) s = MixBits(s ^ (i + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng MakeRng(uint64_t root, std::string_view tag,
                   std::initializer_list<uint64_t> indices = {}) {
  return Rng(SubSeed(root, tag, indices));
}

}  // namespace causaltok

#endif  // CAUSALTOK_RNG_H_
