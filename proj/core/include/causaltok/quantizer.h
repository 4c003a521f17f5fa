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

#ifndef CAUSALTOK_QUANTIZER_H_
#define CAUSALTOK_QUANTIZER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "causaltok/patchify.h"
#include "causaltok/rng.h"

namespace causaltok {

// c x d' code matrix. Rows are never zero-norm; ids handed out by the
// quantizer are row indices, and `id_offset` is where special tokens start
// in a packed vocabulary (normally c itself).
class Codebook {
 public:
  explicit Codebook(RowMatrix codes);

  // Seeded unit-norm random book. The full-scale default is 8192 x 16.
  static Codebook Random(int size, int dim, uint64_t seed);

  int size() const { return static_cast<int>(codes_.rows()); }
  int dim() const { return static_cast<int>(codes_.cols()); }
  const RowMatrix& codes() const { return codes_; }
  const Eigen::VectorXd& norms() const { return norms_; }
  int id_offset() const { return size(); }

 private:
  RowMatrix codes_;
  Eigen::VectorXd norms_;
};

// "ATOKCBK1", u32 c, u32 d', then c*d' little-endian f32 (row-major).
void WriteCodebook(const std::filesystem::path& path, const Codebook& book);
Codebook ReadCodebook(const std::filesystem::path& path);

struct QuantizerOutput {
  std::vector<int> indices;
  RowMatrix vectors;               // row i == codes.row(indices[i])
  std::optional<RowMatrix> probs;  // softmax rows, kept for inspection
};

struct QuantizerOptions {
  double temperature = 1.0;
  bool keep_probs = false;
};

// Cosine similarity of every input row against every code.
RowMatrix CosineSimilarity(const RowMatrix& inputs, const Codebook& book);

// Stochastic VQ: per row, softmax over cosine similarities (divided by the
// temperature), draw a categorical index, look the code up.
QuantizerOutput SvqSample(const RowMatrix& inputs, const Codebook& book, Rng& rng,
                          const QuantizerOptions& options = {});

// Deterministic mode: highest cosine similarity, lowest index on ties.
QuantizerOutput SvqArgmax(const RowMatrix& inputs, const Codebook& book);

// Training note: a learned tokenizer passes gradients through the lookup with
// the straight-through estimator (z_q = z + stopgrad(C[idx] - z)). Nothing in
// this library differentiates, so the estimator has no runtime counterpart.

}  // namespace causaltok

#endif  // CAUSALTOK_QUANTIZER_H_
