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

#include "causaltok/quantizer.h"

#include <cmath>
#include <string>
#include <utility>

#include "binary_io.h"
#include "causaltok/error.h"

namespace causaltok {

namespace {

// Guards zero-norm input rows; such rows get an all-zero similarity row and
// therefore a uniform distribution.
constexpr double kNormEpsilon = 1e-12;

void RequireInputs(const RowMatrix& inputs, const Codebook& book) {
  Require(inputs.cols() == book.dim(), ErrorCode::kDimensionMismatch,
          "input width " + std::to_string(inputs.cols()) + " != code width " +
              std::to_string(book.dim()));
}

}  // namespace

Codebook::Codebook(RowMatrix codes) : codes_(std::move(codes)) {
  Require(codes_.rows() >= 1 && codes_.cols() >= 1, ErrorCode::kInvalidArgument,
          "codebook must hold at least one code");
  norms_ = codes_.rowwise().norm();
  for (Eigen::Index i = 0; i < norms_.size(); ++i) {
    Require(std::isfinite(norms_(i)) && norms_(i) > 0.0, ErrorCode::kInvalidArgument,
            "code " + std::to_string(i) + " has zero or non-finite norm");
  }
}

Codebook Codebook::Random(int size, int dim, uint64_t seed) {
  Require(size >= 1 && dim >= 1, ErrorCode::kInvalidArgument,
          "codebook size and width must be positive");
  Rng rng = MakeRng(seed, "codebook");
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix codes(size, dim);
  for (Eigen::Index i = 0; i < codes.rows(); ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < codes.cols(); ++j) codes(i, j) = normal(rng);
      norm = codes.row(i).norm();
    } while (norm < 1e-9);
    codes.row(i) /= norm;
  }
  return Codebook(std::move(codes));
}

void WriteCodebook(const std::filesystem::path& path, const Codebook& book) {
  internal::BinaryWriter w(path);
  w.magic("ATOKCBK1");
  w.u32(static_cast<uint32_t>(book.size()));
  w.u32(static_cast<uint32_t>(book.dim()));
  for (Eigen::Index i = 0; i < book.codes().rows(); ++i)
    for (Eigen::Index j = 0; j < book.codes().cols(); ++j)
      w.f32(static_cast<float>(book.codes()(i, j)));
  w.finish();
}

Codebook ReadCodebook(const std::filesystem::path& path) {
  internal::BinaryReader r(path);
  r.expect_magic("ATOKCBK1");
  const uint32_t c = r.u32();
  const uint32_t d = r.u32();
  Require(c >= 1 && d >= 1 && static_cast<uint64_t>(c) * d < (uint64_t{1} << 28),
          ErrorCode::kFormat, path.string() + ": implausible codebook shape");
  RowMatrix codes(c, d);
  for (Eigen::Index i = 0; i < codes.rows(); ++i)
    for (Eigen::Index j = 0; j < codes.cols(); ++j) codes(i, j) = r.f32();
  r.expect_eof();
  return Codebook(std::move(codes));
}

RowMatrix CosineSimilarity(const RowMatrix& inputs, const Codebook& book) {
  RequireInputs(inputs, book);
  RowMatrix sim = inputs * book.codes().transpose();
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    const double in_norm = inputs.row(i).norm() + kNormEpsilon;
    for (Eigen::Index j = 0; j < sim.cols(); ++j)
      sim(i, j) /= in_norm * book.norms()(j);
  }
  return sim;
}

QuantizerOutput SvqSample(const RowMatrix& inputs, const Codebook& book, Rng& rng,
                          const QuantizerOptions& options) {
  Require(options.temperature > 0.0, ErrorCode::kInvalidArgument,
          "temperature must be positive");
  RowMatrix probs = CosineSimilarity(inputs, book) / options.temperature;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  QuantizerOutput out;
  out.indices.reserve(static_cast<std::size_t>(inputs.rows()));
  out.vectors.resize(inputs.rows(), book.dim());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    auto row = probs.row(i);
    row = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
    // Inverse-CDF draw; the last index absorbs any rounding shortfall.
    const double u = uniform(rng);
    double cumulative = 0.0;
    int pick = book.size() - 1;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      cumulative += row(j);
      if (u < cumulative) {
        pick = static_cast<int>(j);
        break;
      }
    }
    out.indices.push_back(pick);
    out.vectors.row(i) = book.codes().row(pick);
  }
  if (options.keep_probs) out.probs = std::move(probs);
  return out;
}

QuantizerOutput SvqArgmax(const RowMatrix& inputs, const Codebook& book) {
  const RowMatrix sim = CosineSimilarity(inputs, book);
  QuantizerOutput out;
  out.vectors.resize(inputs.rows(), book.dim());
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < sim.cols(); ++j)
      if (sim(i, j) > sim(i, best)) best = static_cast<int>(j);
    out.indices.push_back(best);
    out.vectors.row(i) = book.codes().row(best);
  }
  return out;
}

}  // namespace causaltok
