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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "causaltok/allocator.h"
#include "causaltok/codec.h"
#include "causaltok/config.h"
#include "causaltok/corpus.h"
#include "causaltok/scorer.h"

namespace causaltok {
namespace {

AllocationProblem MakeProblem(int batch) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AllocationProblem p;
  p.grid = CandidateGrid(2, 32);
  p.budget_per_sample = 8;
  for (int k = 0; k < batch; ++k) {
    std::vector<double> row;
    double s = 1.0 + u(rng), decay = 0.8 + 0.15 * u(rng);
    for (std::size_t j = 0; j < p.grid.size(); ++j, s *= decay) row.push_back(s);
    p.scores.push_back(std::move(row));
  }
  return p;
}

void BM_Allocate(benchmark::State& state, Strategy strategy) {
  const AllocationProblem p = MakeProblem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Allocate(strategy, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Allocate, ilp, Strategy::kIlp)->RangeMultiplier(4)->Range(4, 256);
BENCHMARK_CAPTURE(BM_Allocate, bithr, Strategy::kBiThr)->RangeMultiplier(4)->Range(4, 256);
BENCHMARK_CAPTURE(BM_Allocate, bidelta, Strategy::kBiDelta)->RangeMultiplier(4)->Range(4, 256);

void BM_Encode(benchmark::State& state) {
  const RunConfig cfg;
  const CodecOracle codec(cfg.patch, cfg.dims());
  const VideoClip clip = GenerateClip(cfg.corpus, 0);
  for (auto _ : state) benchmark::DoNotOptimize(codec.Encode(clip));
}
BENCHMARK(BM_Encode);

void BM_Decode(benchmark::State& state) {
  const RunConfig cfg;
  const CodecOracle codec(cfg.patch, cfg.dims());
  const VideoClip clip = GenerateClip(cfg.corpus, 0);
  const LatentSequence lat = codec.Encode(clip);
  const std::vector<int> lengths(cfg.patch.blocks, 8);
  for (auto _ : state) benchmark::DoNotOptimize(codec.Decode(lat, lengths, &clip));
}
BENCHMARK(BM_Decode);

void BM_ExactScores(benchmark::State& state) {
  const RunConfig cfg;
  const CodecOracle codec(cfg.patch, cfg.dims());
  const std::vector<VideoClip> clips = {GenerateClip(cfg.corpus, 0)};
  const std::vector<std::vector<int>> before = {std::vector<int>(2, 8)};
  const std::vector<int> grid = cfg.grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(PredictScores(clips, 2, before, ScorerBackend::Exact(),
                                           MetricKind::kMse, grid, codec));
  }
}
BENCHMARK(BM_ExactScores);

}  // namespace
}  // namespace causaltok

BENCHMARK_MAIN();
