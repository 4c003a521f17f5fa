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

#include "causaltok/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "causaltok/codec.h"
#include "causaltok/error.h"
#include "causaltok/rng.h"

namespace causaltok {

namespace {

using Clock = std::chrono::steady_clock;

double Ms(Clock::duration d) {
  return std::chrono::duration<double, std::milli>(d).count();
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double Mean(const std::vector<double>& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m += (v[i] - m) / static_cast<double>(i + 1);
  return m;
}

double CappedValue(MetricKind metric, const VideoClip& ref, const VideoClip& test) {
  const double v = Evaluate(metric, ref, test);
  return metric == MetricKind::kPsnr ? std::min(v, kPsnrScoreCap) : v;
}

// Scores one block for every clip, one clip per work item.
ScoreSlice ScoreBlock(std::span<const VideoClip> clips, int block,
                      const std::vector<std::vector<int>>& before,
                      const ScorerBackend& backend, MetricKind metric,
                      const std::vector<int>& grid, const CodecOracle& codec, int threads) {
  ScoreSlice slice;
  slice.block = block;
  slice.grid = grid;
  slice.metric = metric;
  slice.source = backend.kind;
  slice.rows.resize(clips.size());
  ParallelFor(static_cast<int>(clips.size()), threads, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    ScoreSlice one = PredictScores(clips.subspan(k, 1), block,
                                   std::span<const std::vector<int>>(&before[k], 1), backend,
                                   metric, grid, codec, i);
    slice.rows[k] = std::move(one.rows.front());
  });
  return slice;
}

std::size_t GridIndex(const std::vector<int>& grid, int tokens) {
  return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), tokens) -
                                  grid.begin());
}

}  // namespace

void ParallelFor(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

PipelineResult RunPipeline(std::span<const VideoClip> clips, const RunConfig& cfg,
                           Strategy strategy, MetricKind metric, int budget,
                           const ScorerBackend& backend) {
  cfg.validate();
  Require(!clips.empty(), ErrorCode::kInvalidArgument, "empty corpus");
  for (const VideoClip& clip : clips) {
    Require(clip.dims() == cfg.dims(), ErrorCode::kDimensionMismatch,
            "clip dims " + ToString(clip.dims()) + " differ from config " +
                ToString(cfg.dims()));
  }
  const CodecOracle codec(cfg.patch, cfg.dims());
  const std::vector<int> grid = cfg.grid();
  const int n = static_cast<int>(clips.size());
  const int blocks = cfg.patch.blocks;
  const int batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);

  AllocatorOptions opts;
  opts.ilp.relax_budget = cfg.relax_budget;
  opts.max_iters = cfg.max_iters;

  PipelineResult result;
  result.strategy = strategy;
  result.metric = metric;
  result.budget = budget;
  result.lengths.assign(static_cast<std::size_t>(n), {});
  std::vector<std::vector<double>> seen(static_cast<std::size_t>(n));

  if (cfg.joint && strategy == Strategy::kIlp) {
    ScoreTable table(n, blocks, grid, metric, backend.kind);
    for (int q = 0; q < blocks; ++q) {
      const std::vector<std::vector<int>> before(static_cast<std::size_t>(n),
                                                 std::vector<int>(q, budget));
      table.SetSlice(ScoreBlock(clips, q, before, backend, metric, grid, codec, cfg.threads));
    }
    for (int first = 0; first < n; first += batch) {
      const int count = std::min(batch, n - first);
      ScoreTable part(count, blocks, grid, metric, backend.kind);
      for (int s = 0; s < count; ++s)
        for (int q = 0; q < blocks; ++q)
          for (std::size_t j = 0; j < grid.size(); ++j)
            part.at(s, q, static_cast<int>(j)) = table.at(first + s, q, static_cast<int>(j));
      const auto t0 = Clock::now();
      const JointAllocation joint = AllocateJointIlp(part, budget, opts.ilp);
      result.allocation_ms += Ms(Clock::now() - t0);
      for (int s = 0; s < count; ++s) {
        const auto k = static_cast<std::size_t>(first + s);
        result.lengths[k] = joint.tokens[static_cast<std::size_t>(s)];
        for (int q = 0; q < blocks; ++q) {
          seen[k].push_back(table.at(first + s, q,
                                     static_cast<int>(GridIndex(grid, result.lengths[k][q]))));
        }
      }
    }
  } else {
    for (int q = 0; q < blocks; ++q) {
      const ScoreSlice slice =
          ScoreBlock(clips, q, result.lengths, backend, metric, grid, codec, cfg.threads);
      for (int first = 0; first < n; first += batch) {
        const int count = std::min(batch, n - first);
        AllocationProblem problem;
        problem.grid = grid;
        problem.budget_per_sample = budget;
        problem.scores.assign(slice.rows.begin() + first, slice.rows.begin() + first + count);
        const auto t0 = Clock::now();
        const Allocation alloc = Allocate(strategy, problem, opts);
        result.allocation_ms += Ms(Clock::now() - t0);
        for (int s = 0; s < count; ++s) {
          const auto k = static_cast<std::size_t>(first + s);
          const int tokens = alloc.tokens[static_cast<std::size_t>(s)];
          result.lengths[k].push_back(tokens);
          seen[k].push_back(slice.rows[k][GridIndex(grid, tokens)]);
        }
      }
    }
  }

  result.distortion.assign(static_cast<std::size_t>(n), 0.0);
  result.mse.assign(static_cast<std::size_t>(n), 0.0);
  ParallelFor(n, cfg.threads, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    const LatentSequence lat = codec.Encode(clips[k], result.lengths[k]);
    const ReconstructionReport rec = codec.Decode(lat, result.lengths[k]);
    result.distortion[k] = CappedValue(metric, clips[k], rec.clip);
    result.mse[k] = Mse(clips[k], rec.clip);
  });

  // Integer total keeps the mean exact when the budget is met.
  int64_t total_tokens = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    for (int q = 0; q < blocks; ++q) {
      result.records.push_back({i, q, result.lengths[k][q], seen[k][q]});
      total_tokens += result.lengths[k][q];
    }
  }
  result.mean_distortion = Mean(result.distortion);
  result.mean_mse = Mean(result.mse);
  result.mean_tokens = static_cast<double>(total_tokens) / (static_cast<double>(n) * blocks);
  return result;
}

SweepReport Sweep(std::span<const VideoClip> clips, const RunConfig& cfg, bool timing) {
  cfg.validate();
  SweepReport report;
  report.corpus_seed = cfg.corpus.seed;
  report.run_seed = cfg.seed;
  report.config_hash = ConfigHash(cfg);
  report.clips = static_cast<int>(clips.size());
  report.joint = cfg.joint;
  for (Strategy strategy : cfg.strategies) {
    for (int budget : cfg.budgets) {
      for (MetricKind metric : cfg.metrics) {
        const auto t0 = Clock::now();
        const PipelineResult r = RunPipeline(clips, cfg, strategy, metric, budget);
        SweepRow row{strategy, metric, budget, r.mean_distortion, r.mean_tokens, r.mean_mse,
                     0.0};
        if (timing) row.runtime_ms = Ms(Clock::now() - t0);
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

void WriteSweepCsv(std::ostream& out, const SweepReport& report) {
  out << "strategy,metric,budget,mean_distortion,mean_tokens,mean_mse,runtime_ms\n";
  for (const SweepRow& r : report.rows) {
    out << StrategyName(r.strategy) << ',' << MetricName(r.metric) << ',' << r.budget << ','
        << Num(r.mean_distortion) << ',' << Num(r.mean_tokens) << ',' << Num(r.mean_mse)
        << ',' << Num(r.runtime_ms) << '\n';
  }
}

void WriteSweepJson(std::ostream& out, const SweepReport& report) {
  nlohmann::ordered_json j;
  j["meta"] = {{"corpus_seed", report.corpus_seed},
               {"run_seed", report.run_seed},
               {"config_hash", report.config_hash},
               {"clips", report.clips},
               {"joint", report.joint}};
  j["rows"] = nlohmann::ordered_json::array();
  for (const SweepRow& r : report.rows) {
    j["rows"].push_back({{"strategy", StrategyName(r.strategy)},
                         {"metric", MetricName(r.metric)},
                         {"budget", r.budget},
                         {"mean_distortion", r.mean_distortion},
                         {"mean_tokens", r.mean_tokens},
                         {"mean_mse", r.mean_mse},
                         {"runtime_ms", r.runtime_ms}});
  }
  out << j.dump(2) << '\n';
}

bool RobustnessReport::monotone() const {
  return std::none_of(points.begin(), points.end(),
                      [](const RobustnessPoint& p) { return p.violation; });
}

RobustnessReport RobustnessCurve(std::span<const VideoClip> clips, const RunConfig& cfg,
                                 int budget, MetricKind metric) {
  cfg.validate();
  RobustnessReport report;
  report.metric = metric;
  report.budget = budget;
  report.seeds = cfg.noise_seeds;
  for (double noise : cfg.noise_levels) {
    std::vector<double> per_seed;
    for (int s = 0; s < cfg.noise_seeds; ++s) {
      const ScorerBackend backend = ScorerBackend::Noisy(
          noise, SubSeed(cfg.seed, "robustness", {static_cast<uint64_t>(s)}));
      per_seed.push_back(
          RunPipeline(clips, cfg, Strategy::kIlp, metric, budget, backend).mean_distortion);
    }
    RobustnessPoint p;
    p.noise = noise;
    p.mean_distortion = Mean(per_seed);
    double var = 0.0;
    for (double v : per_seed) var += (v - p.mean_distortion) * (v - p.mean_distortion);
    p.seed_stddev = std::sqrt(var / static_cast<double>(per_seed.size()));
    if (!report.points.empty()) {
      const double prev = report.points.back().mean_distortion;
      p.violation = LowerIsBetter(metric) ? p.mean_distortion < prev : p.mean_distortion > prev;
    }
    report.points.push_back(p);
  }
  return report;
}

void WriteRobustnessCsv(std::ostream& out, const RobustnessReport& report) {
  out << "noise,metric,budget,seeds,mean_distortion,seed_stddev,violation\n";
  for (const RobustnessPoint& p : report.points) {
    out << Num(p.noise) << ',' << MetricName(report.metric) << ',' << report.budget << ','
        << report.seeds << ',' << Num(p.mean_distortion) << ',' << Num(p.seed_stddev) << ','
        << (p.violation ? 1 : 0) << '\n';
  }
}

void WriteRobustnessJson(std::ostream& out, const RobustnessReport& report) {
  nlohmann::ordered_json j;
  j["metric"] = MetricName(report.metric);
  j["budget"] = report.budget;
  j["seeds"] = report.seeds;
  j["monotone"] = report.monotone();
  j["points"] = nlohmann::ordered_json::array();
  for (const RobustnessPoint& p : report.points) {
    j["points"].push_back({{"noise", p.noise},
                           {"mean_distortion", p.mean_distortion},
                           {"seed_stddev", p.seed_stddev},
                           {"violation", p.violation}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace causaltok
