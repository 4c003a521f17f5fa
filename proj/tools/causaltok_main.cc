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

// causaltok: corpus generation, coding, scoring, allocation and sweeps.
//
//   causaltok gen-corpus --out corpus/
//   causaltok sweep --corpus corpus/ --out results/ --format json
//
// Exit status: 0 on success, 2 on invalid input, 3 when an exact budget
// cannot be met.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "causaltok/allocator.h"
#include "causaltok/codec.h"
#include "causaltok/config.h"
#include "causaltok/corpus.h"
#include "causaltok/error.h"
#include "causaltok/metrics.h"
#include "causaltok/pipeline.h"
#include "causaltok/scorer.h"

namespace fs = std::filesystem;
using namespace causaltok;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

struct Globals {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out = ".";
  std::string format = "csv";
  std::vector<std::string> overrides;
};

RunConfig MakeConfig(const Globals& g) {
  RunConfig cfg;
  if (!g.config.empty()) cfg = LoadConfig(g.config);
  for (const std::string& kv : g.overrides) {
    const auto eq = kv.find('=');
    Require(eq != std::string::npos, ErrorCode::kInvalidArgument,
            "--set expects key=value, got '" + kv + "'");
    SetConfigValue(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

fs::path OutDir(const Globals& g) {
  fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec, ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path);
  Require(out.good(), ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::vector<VideoClip> Corpus(const std::string& dir, const RunConfig& cfg) {
  return dir.empty() ? GenerateCorpus(cfg.corpus) : LoadCorpus(dir);
}

std::vector<AllocationRecord> LoadAllocation(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  return ReadAllocationCsv(in);
}

// clip x block lengths from allocation rows; missing cells are an error.
std::vector<std::vector<int>> LengthsFrom(const std::vector<AllocationRecord>& rows,
                                          int clips, int blocks) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(clips),
                                    std::vector<int>(static_cast<std::size_t>(blocks), -1));
  for (const AllocationRecord& r : rows) {
    Require(r.sample >= 0 && r.sample < clips && r.block >= 0 && r.block < blocks,
            ErrorCode::kOutOfRange, "allocation row outside corpus shape");
    out[static_cast<std::size_t>(r.sample)][static_cast<std::size_t>(r.block)] = r.tokens;
  }
  for (const auto& row : out)
    for (int v : row)
      Require(v >= 0, ErrorCode::kFormat, "allocation does not cover every clip and block");
  return out;
}

void EmitSummary(const Globals& g, const fs::path& dir, const PipelineResult& r) {
  if (g.format == "json") {
    nlohmann::ordered_json j{{"strategy", StrategyName(r.strategy)},
                             {"metric", MetricName(r.metric)},
                             {"budget", r.budget},
                             {"mean_distortion", r.mean_distortion},
                             {"mean_tokens", r.mean_tokens},
                             {"mean_mse", r.mean_mse}};
    OpenOut(dir / "summary.json") << j.dump(2) << '\n';
  } else {
    SweepReport report;
    report.rows.push_back({r.strategy, r.metric, r.budget, r.mean_distortion, r.mean_tokens,
                           r.mean_mse, 0.0});
    auto out = OpenOut(dir / "summary.csv");
    WriteSweepCsv(out, report);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-causal adaptive video tokenization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Flat key=value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Run seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--set", g.overrides, "Config override key=value (repeatable)");

  std::string corpus_dir, alloc_path, scores_path, strategy = "ilp", metric = "mse";
  int budget = 8;
  double noise = 0.0;
  bool relax = false, joint = false, timing = false, robustness = false;

  auto* gen = app.add_subcommand("gen-corpus", "Write the synthetic clip corpus");
  std::optional<uint64_t> corpus_seed;
  gen->add_option("--corpus-seed", corpus_seed, "Corpus seed (overrides config)");

  auto* enc = app.add_subcommand("encode", "Code every clip to latent files");
  enc->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  enc->add_option("--allocation", alloc_path, "Code at these lengths (default: all tokens)");

  auto* score = app.add_subcommand("score", "Score table for every clip, block and length");
  score->add_option("--corpus", corpus_dir, "Corpus directory (default: generate)");
  score->add_option("--budget", budget, "Length assumed for earlier blocks");
  score->add_option("--allocation", alloc_path, "Earlier-block lengths from an allocation");
  score->add_option("--metric", metric, "mse|psnr|ssim|pproxy");
  score->add_option("--noise", noise, "Relative score noise (0: exact)");

  auto* alloc = app.add_subcommand("allocate", "Allocate lengths from a score table");
  alloc->add_option("--scores", scores_path, "Score CSV")->required();
  alloc->add_option("--budget", budget, "Tokens per block per sample")->required();
  alloc->add_option("--strategy", strategy, "fixed|bithr|bidelta|ilp");
  alloc->add_flag("--relax", relax, "Spend at most the budget instead of exactly");
  alloc->add_flag("--joint", joint, "Share one budget across blocks (ilp only)");

  auto* dec = app.add_subcommand("decode", "Reconstruct clips at allocated lengths");
  dec->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  dec->add_option("--allocation", alloc_path, "Allocation CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "Strategy x budget x metric sweep");
  sweep->add_option("--corpus", corpus_dir, "Corpus directory (default: generate)");
  sweep->add_flag("--timing", timing, "Fill the runtime column (breaks byte-identity)");
  sweep->add_flag("--robustness", robustness, "Also run the noisy-scorer curve");
  sweep->add_option("--robustness-budget", budget, "Budget for the noisy-scorer curve");

  auto* report = app.add_subcommand("report", "End-to-end run for one strategy and budget");
  report->add_option("--corpus", corpus_dir, "Corpus directory (default: generate)");
  report->add_option("--strategy", strategy, "fixed|bithr|bidelta|ilp");
  report->add_option("--budget", budget, "Tokens per block");
  report->add_option("--metric", metric, "mse|psnr|ssim|pproxy");
  report->add_option("--noise", noise, "Relative score noise (0: exact)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    RunConfig cfg = MakeConfig(g);
    const fs::path dir = OutDir(g);

    if (gen->parsed()) {
      if (corpus_seed) cfg.corpus.seed = *corpus_seed;
      const auto paths = WriteCorpus(dir, GenerateCorpus(cfg.corpus));
      std::printf("wrote %zu clips to %s\n", paths.size(), dir.string().c_str());
    } else if (enc->parsed()) {
      const auto clips = LoadCorpus(corpus_dir);
      const CodecOracle codec(cfg.patch, clips.front().dims());
      std::vector<std::vector<int>> lengths;
      if (!alloc_path.empty()) {
        lengths = LengthsFrom(LoadAllocation(alloc_path), static_cast<int>(clips.size()),
                              cfg.patch.blocks);
      }
      for (std::size_t i = 0; i < clips.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "latent_%04zu.atl", i);
        const std::vector<int> none;
        WriteLatents(dir / name, codec.Encode(clips[i], lengths.empty() ? none : lengths[i]));
      }
      std::printf("encoded %zu clips\n", clips.size());
    } else if (score->parsed()) {
      const auto clips = Corpus(corpus_dir, cfg);
      const CodecOracle codec(cfg.patch, clips.front().dims());
      const int n = static_cast<int>(clips.size());
      const MetricKind m = ParseMetric(metric);
      const ScorerBackend backend =
          noise > 0.0 ? ScorerBackend::Noisy(noise, cfg.seed) : ScorerBackend::Exact();
      std::vector<std::vector<int>> full;
      if (!alloc_path.empty()) full = LengthsFrom(LoadAllocation(alloc_path), n, cfg.patch.blocks);
      ScoreTable table(n, cfg.patch.blocks, cfg.grid(), m, backend.kind);
      for (int q = 0; q < cfg.patch.blocks; ++q) {
        std::vector<std::vector<int>> before;
        for (int i = 0; i < n; ++i) {
          before.push_back(full.empty() ? std::vector<int>(q, budget)
                                        : std::vector<int>(full[i].begin(), full[i].begin() + q));
        }
        table.SetSlice(PredictScores(clips, q, before, backend, m, cfg.grid(), codec));
      }
      auto out = OpenOut(dir / "scores.csv");
      WriteScoreCsv(out, table);
    } else if (alloc->parsed()) {
      std::ifstream in(scores_path);
      Require(in.good(), ErrorCode::kIo, "cannot open " + scores_path);
      const ScoreTable table = ReadScoreCsv(in);
      const Strategy s = ParseStrategy(strategy);
      AllocatorOptions opts;
      opts.ilp.relax_budget = relax || cfg.relax_budget;
      opts.max_iters = cfg.max_iters;
      std::vector<AllocationRecord> rows;
      auto idx = [&](int tokens) {
        const auto& gr = table.grid();
        return static_cast<int>(std::lower_bound(gr.begin(), gr.end(), tokens) - gr.begin());
      };
      if (joint) {
        Require(s == Strategy::kIlp, ErrorCode::kInvalidArgument, "--joint needs --strategy ilp");
        const JointAllocation ja = AllocateJointIlp(table, budget, opts.ilp);
        for (int k = 0; k < table.samples(); ++k)
          for (int q = 0; q < table.blocks(); ++q) {
            const int t = ja.tokens[k][q];
            rows.push_back({k, q, t, table.at(k, q, idx(t))});
          }
      } else {
        std::vector<Allocation> per_block;
        for (int q = 0; q < table.blocks(); ++q) {
          per_block.push_back(
              Allocate(s, AllocationProblem::FromSlice(table.Slice(q), budget), opts));
        }
        for (int k = 0; k < table.samples(); ++k)
          for (int q = 0; q < table.blocks(); ++q) {
            const int t = per_block[q].tokens[k];
            rows.push_back({k, q, t, table.at(k, q, idx(t))});
          }
      }
      auto out = OpenOut(dir / "allocation.csv");
      WriteAllocationCsv(out, rows);
    } else if (dec->parsed()) {
      const auto clips = LoadCorpus(corpus_dir);
      const CodecOracle codec(cfg.patch, clips.front().dims());
      const auto lengths = LengthsFrom(LoadAllocation(alloc_path),
                                       static_cast<int>(clips.size()), cfg.patch.blocks);
      auto out = OpenOut(dir / "metrics.csv");
      out << "sample,mse,psnr,ssim,pproxy\n";
      for (std::size_t i = 0; i < clips.size(); ++i) {
        const ReconstructionReport rec =
            codec.Decode(codec.Encode(clips[i], lengths[i]), lengths[i]);
        WriteClip(dir / ("recon_" + ClipFileName(static_cast<int>(i)).substr(5)), rec.clip);
        char line[160];
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g\n", i,
                      Mse(clips[i], rec.clip),
                      std::min(Psnr(clips[i], rec.clip), kPsnrScoreCap),
                      Ssim(clips[i], rec.clip), PerceptualProxy(clips[i], rec.clip));
        out << line;
      }
    } else if (sweep->parsed()) {
      const auto clips = Corpus(corpus_dir, cfg);
      const SweepReport rep = Sweep(clips, cfg, timing);
      if (g.format == "json") {
        auto out = OpenOut(dir / "sweep.json");
        WriteSweepJson(out, rep);
      } else {
        auto out = OpenOut(dir / "sweep.csv");
        WriteSweepCsv(out, rep);
      }
      if (robustness) {
        const RobustnessReport rr = RobustnessCurve(clips, cfg, budget);
        if (g.format == "json") {
          auto out = OpenOut(dir / "robustness.json");
          WriteRobustnessJson(out, rr);
        } else {
          auto out = OpenOut(dir / "robustness.csv");
          WriteRobustnessCsv(out, rr);
        }
        if (!rr.monotone()) std::fprintf(stderr, "warning: robustness curve not monotone\n");
      }
    } else if (report->parsed()) {
      const auto clips = Corpus(corpus_dir, cfg);
      const ScorerBackend backend =
          noise > 0.0 ? ScorerBackend::Noisy(noise, cfg.seed) : ScorerBackend::Exact();
      const PipelineResult r =
          RunPipeline(clips, cfg, ParseStrategy(strategy), ParseMetric(metric), budget, backend);
      auto out = OpenOut(dir / "allocation.csv");
      WriteAllocationCsv(out, r.records);
      EmitSummary(g, dir, r);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "causaltok: %s: %s\n", ErrorCodeName(e.code()), e.what());
    return e.code() == ErrorCode::kInfeasibleBudget ? kExitInfeasible : kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "causaltok: %s\n", e.what());
    return kExitValidation;
  }
  return 0;
}
