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

#include "causaltok/config.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "causaltok/error.h"
#include "causaltok/rng.h"

namespace causaltok {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  Fail(ErrorCode::kInvalidArgument, "bad value '" + value + "' for " + key);
}

int ToInt(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    BadValue(key, value);
  }
  if (used != value.size() || v < INT32_MIN || v > INT32_MAX) BadValue(key, value);
  return static_cast<int>(v);
}

uint64_t ToU64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (value.empty() || value[0] == '-') BadValue(key, value);
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    BadValue(key, value);
  }
  if (used != value.size()) BadValue(key, value);
  return v;
}

double ToDouble(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    BadValue(key, value);
  }
  if (used != value.size()) BadValue(key, value);
  return v;
}

bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  BadValue(key, value);
}

std::vector<int> Dims(const std::string& key, const std::string& value, std::size_t n) {
  std::vector<int> out;
  for (const std::string& part : Split(value, 'x')) out.push_back(ToInt(key, part));
  if (out.size() != n) BadValue(key, value);
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string Join(const std::vector<T>& items, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace

std::vector<int> RunConfig::grid() const {
  return CandidateGrid(grid_min, grid_max, grid_stride);
}

void RunConfig::validate() const {
  corpus.validate();
  patch.validate(corpus.dims);
  Require(grid_min >= 0 && grid_min <= grid_max && grid_max <= patch.tokens_per_block &&
              grid_stride >= 1,
          ErrorCode::kInvalidArgument, "grid must satisfy 0 <= min <= max <= tokens_per_block");
  sampler.validate(patch.tokens_per_block);
  Require(max_iters >= 1, ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  Require(codebook_size >= 1 && codebook_dim >= 1, ErrorCode::kInvalidArgument,
          "codebook shape must be positive");
  Require(batch_size >= 0 && threads >= 1 && noise_seeds >= 1, ErrorCode::kInvalidArgument,
          "batch_size >= 0, threads >= 1 and noise_seeds >= 1 required");
  for (int b : budgets) {
    Require(b >= grid_min && b <= grid_max, ErrorCode::kOutOfRange,
            "budget " + std::to_string(b) + " outside the candidate grid range");
  }
  for (double s : noise_levels) {
    Require(s >= 0.0 && std::isfinite(s), ErrorCode::kInvalidArgument,
            "noise levels must be non-negative");
  }
}

void SetConfigValue(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "frame_resolution") {
    const auto d = Dims(key, value, 3);
    cfg.corpus.dims.frames = d[0];
    cfg.corpus.dims.height = d[1];
    cfg.corpus.dims.width = d[2];
  } else if (key == "channels") {
    cfg.corpus.dims.channels = ToInt(key, value);
  } else if (key == "patch_size") {
    const auto d = Dims(key, value, 3);
    if (d[1] != d[2]) BadValue(key, value);
    cfg.patch.temporal_patch = d[0];
    cfg.patch.spatial_patch = d[1];
  } else if (key == "num_blocks") {
    cfg.patch.blocks = ToInt(key, value);
  } else if (key == "tokens_per_block") {
    cfg.patch.tokens_per_block = ToInt(key, value);
  } else if (key == "grid_min") {
    cfg.grid_min = ToInt(key, value);
  } else if (key == "grid_max") {
    cfg.grid_max = ToInt(key, value);
  } else if (key == "grid_stride") {
    cfg.grid_stride = ToInt(key, value);
  } else if (key == "sampler_mean") {
    cfg.sampler.mean = ToDouble(key, value);
  } else if (key == "sampler_std") {
    cfg.sampler.stddev = ToDouble(key, value);
  } else if (key == "sampler_min") {
    cfg.sampler.min_tokens = ToInt(key, value);
  } else if (key == "sampler_max") {
    cfg.sampler.max_tokens = ToInt(key, value);
  } else if (key == "max_iters") {
    cfg.max_iters = ToInt(key, value);
  } else if (key == "relax_budget") {
    cfg.relax_budget = ToBool(key, value);
  } else if (key == "codebook_size") {
    cfg.codebook_size = ToInt(key, value);
  } else if (key == "codebook_dim") {
    cfg.codebook_dim = ToInt(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = ToInt(key, value);
  } else if (key == "threads") {
    cfg.threads = ToInt(key, value);
  } else if (key == "seed") {
    cfg.seed = ToU64(key, value);
  } else if (key == "joint") {
    cfg.joint = ToBool(key, value);
  } else if (key == "budgets") {
    cfg.budgets.clear();
    for (const auto& v : Split(value, ',')) cfg.budgets.push_back(ToInt(key, v));
  } else if (key == "strategies") {
    cfg.strategies.clear();
    for (const auto& v : Split(value, ',')) cfg.strategies.push_back(ParseStrategy(v));
  } else if (key == "metrics") {
    cfg.metrics.clear();
    for (const auto& v : Split(value, ',')) cfg.metrics.push_back(ParseMetric(v));
  } else if (key == "noise_levels") {
    cfg.noise_levels.clear();
    for (const auto& v : Split(value, ',')) cfg.noise_levels.push_back(ToDouble(key, v));
  } else if (key == "noise_seeds") {
    cfg.noise_seeds = ToInt(key, value);
  } else if (key == "corpus_clips") {
    cfg.corpus.n_clips = ToInt(key, value);
  } else if (key == "corpus_seed") {
    cfg.corpus.seed = ToU64(key, value);
  } else if (key == "scene_weights") {
    std::vector<double> w(4, 0.0);
    for (const auto& item : Split(value, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) BadValue(key, value);
      const SceneKind kind = ParseSceneKind(Trim(item.substr(0, colon)));
      w[static_cast<std::size_t>(kind)] = ToDouble(key, Trim(item.substr(colon + 1)));
    }
    cfg.corpus.weights = w;
  } else if (key == "shape_count") {
    cfg.corpus.shape_count = ToInt(key, value);
  } else if (key == "shape_speed") {
    cfg.corpus.shape_speed = ToDouble(key, value);
  } else if (key == "cut_position") {
    cfg.corpus.cut_position = ToInt(key, value);
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
}

RunConfig ParseConfig(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    Require(eq != std::string::npos, ErrorCode::kFormat,
            "line " + std::to_string(lineno) + ": expected key = value");
    SetConfigValue(cfg, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open config " + path.string());
  return ParseConfig(in);
}

std::string WriteConfig(const RunConfig& cfg) {
  const ClipDims& d = cfg.corpus.dims;
  std::ostringstream out;
  out << "frame_resolution = " << d.frames << 'x' << d.height << 'x' << d.width << '\n'
      << "channels = " << d.channels << '\n'
      << "patch_size = " << cfg.patch.temporal_patch << 'x' << cfg.patch.spatial_patch << 'x'
      << cfg.patch.spatial_patch << '\n'
      << "num_blocks = " << cfg.patch.blocks << '\n'
      << "tokens_per_block = " << cfg.patch.tokens_per_block << '\n'
      << "grid_min = " << cfg.grid_min << '\n'
      << "grid_max = " << cfg.grid_max << '\n'
      << "grid_stride = " << cfg.grid_stride << '\n'
      << "sampler_mean = " << Num(cfg.sampler.mean) << '\n'
      << "sampler_std = " << Num(cfg.sampler.stddev) << '\n'
      << "sampler_min = " << cfg.sampler.min_tokens << '\n'
      << "sampler_max = " << cfg.sampler.max_tokens << '\n'
      << "max_iters = " << cfg.max_iters << '\n'
      << "relax_budget = " << (cfg.relax_budget ? "true" : "false") << '\n'
      << "codebook_size = " << cfg.codebook_size << '\n'
      << "codebook_dim = " << cfg.codebook_dim << '\n'
      << "batch_size = " << cfg.batch_size << '\n'
      << "threads = " << cfg.threads << '\n'
      << "seed = " << cfg.seed << '\n'
      << "joint = " << (cfg.joint ? "true" : "false") << '\n'
      << "budgets = " << Join(cfg.budgets, [](int v) { return std::to_string(v); }) << '\n'
      << "strategies = "
      << Join(cfg.strategies, [](Strategy s) { return std::string(StrategyName(s)); }) << '\n'
      << "metrics = "
      << Join(cfg.metrics, [](MetricKind m) { return std::string(MetricName(m)); }) << '\n'
      << "noise_levels = " << Join(cfg.noise_levels, Num) << '\n'
      << "noise_seeds = " << cfg.noise_seeds << '\n'
      << "corpus_clips = " << cfg.corpus.n_clips << '\n'
      << "corpus_seed = " << cfg.corpus.seed << '\n';
  std::vector<std::string> weights;
  for (std::size_t k = 0; k < cfg.corpus.weights.size(); ++k) {
    weights.push_back(std::string(SceneKindName(static_cast<SceneKind>(k))) + ':' +
                      Num(cfg.corpus.weights[k]));
  }
  out << "scene_weights = " << Join(weights, [](const std::string& s) { return s; }) << '\n'
      << "shape_count = " << cfg.corpus.shape_count << '\n'
      << "shape_speed = " << Num(cfg.corpus.shape_speed) << '\n'
      << "cut_position = " << cfg.corpus.cut_position << '\n';
  return out.str();
}

std::string ConfigHash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(HashName(WriteConfig(cfg))));
  return buf;
}

}  // namespace causaltok
