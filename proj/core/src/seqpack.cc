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

#include "causaltok/seqpack.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "causaltok/error.h"

namespace causaltok {

PackedSequence Pack(const std::vector<std::vector<int>>& blocks, const Vocabulary& vocab,
                    int max_block_length, std::span<const int> condition) {
  Require(vocab.codes >= 1 && vocab.condition_tokens >= 0, ErrorCode::kInvalidArgument,
          "vocabulary needs at least one code");
  PackedSequence seq;
  seq.vocab = vocab;
  seq.condition_length = static_cast<int>(condition.size());
  for (int id : condition) {
    Require(id >= 0 && id < vocab.size() && id != vocab.eob_id(), ErrorCode::kOutOfRange,
            "condition id " + std::to_string(id) + " outside vocabulary or equal to EOB");
    seq.ids.push_back(id);
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Require(static_cast<int>(blocks[b].size()) <= max_block_length, ErrorCode::kOutOfRange,
            "block " + std::to_string(b) + " holds " + std::to_string(blocks[b].size()) +
                " ids, more than " + std::to_string(max_block_length));
    for (int id : blocks[b]) {
      Require(id >= 0 && id < vocab.codes, ErrorCode::kOutOfRange,
              "code id " + std::to_string(id) + " outside [0, " +
                  std::to_string(vocab.codes) + ")");
      seq.ids.push_back(id);
    }
    seq.ids.push_back(vocab.eob_id());
  }
  return seq;
}

std::vector<std::vector<int>> Unpack(const PackedSequence& seq, int blocks) {
  Require(seq.condition_length >= 0 &&
              seq.condition_length <= static_cast<int>(seq.ids.size()),
          ErrorCode::kFormat, "condition prefix longer than sequence");
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  for (std::size_t i = static_cast<std::size_t>(seq.condition_length); i < seq.ids.size(); ++i) {
    const int id = seq.ids[i];
    if (id == seq.eob_id()) {
      out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(id);
    }
  }
  Require(current.empty() && static_cast<int>(out.size()) == blocks, ErrorCode::kFormat,
          "expected " + std::to_string(blocks) + " end-of-block markers, found " +
              std::to_string(out.size()) + (current.empty() ? "" : " plus trailing ids"));
  return out;
}

double NegativeLogLikelihood(const PackedSequence& seq, const TokenModel& model) {
  const std::span<const int> ids(seq.ids);
  double mean = 0.0;
  long n = 0;
  for (std::size_t i = static_cast<std::size_t>(seq.condition_length); i < ids.size(); ++i) {
    const std::vector<double> dist = model(ids.first(i));
    Require(static_cast<int>(dist.size()) == seq.vocab.size(), ErrorCode::kInvalidArgument,
            "model distribution size differs from vocabulary size");
    double total = 0.0;
    for (double p : dist) {
      Require(p >= 0.0 && std::isfinite(p), ErrorCode::kInvalidArgument,
              "model returned a negative or non-finite probability");
      total += p;
    }
    Require(std::abs(total - 1.0) <= 1e-9, ErrorCode::kInvalidArgument,
            "model distribution sums to " + std::to_string(total));
    const double loss = -std::log(dist[static_cast<std::size_t>(ids[i])]);
    ++n;
    mean += (loss - mean) / static_cast<double>(n);
  }
  return mean;
}

BigramModel::BigramModel(int vocab_size) : vocab_(vocab_size) {
  Require(vocab_size >= 1, ErrorCode::kInvalidArgument, "vocabulary must be non-empty");
  counts_.assign(static_cast<std::size_t>(vocab_ + 1) * vocab_, 0.0);
  totals_.assign(static_cast<std::size_t>(vocab_ + 1), 0.0);
}

void BigramModel::Fit(std::span<const int> sequence) {
  int prev = vocab_;
  for (int id : sequence) {
    Require(id >= 0 && id < vocab_, ErrorCode::kOutOfRange, "id outside vocabulary");
    counts_[static_cast<std::size_t>(prev) * vocab_ + id] += 1.0;
    totals_[static_cast<std::size_t>(prev)] += 1.0;
    prev = id;
  }
}

double BigramModel::Probability(int previous, int next) const {
  const int row = previous < 0 ? vocab_ : previous;
  return (counts_[static_cast<std::size_t>(row) * vocab_ + next] + 1.0) /
         (totals_[static_cast<std::size_t>(row)] + vocab_);
}

std::vector<double> BigramModel::Distribution(std::span<const int> prefix) const {
  const int prev = prefix.empty() ? -1 : prefix.back();
  std::vector<double> dist(static_cast<std::size_t>(vocab_));
  for (int j = 0; j < vocab_; ++j) dist[static_cast<std::size_t>(j)] = Probability(prev, j);
  return dist;
}

TokenModel BigramModel::AsModel() const {
  return [this](std::span<const int> prefix) { return Distribution(prefix); };
}

void WritePacked(std::ostream& out, const std::vector<PackedSequence>& seqs) {
  for (const PackedSequence& seq : seqs) {
    for (std::size_t i = 0; i < seq.ids.size(); ++i) {
      if (i) out << ' ';
      if (static_cast<int>(i) < seq.condition_length) out << '#';
      out << seq.ids[i];
    }
    out << '\n';
  }
}

std::vector<PackedSequence> ReadPacked(std::istream& in, const Vocabulary& vocab) {
  std::vector<PackedSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    PackedSequence seq;
    seq.vocab = vocab;
    std::istringstream ls(line);
    std::string tok;
    bool in_condition = true;
    while (ls >> tok) {
      const bool cond = tok[0] == '#';
      Require(!cond || in_condition, ErrorCode::kFormat,
              "condition ids must precede block ids");
      in_condition = cond;
      std::size_t used = 0;
      const std::string digits = cond ? tok.substr(1) : tok;
      int id = -1;
      try {
        id = std::stoi(digits, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      Require(used == digits.size() && !digits.empty() && id >= 0 && id < vocab.size(),
              ErrorCode::kFormat, "bad token '" + tok + "'");
      seq.ids.push_back(id);
      if (cond) ++seq.condition_length;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace causaltok
