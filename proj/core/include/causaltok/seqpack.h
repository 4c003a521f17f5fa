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

#ifndef CAUSALTOK_SEQPACK_H_
#define CAUSALTOK_SEQPACK_H_

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace causaltok {

// Vocabulary layout: [0, codes) are code ids, `codes` is the end-of-block
// marker, and ids above it are reserved for condition/class tokens.
struct Vocabulary {
  int codes = 8192;
  int condition_tokens = 0;

  int eob_id() const { return codes; }
  int size() const { return codes + 1 + condition_tokens; }
};

// Condition prefix followed by each block's ids and an end-of-block marker.
struct PackedSequence {
  std::vector<int> ids;
  int condition_length = 0;
  Vocabulary vocab;

  int eob_id() const { return vocab.eob_id(); }
};

// Throws kOutOfRange for ids outside the vocabulary, code ids >= codes inside
// blocks, condition ids equal to the marker, or blocks longer than
// max_block_length.
PackedSequence Pack(const std::vector<std::vector<int>>& blocks, const Vocabulary& vocab,
                    int max_block_length, std::span<const int> condition = {});

// Splits on the marker after stripping the condition prefix. Throws
// kFormat unless exactly `blocks` markers are present and the sequence ends
// with one.
std::vector<std::vector<int>> Unpack(const PackedSequence& seq, int blocks);

// Next-token distribution over the full vocabulary given everything before it
// (condition included).
using TokenModel = std::function<std::vector<double>(std::span<const int> prefix)>;

// Mean over non-condition positions of -log P(y_i | c, y_<i). The running mean
// is updated as m += (x - m) / n so identical per-token losses average to
// exactly that loss. Throws kInvalidArgument when the model returns a
// distribution of the wrong size or one that does not sum to 1 within 1e-9.
double NegativeLogLikelihood(const PackedSequence& seq, const TokenModel& model);

// Add-one smoothed bigram counts. The first token after an empty prefix is
// conditioned on a virtual start state.
class BigramModel {
 public:
  explicit BigramModel(int vocab_size);

  void Fit(std::span<const int> sequence);
  double Probability(int previous, int next) const;  // previous == -1: start
  std::vector<double> Distribution(std::span<const int> prefix) const;
  TokenModel AsModel() const;

 private:
  int vocab_;
  std::vector<double> counts_;  // (vocab + 1) x vocab, last row = start state
  std::vector<double> totals_;
};

// One sequence per line, space separated; condition ids carry a '#' prefix.
void WritePacked(std::ostream& out, const std::vector<PackedSequence>& seqs);
std::vector<PackedSequence> ReadPacked(std::istream& in, const Vocabulary& vocab);

}  // namespace causaltok

#endif  // CAUSALTOK_SEQPACK_H_
