// Copyright 2026 The hyqut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Corpus ingestion, the character-level tokenizer and the batch stream.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hyqut/model.hpp"

namespace hyqut::data {

/// Decodes UTF-8; invalid sequences raise IoError mentioning `line` when nonzero.
std::u32string decode_utf8(std::string_view text, std::size_t line = 0);
std::string encode_utf8(std::u32string_view text);

struct Corpus {
  std::vector<std::string> samples;
  std::string source;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

/// One sample per line; lines with max_chars or more code points are
/// dropped, blank lines are skipped. Unreadable files and invalid UTF-8
/// raise IoError (the latter with its line number).
Corpus ingest(const std::filesystem::path& path, std::size_t max_chars = 512);
Corpus ingest_text(std::string_view text, std::size_t max_chars = 512,
                   std::string source = "<memory>");

class Tokenizer {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kBos = 1;
  static constexpr std::int32_t kEos = 2;
  static constexpr std::int32_t kUnk = 3;
  static constexpr std::int32_t kNumSpecial = 4;

  /// Specials first, then every distinct character sorted by code point.
  static Tokenizer build(const Corpus& corpus);
  /// Rebuilds from the characters() string of another tokenizer.
  static Tokenizer from_characters(std::string_view utf8);

  std::size_t size() const { return chars_.size() + kNumSpecial; }
  /// The non-special vocabulary in id order, as UTF-8.
  std::string characters() const { return encode_utf8(chars_); }

  /// Characters outside the vocabulary map to kUnk.
  std::vector<std::int32_t> encode(std::string_view text) const;
  /// Specials are dropped, except UNK which decodes to U+FFFD.
  std::string decode(const std::vector<std::int32_t>& ids) const;

 private:
  std::u32string chars_;
};

struct Batch {
  TokenBatch inputs;                 // [B, L]
  std::vector<std::int32_t> targets;  // [B*L]; -1 where the next token is PAD
};

/// Every sample becomes [BOS, chars..., EOS]; the stream of each sample is
/// cut into windows of L+1 tokens overlapping by one and PAD-padded at the
/// end. Windows are visited in a seeded per-epoch permutation.
class BatchIterator {
 public:
  /// Throws UsageError when the corpus is empty or has fewer windows than B.
  BatchIterator(const Corpus& corpus, const Tokenizer& tok, std::size_t batch_size,
                std::size_t seq_len, std::uint64_t seed);

  std::size_t num_windows() const { return windows_.size(); }
  /// The batch used at zero-based training step `step`.
  Batch batch_at(std::size_t step) const;

 private:
  std::vector<std::size_t> permutation(std::size_t epoch) const;

  std::size_t batch_, seq_;
  std::uint64_t seed_;
  std::vector<std::vector<std::int32_t>> windows_;
};

}  // namespace hyqut::data
