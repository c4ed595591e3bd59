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


#include "hyqut/data.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "hyqut/error.hpp"
#include "hyqut/tensor.hpp"

namespace hyqut::data {

namespace {

[[noreturn]] void bad_utf8(std::size_t line, std::size_t offset) {
  std::string where = line ? "line " + std::to_string(line) + ", " : std::string();
  throw IoError("invalid UTF-8 at " + where + "byte " + std::to_string(offset));
}

}  // namespace

std::u32string decode_utf8(std::string_view s, std::size_t line) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      bad_utf8(line, i);
    }
    if (i + len > s.size()) bad_utf8(line, i);
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) bad_utf8(line, i);
      cp = (cp << 6) | (cc & 0x3f);
    }
    // overlong forms, surrogates and values past U+10FFFF
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) bad_utf8(line, i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xc0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xe0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
      out += static_cast<char>(0xf0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    }
  }
  return out;
}

Corpus ingest_text(std::string_view text, std::size_t max_chars, std::string source) {
  Corpus c;
  c.source = std::move(source);
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto chars = decode_utf8(line, line_no);
    if (chars.size() < max_chars) {
      c.samples.emplace_back(line);
      ++c.kept;
    } else {
      ++c.dropped;
    }
  }
  return c;
}

Corpus ingest(const std::filesystem::path& path, std::size_t max_chars) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading corpus " + path.string());
  return ingest_text(buf.str(), max_chars, path.string());
}

Tokenizer Tokenizer::build(const Corpus& corpus) {
  std::u32string all;
  for (const auto& s : corpus.samples) all += decode_utf8(s);
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  Tokenizer t;
  t.chars_ = std::move(all);
  return t;
}

Tokenizer Tokenizer::from_characters(std::string_view utf8) {
  Tokenizer t;
  t.chars_ = decode_utf8(utf8);
  if (!std::is_sorted(t.chars_.begin(), t.chars_.end()) ||
      std::adjacent_find(t.chars_.begin(), t.chars_.end()) != t.chars_.end())
    throw IoError("vocabulary must be strictly sorted by code point");
  return t;
}

std::vector<std::int32_t> Tokenizer::encode(std::string_view text) const {
  std::vector<std::int32_t> ids;
  for (char32_t cp : decode_utf8(text)) {
    auto it = std::lower_bound(chars_.begin(), chars_.end(), cp);
    ids.push_back(it != chars_.end() && *it == cp
                      ? static_cast<std::int32_t>(it - chars_.begin()) + kNumSpecial
                      : kUnk);
  }
  return ids;
}

std::string Tokenizer::decode(const std::vector<std::int32_t>& ids) const {
  std::u32string out;
  for (auto id : ids) {
    if (id == kUnk) out.push_back(U'�');
    if (id < kNumSpecial || static_cast<std::size_t>(id) >= size()) continue;
    out.push_back(chars_[static_cast<std::size_t>(id - kNumSpecial)]);
  }
  return encode_utf8(out);
}

BatchIterator::BatchIterator(const Corpus& corpus, const Tokenizer& tok, std::size_t batch_size,
                             std::size_t seq_len, std::uint64_t seed)
    : batch_(batch_size), seq_(seq_len), seed_(seed) {
  if (corpus.samples.empty()) throw UsageError("corpus is empty");
  if (batch_size == 0 || seq_len == 0) throw UsageError("batch size and seq_len must be positive");
  for (const auto& s : corpus.samples) {
    std::vector<std::int32_t> stream{Tokenizer::kBos};
    for (auto id : tok.encode(s)) stream.push_back(id);
    stream.push_back(Tokenizer::kEos);
    for (std::size_t start = 0; start + 1 < stream.size(); start += seq_len) {
      std::vector<std::int32_t> w(seq_len + 1, Tokenizer::kPad);
      const std::size_t n = std::min(seq_len + 1, stream.size() - start);
      std::copy_n(stream.begin() + static_cast<std::ptrdiff_t>(start), n, w.begin());
      windows_.push_back(std::move(w));
    }
  }
  if (windows_.size() < batch_size)
    throw UsageError("batch_size " + std::to_string(batch_size) + " exceeds the " +
                     std::to_string(windows_.size()) + " training windows in the corpus");
}

std::vector<std::size_t> BatchIterator::permutation(std::size_t epoch) const {
  std::vector<std::size_t> p(windows_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
  std::mt19937_64 rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (epoch + 1)));
  for (std::size_t i = p.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(p[i - 1], p[std::min(j, i - 1)]);
  }
  return p;
}

Batch BatchIterator::batch_at(std::size_t step) const {
  Batch b;
  b.inputs.batch = batch_;
  b.inputs.seq = seq_;
  b.inputs.ids.reserve(batch_ * seq_);
  b.targets.reserve(batch_ * seq_);
  const std::size_t W = windows_.size();
  std::size_t cached_epoch = static_cast<std::size_t>(-1);
  std::vector<std::size_t> perm;
  for (std::size_t i = 0; i < batch_; ++i) {
    const std::size_t g = step * batch_ + i;
    if (g / W != cached_epoch) {
      cached_epoch = g / W;
      perm = permutation(cached_epoch);
    }
    const auto& w = windows_[perm[g % W]];
    for (std::size_t t = 0; t < seq_; ++t) {
      b.inputs.ids.push_back(w[t]);
      b.targets.push_back(w[t + 1] == Tokenizer::kPad ? -1 : w[t + 1]);
    }
  }
  return b;
}

}  // namespace hyqut::data
