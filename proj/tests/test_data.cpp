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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "hyqut/config.hpp"
#include "hyqut/data.hpp"
#include "hyqut/error.hpp"

#ifndef HYQUT_SOURCE_DIR
#define HYQUT_SOURCE_DIR "."
#endif

namespace hyqut {
namespace {

namespace fs = std::filesystem;
using data::Tokenizer;

fs::path write_file(const std::string& name, const std::string& content) {
  auto dir = fs::temp_directory_path() / "hyqut_test_data";
  fs::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

// ---- ingestion ------------------------------------------------------------------

TEST(Ingest, LinesAtOrAboveTheLimitAreDropped) {
  std::string text;
  for (std::size_t len : {10u, 511u, 512u, 600u}) text += std::string(len, 'x') + "\n";
  auto c = data::ingest(write_file("lengths.txt", text));
  EXPECT_EQ(c.kept, 2u);
  EXPECT_EQ(c.dropped, 2u);
  ASSERT_EQ(c.samples.size(), 2u);
  EXPECT_EQ(c.samples[0].size(), 10u);
  EXPECT_EQ(c.samples[1].size(), 511u);
}

TEST(Ingest, LimitCountsCodePointsNotBytes) {
  std::string wide;
  for (int i = 0; i < 300; ++i) wide += "\xc3\xa9";  // 300 code points, 600 bytes
  auto c = data::ingest_text(wide + "\n");
  EXPECT_EQ(c.kept, 1u);
}

TEST(Ingest, BlankLinesAndCarriageReturnsAreHandled) {
  auto c = data::ingest_text("one\r\n\n\ntwo\n");
  EXPECT_EQ(c.samples, (std::vector<std::string>{"one", "two"}));
  EXPECT_EQ(c.dropped, 0u);
}

TEST(Ingest, EmptyFileGivesEmptyCorpus) {
  auto c = data::ingest(write_file("empty.txt", ""));
  EXPECT_TRUE(c.samples.empty());
  Tokenizer tok = Tokenizer::build(c);
  EXPECT_THROW(data::BatchIterator(c, tok, 1, 4, 0), UsageError);
}

TEST(Ingest, InvalidUtf8ReportsTheLine) {
  auto p = write_file("bad.txt", "fine\nalso fine\nbro\xffken\n");
  try {
    data::ingest(p);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(data::decode_utf8("\xc3"), IoError);
  EXPECT_THROW(data::decode_utf8("\xc0\xaf"), IoError);  // overlong
}

TEST(Ingest, MissingFileIsIoError) {
  EXPECT_THROW(data::ingest("/nonexistent/corpus.txt"), IoError);
}

TEST(Utf8, RoundTrip) {
  const std::string s = "a\xc3\xa9\xe2\x82\xac\xf0\x9f\x98\x80";
  auto u = data::decode_utf8(s);
  EXPECT_EQ(u, (std::u32string{U'a', U'é', U'€', U'\U0001F600'}));
  EXPECT_EQ(data::encode_utf8(u), s);
}

// ---- tokenizer ------------------------------------------------------------------

TEST(Tokenizer, SpecialsThenSortedCharacters) {
  auto tok = Tokenizer::build(data::ingest_text("ba\nab\n"));
  EXPECT_EQ(tok.size(), 6u);
  EXPECT_EQ(tok.characters(), "ab");
  EXPECT_EQ(tok.encode("ab"), (std::vector<std::int32_t>{4, 5}));
}

TEST(Tokenizer, RoundTripsCorpusText) {
  const std::string text = "hello, w\xc3\xb6rld";
  auto tok = Tokenizer::build(data::ingest_text(text));
  EXPECT_EQ(tok.decode(tok.encode(text)), text);
  auto again = Tokenizer::from_characters(tok.characters());
  EXPECT_EQ(again.encode(text), tok.encode(text));
}

TEST(Tokenizer, UnknownCharactersAndSpecials) {
  auto tok = Tokenizer::build(data::ingest_text("ab"));
  EXPECT_EQ(tok.encode("az"), (std::vector<std::int32_t>{4, Tokenizer::kUnk}));
  EXPECT_EQ(tok.decode({Tokenizer::kBos, 4, Tokenizer::kUnk, Tokenizer::kEos, Tokenizer::kPad}),
            "a\xef\xbf\xbd");
}

// ---- batches ---------------------------------------------------------------------

struct Fixture {
  data::Corpus corpus = data::ingest_text("abcdefghij\nklm\nnopqrstuvwxyz\nab\ncd\nef\n");
  Tokenizer tok = Tokenizer::build(corpus);
};

TEST(Batches, SameSeedSameBatches) {
  Fixture f;
  data::BatchIterator a(f.corpus, f.tok, 2, 4, 9), b(f.corpus, f.tok, 2, 4, 9);
  for (std::size_t s = 0; s < 20; ++s) {
    EXPECT_EQ(a.batch_at(s).inputs.ids, b.batch_at(s).inputs.ids);
    EXPECT_EQ(a.batch_at(s).targets, b.batch_at(s).targets);
  }
  data::BatchIterator c(f.corpus, f.tok, 2, 4, 10);
  bool differs = false;
  for (std::size_t s = 0; s < 20; ++s) differs |= a.batch_at(s).inputs.ids != c.batch_at(s).inputs.ids;
  EXPECT_TRUE(differs);
}

TEST(Batches, TargetsAreInputsShiftedByOne) {
  Fixture f;
  const std::size_t B = 3, L = 5;
  data::BatchIterator it(f.corpus, f.tok, B, L, 1);
  for (std::size_t s = 0; s < 10; ++s) {
    auto b = it.batch_at(s);
    ASSERT_EQ(b.inputs.ids.size(), B * L);
    for (std::size_t r = 0; r < B; ++r)
      for (std::size_t t = 0; t + 1 < L; ++t) {
        const auto tgt = b.targets[r * L + t];
        const auto next = b.inputs.ids[r * L + t + 1];
        if (next == Tokenizer::kPad)
          EXPECT_EQ(tgt, -1);
        else
          EXPECT_EQ(tgt, next);
      }
  }
}

TEST(Batches, EverySampleIsFramedAndPaddingIsIgnored) {
  auto corpus = data::ingest_text("ab\n");
  auto tok = Tokenizer::build(corpus);
  data::BatchIterator it(corpus, tok, 1, 6, 0);
  ASSERT_EQ(it.num_windows(), 1u);
  auto b = it.batch_at(0);
  EXPECT_EQ(b.inputs.ids, (std::vector<std::int32_t>{1, 4, 5, 2, 0, 0}));
  EXPECT_EQ(b.targets, (std::vector<std::int32_t>{4, 5, 2, -1, -1, -1}));
}

TEST(Batches, EachEpochVisitsEveryWindowOnce) {
  Fixture f;
  data::BatchIterator it(f.corpus, f.tok, 1, 3, 4);
  const std::size_t n = it.num_windows();
  std::set<std::vector<std::int32_t>> seen;
  for (std::size_t s = 0; s < n; ++s) {
    auto b = it.batch_at(s);
    auto row = b.inputs.ids;
    row.insert(row.end(), b.targets.begin(), b.targets.end());
    seen.insert(row);
  }
  EXPECT_EQ(seen.size(), n);
}

TEST(Batches, BatchLargerThanCorpusIsUsageError) {
  auto corpus = data::ingest_text("ab\n");
  auto tok = Tokenizer::build(corpus);
  EXPECT_THROW(data::BatchIterator(corpus, tok, 4, 8, 0), UsageError);
}

// ---- configuration ------------------------------------------------------------------

TEST(Config, ToyConfigLoadsAndValidates) {
  auto cfg = Config::load(std::string(HYQUT_SOURCE_DIR) + "/configs/toy.cfg");
  EXPECT_EQ(cfg.model.hidden_size, 32u);
  EXPECT_EQ(cfg.model.replace, (ReplacementStrategy{Target::FfnGate}));
  EXPECT_EQ(cfg.model.projector.n_qubits, 4);
  EXPECT_TRUE(fs::exists(cfg.train.corpus)) << cfg.train.corpus;
  cfg.model.validate();
  cfg.train.validate();
}

TEST(Config, PresetFilesMatchBuiltInPresets) {
  const std::string dir = std::string(HYQUT_SOURCE_DIR) + "/configs/";
  EXPECT_EQ(Config::load(dir + "hyqut8m.cfg").model, ModelConfig::hybrid_8m());
  EXPECT_EQ(Config::load(dir + "classic8m.cfg").model, ModelConfig::classic_8m());
  EXPECT_EQ(Config::load(dir + "hyqut150m.cfg").model, ModelConfig::hybrid_150m());
  EXPECT_EQ(Config::load(dir + "classic150m.cfg").model, ModelConfig::classic_150m());
}

TEST(Config, TextRoundTrip) {
  auto cfg = Config::load(std::string(HYQUT_SOURCE_DIR) + "/configs/toy.cfg");
  cfg.train.grad_mode = GradMode::FiniteDifference;
  cfg.train.dropout = 0.125;
  cfg.model.projector.per_head = true;
  EXPECT_EQ(Config::parse(cfg.to_text()), cfg);
}

TEST(Config, UnknownKeysAndSectionsAreRejectedByName) {
  try {
    Config::parse("[model]\nhidden_sise = 4\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("hidden_sise"), std::string::npos);
  }
  EXPECT_THROW(Config::parse("[modle]\nhidden_size = 4\n"), ConfigError);
  EXPECT_THROW(Config::parse("[model]\nhidden_size = four\n"), ConfigError);
  EXPECT_THROW(Config::parse("[model]\nreplace = [Wz]\n"), ConfigError);
  EXPECT_THROW(Config::parse("[projector]\nvariant = C\n"), ConfigError);
}

TEST(Config, CommentsAreIgnored) {
  auto cfg = Config::parse("# leading\n[model]\n; alt comment\nhidden_size = 64\n");
  EXPECT_EQ(cfg.model.hidden_size, 64u);
}

TEST(Config, ValidationNamesTheField) {
  ModelConfig m = ModelConfig::hybrid_8m();
  m.num_key_value_heads = 3;
  EXPECT_THROW(m.validate(), ConfigError);
  m = ModelConfig::hybrid_8m();
  m.projector.n_qubits = 15;
  EXPECT_THROW(m.validate(), ConfigError);
  TrainConfig t;
  t.dropout = 1.0;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Config, ReplacementStrategyParsingAndLabels) {
  auto s = ReplacementStrategy::parse("wq, ffn_gate");
  EXPECT_EQ(s, (ReplacementStrategy{Target::Wq, Target::FfnGate}));
  EXPECT_EQ(s.to_string(), "[Wq, FFN_gate]");
  EXPECT_TRUE(ReplacementStrategy::parse("none").empty());
  EXPECT_TRUE(ReplacementStrategy::parse("[]").empty());
  auto rows = ablation_strategies();
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].label(), "None (Classical Baseline)");
  EXPECT_EQ(rows[6].label(), "All Linear Layers");
}

TEST(Config, ArchitectureDiffListsChangedFields) {
  Config a, b;
  b.model.num_hidden_layers = 3;
  b.model.projector.variant = qproj::AnsatzVariant::B150M;
  b.train.seed = 77;  // training fields are not architecture
  auto diff = architecture_diff(a, b);
  ASSERT_EQ(diff.size(), 2u);
  EXPECT_EQ(diff[0], "model.num_hidden_layers: 2 -> 3");
  EXPECT_TRUE(architecture_diff(a, a).empty());
}

}  // namespace
}  // namespace hyqut
