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


// hyqut command-line tool. Exit codes: 0 success, 1 golden mismatch,
// 2 usage or config error, 3 numerical failure, 4 I/O error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hyqut/accounting.hpp"
#include "hyqut/checkpoint.hpp"
#include "hyqut/config.hpp"
#include "hyqut/data.hpp"
#include "hyqut/error.hpp"
#include "hyqut/model.hpp"
#include "hyqut/train.hpp"

namespace fs = std::filesystem;
using namespace hyqut;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<std::string> grad_mode;
  std::optional<double> delta;
  std::optional<std::string> replace;
  std::optional<std::string> expand_mode;
  std::optional<std::string> variant;

  void add_model_flags(CLI::App* app) {
    app->add_option("--replace", replace, "Replacement targets, e.g. \"Wq,FFN_gate\" or none");
    app->add_option("--expand-mode", expand_mode, "scalar | full");
    app->add_option("--variant", variant, "A8M | B150M");
  }
  void add_train_flags(CLI::App* app) {
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--steps", steps, "Total training steps");
    app->add_option("--grad-mode", grad_mode, "adjoint | fd");
    app->add_option("--delta", delta, "Finite-difference step in [1e-4, 1e-3]");
  }

  void apply(Config& c) const {
    if (replace) c.model.replace = ReplacementStrategy::parse(*replace);
    if (expand_mode) c.model.projector.expand_mode = qproj::parse_expand_mode(*expand_mode);
    if (variant) c.model.projector.variant = qproj::parse_variant(*variant);
    if (seed) c.train.seed = *seed;
    if (steps) c.train.total_steps = *steps;
    if (delta) c.train.fd_delta = *delta;
    if (grad_mode) {
      if (*grad_mode == "adjoint") c.train.grad_mode = GradMode::Adjoint;
      else if (*grad_mode == "fd") c.train.grad_mode = GradMode::FiniteDifference;
      else throw UsageError("--grad-mode: expected adjoint|fd, got '" + *grad_mode + "'");
    }
    c.model.validate();
    c.train.validate();
  }
};

Config load_config(const std::string& path, const Overrides& o) {
  Config c = Config::load(path);
  o.apply(c);
  return c;
}

data::Corpus load_corpus(const Config& c) {
  if (c.train.corpus.empty()) throw ConfigError("train.corpus is required for this command");
  auto corpus = data::ingest(c.train.corpus, c.train.max_chars);
  if (corpus.samples.empty()) throw UsageError("corpus " + c.train.corpus + " has no usable lines");
  return corpus;
}

void check_vocab(const Config& c, const data::Tokenizer& tok) {
  if (tok.size() > c.model.vocab_size)
    throw ConfigError("model.vocab_size = " + std::to_string(c.model.vocab_size) +
                      " is smaller than the corpus vocabulary (" + std::to_string(tok.size()) +
                      " ids including specials)");
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string config, out = "run", resume;
  std::size_t checkpoint_every = 0;
  bool quiet = false;
};

int cmd_train(const TrainOptions& opt, const Overrides& ov) {
  Config cfg = load_config(opt.config, ov);
  fs::create_directories(opt.out);
  auto corpus = load_corpus(cfg);

  std::optional<checkpoint::Checkpoint> ckpt;
  if (!opt.resume.empty()) ckpt = checkpoint::load(opt.resume);
  const auto tok = ckpt ? data::Tokenizer::from_characters(ckpt->vocabulary)
                        : data::Tokenizer::build(corpus);
  check_vocab(cfg, tok);

  Model model(cfg.model, cfg.train.seed);
  train::Trainer trainer(model, cfg.train);
  if (ckpt) checkpoint::restore(*ckpt, cfg, model, trainer.optimizer());
  data::BatchIterator batches(corpus, tok, cfg.train.batch_size, cfg.model.seq_len, cfg.train.seed);

  const std::size_t total = cfg.train.total_steps;
  train::LossLog log((fs::path(opt.out) / "loss.csv").string(),
                     ckpt ? std::optional<std::size_t>(trainer.steps_done()) : std::nullopt);
  const std::size_t every = std::max<std::size_t>(1, total / 20);
  std::optional<double> first;
  double last = 0.0;
  auto save = [&](const fs::path& path) {
    checkpoint::save(checkpoint::capture(model, trainer.optimizer(), cfg, tok.characters(),
                                         trainer.steps_done()),
                     path);
  };
  train::run(trainer, batches, total, [&](const train::StepResult& r) {
    log.write(r);
    if (!first) first = r.loss;
    last = r.loss;
    if (!opt.quiet && (r.step % every == 0 || r.step == total || r.step == 1))
      std::cout << "step " << r.step << "/" << total << "  lr " << r.lr << "  loss "
                << fixed(r.loss, 4) << "\n";
    if (opt.checkpoint_every && r.step % opt.checkpoint_every == 0)
      save(fs::path(opt.out) / ("checkpoint-" + std::to_string(r.step) + ".bin"));
  });
  save(fs::path(opt.out) / "checkpoint.bin");
  if (first)
    std::cout << "final loss " << fixed(last, 4) << " (first logged " << fixed(*first, 4) << ")\n";
  std::cout << "wrote " << (fs::path(opt.out) / "loss.csv").string() << " and "
            << (fs::path(opt.out) / "checkpoint.bin").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::string config, checkpoint, prompt;
  std::size_t max_new = 64;
  double temperature = 0.0;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateOptions& opt, const Overrides& ov) {
  Config cfg = load_config(opt.config, ov);
  std::optional<checkpoint::Checkpoint> ckpt;
  if (!opt.checkpoint.empty()) ckpt = checkpoint::load(opt.checkpoint);
  const auto tok = ckpt ? data::Tokenizer::from_characters(ckpt->vocabulary)
                        : data::Tokenizer::build(load_corpus(cfg));
  check_vocab(cfg, tok);
  Model model(cfg.model, cfg.train.seed);
  if (ckpt) {
    train::AdamState unused;
    checkpoint::restore(*ckpt, cfg, model, unused);
  }
  std::vector<std::int32_t> prompt{data::Tokenizer::kBos};
  for (auto id : tok.encode(opt.prompt)) prompt.push_back(id);
  const auto out = generate(prompt, model, opt.max_new, opt.temperature, opt.seed);
  std::vector<std::int32_t> text;
  for (auto id : out) {
    if (id == data::Tokenizer::kEos) break;
    text.push_back(id);
  }
  std::cout << tok.decode(text) << "\n";
  return 0;
}

// ---------------------------------------------------------------- accounting

std::vector<std::vector<std::string>> read_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read golden file " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct CountOptions {
  std::string config, golden;
  bool csv = false;
};

int cmd_count(const CountOptions& opt, const Overrides& ov) {
  Config cfg = load_config(opt.config, ov);
  const auto report = accounting::count_params(cfg.model);
  const auto rows = report.collapsed_rows();
  if (opt.csv) {
    std::cout << report.csv();
  } else {
    std::size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r[0].size());
    for (const auto& r : rows)
      std::cout << r[0] << std::string(w - r[0].size() + 2, ' ') << r[1] << "\t" << r[2] << "\t"
                << r[3] << "\n";
    std::cout << "total parameters: " << accounting::format_count(report.total) << "\n";
  }
  if (opt.golden.empty()) return 0;
  const auto expected = read_golden(opt.golden);
  std::vector<std::string> diffs;
  for (std::size_t i = 0; i < std::max(expected.size(), rows.size()); ++i) {
    auto join = [](const std::vector<std::string>& r) {
      std::string s;
      for (const auto& c : r) s += (s.empty() ? "" : " | ") + c;
      return s;
    };
    const std::string want = i < expected.size() ? join(expected[i]) : "<missing>";
    const std::string got = i < rows.size() ? join(rows[i]) : "<missing>";
    if (want != got) diffs.push_back("row " + std::to_string(i + 1) + ": expected " + want + "\n       got      " + got);
  }
  if (diffs.empty()) {
    std::cerr << "golden: all " << expected.size() << " rows match " << opt.golden << "\n";
    return 0;
  }
  for (const auto& d : diffs) std::cerr << d << "\n";
  std::cerr << "golden: " << diffs.size() << " mismatching rows\n";
  return 1;
}

int cmd_flops(const std::string& config, std::optional<std::size_t> seq_len, const Overrides& ov) {
  Config cfg = load_config(config, ov);
  const std::size_t L = seq_len.value_or(cfg.model.seq_len);
  const auto b = accounting::flops_breakdown(cfg.model, L);
  std::cout << "strategy              " << cfg.model.replace.label() << "\n"
            << "seq_len               " << L << "\n"
            << "weight MACs/token     " << fixed(b.weight_macs_per_token, 0) << "\n"
            << "attention MACs/token  " << fixed(b.attention_macs_per_token, 0) << "\n"
            << "FLOPs per sequence    " << fixed(b.total, 0) << " (" << fixed(b.total / 1e9, 3)
            << " B)\n"
            << "classical computation "
            << fixed(accounting::classical_percentage(cfg.model, cfg.model.replace, L), 2)
            << " %\n";
  return 0;
}

struct AblateOptions {
  std::string config, smoke_config;
  std::optional<std::size_t> smoke_steps;
};

int cmd_ablate(const AblateOptions& opt, const Overrides& ov) {
  Config cfg = load_config(opt.config, ov);
  const auto rows = accounting::ablation_rows(cfg.model);

  std::optional<Config> smoke;
  std::optional<data::Corpus> corpus;
  std::optional<data::Tokenizer> tok;
  if (!opt.smoke_config.empty()) {
    smoke = Config::load(opt.smoke_config);
    if (opt.smoke_steps) smoke->train.total_steps = *opt.smoke_steps;
    smoke->train.validate();
    corpus = load_corpus(*smoke);
    tok = data::Tokenizer::build(*corpus);
    check_vocab(*smoke, *tok);
  }

  std::printf("%-40s %14s %12s %10s %s\n", "strategy", "params (M)", "FLOPs (B)", "classical%",
              smoke ? "smoke (final/initial loss)" : "");
  for (const auto& r : rows) {
    std::string verdict;
    if (smoke) {
      Config c = *smoke;
      c.model.replace = r.strategy;
      c.model.validate();
      Model model(c.model, c.train.seed);
      train::Trainer trainer(model, c.train);
      data::BatchIterator batches(*corpus, *tok, c.train.batch_size, c.model.seq_len, c.train.seed);
      double first = 0.0, last = 0.0;
      try {
        train::run(trainer, batches, c.train.total_steps, [&](const train::StepResult& s) {
          if (s.step == 1) first = s.loss;
          last = s.loss;
        });
        verdict = (last < first ? "decreased " : "no decrease ") + fixed(last / first, 3);
      } catch (const NumericalError& e) {
        verdict = std::string("diverged (") + e.what() + ")";
      }
    }
    std::printf("%-40s %14s %12s %10s %s\n", r.strategy.label().c_str(),
                fixed(static_cast<double>(r.params) / 1e6, 3).c_str(),
                fixed(r.flops / 1e9, 1).c_str(), fixed(r.classical_percent, 2).c_str(),
                verdict.c_str());
  }
  return 0;
}

int cmd_gradcheck(int nq, int layers, const std::string& variant, std::uint64_t seed, double delta,
                  int circuits) {
  const auto ansatz = qproj::AnsatzDescriptor::make(qproj::parse_variant(variant), nq, layers);
  double worst = 0.0;
  std::uint64_t evals = 0;
  for (int i = 0; i < circuits; ++i) {
    const auto r = qproj::gradcheck(ansatz, seed + static_cast<std::uint64_t>(i), delta);
    worst = std::max(worst, r.max_rel_error);
    evals += r.loss_evaluations;
  }
  std::cout << "ansatz " << qproj::variant_name(ansatz.variant) << "  n_q " << nq << "  layers "
            << layers << "  params " << ansatz.trainable_param_count() << "  circuits " << circuits
            << "  fd evaluations " << evals << "\n";
  std::cout << "max relative error " << worst << "\n";
  if (worst >= 1e-5) {
    std::cerr << "gradient mismatch exceeds 1e-5\n";
    return 3;
  }
  return 0;
}

int cmd_export_loss(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw IoError("cannot read loss log " + in_path);
  std::ostringstream out;
  out << "# step        lr              loss\n";
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header) {
      header = false;
      if (line != train::LossLog::header()) throw IoError(in_path + " is not a loss log (bad header)");
      continue;
    }
    std::stringstream ss(line);
    std::string step, lr, loss;
    if (!std::getline(ss, step, ',') || !std::getline(ss, lr, ',') || !std::getline(ss, loss, ','))
      throw IoError(in_path + ": malformed row at line " + std::to_string(line_no));
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-8s %-15s %s\n", step.c_str(), lr.c_str(), loss.c_str());
    out << buf;
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot write " + out_path);
    f << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyqut: hybrid quantum-classical transformer toolkit"};
  app.require_subcommand(1);
  Overrides ov;

  TrainOptions train_opt;
  auto* train = app.add_subcommand("train", "Train a model on the configured corpus");
  train->add_option("--config", train_opt.config, "Config file")->required();
  train->add_option("--out", train_opt.out, "Output directory for loss.csv and checkpoints");
  train->add_option("--resume", train_opt.resume, "Checkpoint to resume from");
  train->add_option("--checkpoint-every", train_opt.checkpoint_every, "Also save every N steps");
  train->add_flag("--quiet", train_opt.quiet, "Only print the summary");
  ov.add_model_flags(train);
  ov.add_train_flags(train);

  GenerateOptions gen_opt;
  auto* gen = app.add_subcommand("generate", "Continue a prompt");
  gen->add_option("--config", gen_opt.config, "Config file")->required();
  gen->add_option("--checkpoint", gen_opt.checkpoint, "Trained checkpoint");
  gen->add_option("--prompt", gen_opt.prompt, "Prompt text");
  gen->add_option("--max-new", gen_opt.max_new, "Tokens to generate");
  gen->add_option("--temperature", gen_opt.temperature, "0 for greedy decoding");
  gen->add_option("--seed", gen_opt.seed, "Sampling seed");
  ov.add_model_flags(gen);

  CountOptions count_opt;
  auto* count = app.add_subcommand("count-params", "Per-tensor parameter report");
  count->add_option("--config", count_opt.config, "Config file")->required();
  count->add_option("--golden", count_opt.golden, "Tab-separated fixture to diff against");
  count->add_flag("--csv", count_opt.csv, "Emit CSV");
  ov.add_model_flags(count);

  std::string flops_config;
  std::optional<std::size_t> flops_seq;
  auto* flops = app.add_subcommand("flops", "FLOPs estimate for a config");
  flops->add_option("--config", flops_config, "Config file")->required();
  flops->add_option("--seq-len", flops_seq, "Sequence length (default: model.seq_len)");
  ov.add_model_flags(flops);

  AblateOptions ablate_opt;
  auto* ablate = app.add_subcommand("ablate", "Parameters and FLOPs for the seven replacement rows");
  ablate->add_option("--config", ablate_opt.config, "Config file")->required();
  ablate->add_option("--smoke-config", ablate_opt.smoke_config,
                     "Train this small config once per row and report the loss ratio");
  ablate->add_option("--smoke-steps", ablate_opt.smoke_steps, "Steps per smoke run");
  ov.add_model_flags(ablate);

  int gc_nq = 4, gc_layers = 2, gc_circuits = 1;
  std::uint64_t gc_seed = 0;
  double gc_delta = 1e-4;
  std::string gc_variant = "B150M";
  auto* gc = app.add_subcommand("gradcheck", "Adjoint vs central-difference circuit gradients");
  gc->add_option("--nq", gc_nq, "Qubits")->check(CLI::Range(1, 14));
  gc->add_option("--layers", gc_layers, "Ansatz layers")->check(CLI::PositiveNumber);
  gc->add_option("--variant", gc_variant, "A8M | B150M");
  gc->add_option("--seed", gc_seed, "Seed of the first circuit");
  gc->add_option("--delta", gc_delta, "Finite-difference step in [1e-4, 1e-3]");
  gc->add_option("--circuits", gc_circuits, "Number of random circuits")->check(CLI::PositiveNumber);

  std::string export_in, export_out;
  auto* exp = app.add_subcommand("export-loss", "Loss CSV to a plain whitespace table");
  exp->add_option("--in", export_in, "loss.csv")->required();
  exp->add_option("--out", export_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*train) return cmd_train(train_opt, ov);
    if (*gen) return cmd_generate(gen_opt, ov);
    if (*count) return cmd_count(count_opt, ov);
    if (*flops) return cmd_flops(flops_config, flops_seq, ov);
    if (*ablate) return cmd_ablate(ablate_opt, ov);
    if (*gc) return cmd_gradcheck(gc_nq, gc_layers, gc_variant, gc_seed, gc_delta, gc_circuits);
    if (*exp) return cmd_export_loss(export_in, export_out);
  } catch (const std::invalid_argument& e) {  // UsageError, ConfigError
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
