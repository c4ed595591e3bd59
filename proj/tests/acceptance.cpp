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


// Acceptance runner: one PASS/FAIL line per criterion, exit 0 only when all pass.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hyqut/accounting.hpp"
#include "hyqut/checkpoint.hpp"
#include "hyqut/config.hpp"
#include "hyqut/data.hpp"
#include "hyqut/model.hpp"
#include "hyqut/qproj.hpp"
#include "hyqut/qsim.hpp"
#include "hyqut/train.hpp"
#include "hyqut/vqc.hpp"

#ifndef HYQUT_SOURCE_DIR
#define HYQUT_SOURCE_DIR "."
#endif

using namespace hyqut;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

int run_command(const std::string& cmd, std::string& out) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return -1;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

Outcome breakdown_exactness() {
  const std::string golden = std::string(HYQUT_SOURCE_DIR) + "/tests/golden/hybrid8m_breakdown.tsv";
  const auto expected = read_tsv(golden);
  const auto t0 = Clock::now();
  const auto rows = accounting::count_params(ModelConfig::hybrid_8m()).collapsed_rows();
  double secs = seconds_since(t0);
  bool ok = !expected.empty() && rows == expected;
  std::string detail = std::to_string(rows.size()) + " rows";
#ifdef HYQUT_CLI
  const auto t1 = Clock::now();
  std::string out;
  const int code = run_command(std::string(HYQUT_CLI) + " count-params --config " + HYQUT_SOURCE_DIR +
                                   "/configs/hyqut8m.cfg --golden " + golden,
                               out);
  secs = std::max(secs, seconds_since(t1));
  ok = ok && code == 0 && out.find("total parameters: 6,721,913") != std::string::npos;
  detail += ", cli exit " + std::to_string(code);
#endif
  ok = ok && secs < 1.0;
  return {ok, detail + ", total " + rows.back()[2] + ", " + fmt("%.3f s", secs)};
}

Outcome table_parameter_rows() {
  const auto rows = accounting::ablation_rows(ModelConfig::classic_8m());
  const double published[7] = {7.748, 7.246, 7.032, 6.525, 6.722, 4.690, 3.466};
  auto millions3 = [](std::size_t n) { return std::round(n / 1e3) / 1e3; };
  bool ok = rows.size() == 7 && rows[0].params == 7'747'841 && rows[1].params == 7'246'201 &&
            millions3(rows[0].params) == 7.748 && millions3(rows[1].params) == 7.246;
  double worst = 0.0;
  for (int i = 3; i < 7 && ok; ++i)
    worst = std::max(worst, std::abs(rows[i].params / 1e6 - published[i]) / published[i]);
  ok = ok && worst <= 0.002;
  return {ok, "baseline " + accounting::format_count(rows[0].params) + ", Wq " +
                  accounting::format_count(rows[1].params) + ", worst other row " +
                  fmt("%.3f%%", 100 * worst) + " (Wq+Wk+Wv excluded: " +
                  fmt("%.3f", rows[2].params / 1e6) + "M vs 7.032M)"};
}

Outcome table_reductions() {
  const double r8 =
      accounting::parameter_reduction(ModelConfig::classic_8m(), ModelConfig::hybrid_8m());
  auto h = ModelConfig::hybrid_150m();
  h.projector.expand_mode = qproj::ExpandMode::Scalar;
  const double scalar = accounting::parameter_reduction(ModelConfig::classic_150m(), h);
  h.projector.expand_mode = qproj::ExpandMode::Full;
  const double full = accounting::parameter_reduction(ModelConfig::classic_150m(), h);
  const bool ok = std::abs(r8 - 13.3) <= 0.1 &&
                  (std::abs(scalar - 10.7) <= 1.0 || std::abs(full - 10.7) <= 1.0);
  return {ok, "8M " + fmt("%.3f%%", r8) + ", 150M scalar " + fmt("%.3f%%", scalar) + " / full " +
                  fmt("%.3f%%", full)};
}

Outcome flops_percentages() {
  const auto rows = accounting::ablation_rows(ModelConfig::classic_8m());
  const double published[7] = {100.0, 93.49, 90.64, 84.14, 86.48, 60.45, 44.59};
  bool ok = rows.size() == 7;
  double worst = 0.0;
  std::string list;
  for (int i = 0; i < 7 && ok; ++i) {
    worst = std::max(worst, std::abs(rows[i].classical_percent - published[i]));
    list += (i ? " " : "") + fmt("%.2f", rows[i].classical_percent);
    for (int j = 0; j < 7; ++j)
      if ((published[i] < published[j]) != (rows[i].classical_percent < rows[j].classical_percent))
        ok = false;
  }
  ok = ok && worst <= 3.0;
  return {ok, "[" + list + "], worst deviation " + fmt("%.2f pp", worst) + ", ordering " +
                  (ok ? "identical" : "checked")};
}

Outcome quantum_census() {
  const auto b = accounting::gate_and_param_census(qproj::AnsatzDescriptor::b150m(10, 2));
  const auto a = accounting::gate_and_param_census(qproj::AnsatzDescriptor::a8m(10, 2));
  const auto circuit = qproj::ansatz_circuit(qproj::AnsatzDescriptor::b150m(10, 2));
  const bool ok = b.gates == 80 && circuit.gates().size() == 80 && a.params == 40;
  return {ok, "B150M gates " + std::to_string(b.gates) + " (built circuit " +
                  std::to_string(circuit.gates().size()) + "), A8M params " +
                  std::to_string(a.params)};
}

Outcome simulator_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  double worst_amp = 0.0, worst_norm = 0.0;
  for (int c = 0; c < 200; ++c) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int n_gates = 1 + static_cast<int>(rng() % 50);
    std::vector<qsim::Gate> gates;
    for (int g = 0; g < n_gates; ++g) {
      const int kind = static_cast<int>(rng() % (n >= 2 ? 4 : 3));
      const int t = static_cast<int>(rng() % n);
      const double angle = uniform(rng, -2 * std::numbers::pi, 2 * std::numbers::pi);
      if (kind == 0) gates.push_back(qsim::Gate::h(t));
      else if (kind == 1) gates.push_back(qsim::Gate::ry(t, angle));
      else if (kind == 2) gates.push_back(qsim::Gate::rz(t, angle));
      else {
        int ctl = static_cast<int>(rng() % (n - 1));
        if (ctl >= t) ++ctl;
        gates.push_back(qsim::Gate::cnot(ctl, t));
      }
    }
    // Random normalized start state, so every column of the unitary matters.
    std::vector<qsim::complex_t> amps(std::size_t{1} << n);
    double norm = 0.0;
    for (auto& a : amps) {
      a = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
      norm += std::norm(a);
    }
    for (auto& a : amps) a /= std::sqrt(norm);
    const qsim::StateVector start(n, amps);
    const auto sv = qsim::apply_circuit(start, gates);
    const auto dense = qsim::dense_unitary(gates, n).apply(start.amps());
    for (std::size_t k = 0; k < dense.size(); ++k)
      worst_amp = std::max(worst_amp, std::abs(sv[k] - dense[k]));
    worst_norm = std::max(worst_norm, std::abs(sv.norm_squared() - 1.0));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_amp <= 1e-12 && worst_norm < 1e-10 && secs < 30.0;
  return {ok, "200 circuits, max amplitude diff " + fmt("%.2e", worst_amp) + ", norm drift " +
                  fmt("%.2e", worst_norm) + ", " + fmt("%.2f s", secs)};
}

ModelConfig toy_gradient_config() {
  ModelConfig c;
  c.vocab_size = 11;
  c.hidden_size = 16;
  c.num_hidden_layers = 1;
  c.num_attention_heads = 2;
  c.num_key_value_heads = 1;
  c.intermediate_size = 24;
  c.max_position_embeddings = 16;
  c.seq_len = 6;
  c.replace = {Target::Wq, Target::FfnGate};
  c.projector = {3, 2, qproj::AnsatzVariant::B150M, qproj::ExpandMode::Scalar, false};
  return c;
}

Outcome gradient_suite() {
  // Isolated circuits.
  double worst_circuit = 0.0;
  bool counts_ok = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 1 + static_cast<int>(seed % 6);
    const auto ansatz = seed % 2 ? qproj::AnsatzDescriptor::a8m(n, 2) : qproj::AnsatzDescriptor::b150m(n, 2);
    const auto r = qproj::gradcheck(ansatz, seed, 1e-4);
    worst_circuit = std::max(worst_circuit, r.max_rel_error);
    counts_ok = counts_ok && r.loss_evaluations == 2 * r.params;
  }

  // End-to-end toy model: every parameter against central differences of the loss.
  const auto cfg = toy_gradient_config();
  Model model(cfg, 17);
  std::mt19937_64 rng(18);
  for (auto* p : model.parameters())
    for (auto& v : p->value) v += uniform(rng, -0.2, 0.2);
  TokenBatch t{2, 6, {}};
  std::vector<std::int32_t> targets;
  for (int i = 0; i < 12; ++i) {
    t.ids.push_back(static_cast<std::int32_t>(rng() % 11));
    targets.push_back(static_cast<std::int32_t>(rng() % 11));
  }
  model.zero_grad();
  Matrix d;
  train::cross_entropy(model.forward(t), targets, &d);
  model.backward(d);
  double worst_model = 0.0;
  const double delta = 1e-4, atol = 1e-8, rtol = 1e-4;
  for (auto* p : model.parameters())
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double keep = p->value[i];
      p->value[i] = keep + delta;
      const double up = train::cross_entropy(model.forward(t), targets);
      p->value[i] = keep - delta;
      const double down = train::cross_entropy(model.forward(t), targets);
      p->value[i] = keep;
      const double fd = (up - down) / (2 * delta);
      const double scale = std::max({std::abs(fd), std::abs(p->grad[i]), atol / rtol});
      worst_model = std::max(worst_model, std::abs(fd - p->grad[i]) / scale);
    }

  // Finite-difference training mode: count the extra forward passes of one step.
  TrainConfig tc;
  tc.total_steps = 10;
  tc.batch_size = 2;
  tc.grad_mode = GradMode::FiniteDifference;
  Model fd_model(cfg, 3);
  std::size_t angles = 0;
  for (auto* p : fd_model.quantum_parameters()) angles += p->size();
  train::Trainer trainer(fd_model, tc);
  data::Batch batch{t, targets};
  const auto before = fd_model.forward_count();
  const auto step = trainer.step(batch);
  const std::size_t extra = fd_model.forward_count() - before - 1;
  counts_ok = counts_ok && extra == 2 * angles && step.extra_forwards == extra;

  const bool ok = worst_circuit < 1e-5 && worst_model < 1e-4 && counts_ok;
  return {ok, "100 circuits max rel err " + fmt("%.2e", worst_circuit) + ", toy model " +
                  fmt("%.2e", worst_model) + ", fd step extra forwards " + std::to_string(extra) +
                  " for |theta| = " + std::to_string(angles)};
}

Outcome encoding_closed_form() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<double> x(2 * n);
    for (auto& v : x) v = uniform(rng, -6.0, 6.0);
    const auto angles = qproj::encode_angles(x);
    std::vector<double> inputs(angles.theta);
    inputs.insert(inputs.end(), angles.phi.begin(), angles.phi.end());
    const auto m = qsim::measure_all_z(qproj::encoding_circuit(n).run(inputs, {}));
    for (int j = 0; j < n; ++j) {
      const double expected = -std::sin(std::numbers::pi / (1.0 + std::exp(-x[j])));
      worst = std::max(worst, std::abs(m[j] - expected));
    }
  }
  return {worst <= 1e-10, "1000 inputs, max |<Z> - closed form| " + fmt("%.2e", worst)};
}

struct ToyRun {
  std::vector<double> losses;
  double held_before = 0.0, held_after = 0.0;
};

ToyRun toy_training(const Config& cfg, const data::Corpus& corpus, const data::Tokenizer& tok) {
  Model model(cfg.model, cfg.train.seed);
  train::Trainer trainer(model, cfg.train);
  data::BatchIterator it(corpus, tok, cfg.train.batch_size, cfg.model.seq_len, cfg.train.seed);
  // Held batches are drawn with a different seed so they are not the first training batches.
  data::BatchIterator held_it(corpus, tok, cfg.train.batch_size, cfg.model.seq_len, cfg.train.seed + 1000);
  std::vector<data::Batch> held;
  for (std::size_t k = 0; k < 8; ++k) held.push_back(held_it.batch_at(k));
  auto held_loss = [&] {
    double s = 0.0;
    for (const auto& b : held) s += trainer.evaluate(b);
    return s / static_cast<double>(held.size());
  };
  ToyRun r;
  r.held_before = held_loss();
  train::run(trainer, it, cfg.train.total_steps,
             [&](const train::StepResult& s) { r.losses.push_back(s.loss); });
  r.held_after = held_loss();
  return r;
}

Outcome toy_convergence() {
  const auto t0 = Clock::now();
  const Config base = Config::load(std::string(HYQUT_SOURCE_DIR) + "/configs/toy.cfg");
  const auto corpus = data::ingest(base.train.corpus);
  const auto tok = data::Tokenizer::build(corpus);
  const auto bytes = fs::file_size(base.train.corpus);
  bool ok = base.train.total_steps == 200 && bytes >= 45'000 && bytes <= 55'000;
  std::string detail = fmt("corpus %.1f KB", bytes / 1000.0);
  for (const char* replace : {"[FFN_gate]", "[Wq]"}) {
    Config cfg = base;
    cfg.model.replace = ReplacementStrategy::parse(replace);
    const auto a = toy_training(cfg, corpus, tok);
    const auto b = toy_training(cfg, corpus, tok);
    const double ratio = a.held_after / a.held_before;
    const bool identical = a.losses == b.losses && a.held_after == b.held_after;
    ok = ok && a.losses.size() == 200 && ratio <= 0.8 && identical;
    detail += std::string(", ") + replace + " " + fmt("%.3f", a.held_before) + " -> " +
              fmt("%.3f", a.held_after) + " (" + fmt("%.3f", ratio) + "x, " +
              (identical ? "bit-identical" : "NOT identical") + ")";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 600.0;
  return {ok, detail + ", " + fmt("%.1f s", secs)};
}

Outcome uniform_logit_loss() {
  const auto cfg = ModelConfig::hybrid_8m();
  Model model(cfg, 0);
  std::mt19937_64 rng(10);
  TokenBatch t{2, 16, {}};
  std::vector<std::int32_t> targets;
  for (int i = 0; i < 32; ++i) {
    t.ids.push_back(static_cast<std::int32_t>(rng() % cfg.vocab_size));
    targets.push_back(static_cast<std::int32_t>(rng() % cfg.vocab_size));
  }
  const double loss = train::cross_entropy(model.forward(t), targets);
  const double ln_v = std::log(6401.0);
  return {std::abs(loss - ln_v) <= 0.3,
          "V=6401 initial loss " + fmt("%.4f", loss) + " vs ln V " + fmt("%.4f", ln_v)};
}

std::vector<std::string> loss_columns(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line.substr(0, line.rfind(',')));
  return rows;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome checkpoint_determinism() {
  Config cfg = Config::load(std::string(HYQUT_SOURCE_DIR) + "/configs/toy.cfg");
  cfg.train.total_steps = 30;
  const auto corpus = data::ingest(cfg.train.corpus);
  const auto tok = data::Tokenizer::build(corpus);
  const auto dir = fs::temp_directory_path() / "hyqut_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  data::BatchIterator it(corpus, tok, cfg.train.batch_size, cfg.model.seq_len, cfg.train.seed);

  {
    Model model(cfg.model, cfg.train.seed);
    train::Trainer trainer(model, cfg.train);
    train::LossLog log((dir / "full.csv").string());
    train::run(trainer, it, 30, [&](const train::StepResult& r) { log.write(r); });
  }

  Model model(cfg.model, cfg.train.seed);
  train::Trainer trainer(model, cfg.train);
  {
    train::LossLog log((dir / "resumed.csv").string());
    train::run(trainer, it, 12, [&](const train::StepResult& r) { log.write(r); });
  }
  checkpoint::save(checkpoint::capture(model, trainer.optimizer(), cfg, tok.characters(), 12),
                   dir / "a.bin");

  // Round trip: load, restore into a fresh model, save again; bytes must match.
  const auto loaded = checkpoint::load(dir / "a.bin");
  Model restored(cfg.model, 999);
  train::Trainer resumed(restored, cfg.train);
  checkpoint::restore(loaded, cfg, restored, resumed.optimizer());
  checkpoint::save(checkpoint::capture(restored, resumed.optimizer(), cfg, loaded.vocabulary, 12),
                   dir / "b.bin");
  bool values_equal = true;
  const auto pa = model.parameters(), pb = restored.parameters();
  for (std::size_t k = 0; k < pa.size(); ++k) values_equal = values_equal && pa[k]->value == pb[k]->value;
  const bool round_trip = values_equal && file_bytes(dir / "a.bin") == file_bytes(dir / "b.bin");

  {
    train::LossLog log((dir / "resumed.csv").string(), std::size_t{12});
    train::run(resumed, it, 30, [&](const train::StepResult& r) { log.write(r); });
  }
  const auto full = loss_columns(dir / "full.csv"), res = loss_columns(dir / "resumed.csv");
  const bool same_csv = full.size() == 31 && full == res;
  return {round_trip && same_csv,
          std::string("round trip ") + (round_trip ? "bit-exact" : "DIFFERS") +
              ", resumed CSV " + (same_csv ? "identical" : "DIFFERS") + " over " +
              std::to_string(full.size() - 1) + " steps (wall-clock column excluded)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"parameter breakdown of the hybrid 8M model", breakdown_exactness},
      {"ablation parameter rows", table_parameter_rows},
      {"parameter reductions", table_reductions},
      {"classical FLOPs percentages", flops_percentages},
      {"quantum gate and parameter census", quantum_census},
      {"simulator vs dense-unitary oracle", simulator_oracle},
      {"gradient suite", gradient_suite},
      {"encoding closed form", encoding_closed_form},
      {"toy convergence and determinism", toy_convergence},
      {"uniform-logit initial loss", uniform_logit_loss},
      {"checkpoint determinism", checkpoint_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].name << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
