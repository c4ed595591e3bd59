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


#include "hyqut/train.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "hyqut/error.hpp"

namespace hyqut::train {

double cross_entropy(const Matrix& logits, std::span<const std::int32_t> targets,
                     Matrix* d_logits) {
  const std::size_t V = logits.cols;
  if (targets.size() != logits.rows) throw UsageError("cross_entropy: one target per row required");
  for (auto t : targets)
    if (t != kIgnore && (t < 0 || static_cast<std::size_t>(t) >= V))
      throw UsageError("cross_entropy: target id " + std::to_string(t) + " outside [0, " +
                       std::to_string(V) + ")");
  std::size_t count = 0;
  for (auto t : targets) count += t != kIgnore;
  if (d_logits) *d_logits = Matrix(logits.rows, V);
  if (count == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(count);
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows; ++r) {
    if (targets[r] == kIgnore) continue;
    auto row = logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    const double log_z = mx + std::log(z);
    total += log_z - row[static_cast<std::size_t>(targets[r])];
    if (d_logits) {
      auto g = d_logits->row(r);
      for (std::size_t i = 0; i < V; ++i) g[i] = std::exp(row[i] - log_z) * inv;
      g[static_cast<std::size_t>(targets[r])] -= inv;
    }
  }
  return total * inv;
}

double cosine_lr(double t_cur, double t_max, double eta_max, double eta_min) {
  return eta_min + 0.5 * (eta_max - eta_min) * (1.0 + std::cos(std::numbers::pi * t_cur / t_max));
}

double lr_at_step(std::size_t t, const TrainConfig& cfg) {
  const std::size_t warm = cfg.resolved_warmup();
  if (warm > 0 && t <= warm) return cfg.eta_max * static_cast<double>(t) / static_cast<double>(warm);
  const std::size_t period = cfg.resolved_cycle();
  const std::size_t cur = (t - warm) % period;
  return cosine_lr(static_cast<double>(cur), static_cast<double>(period), cfg.eta_max, cfg.eta_min);
}

void adam_step(const std::vector<Param*>& params, AdamState& st, double lr, double beta1,
               double beta2, double eps) {
  if (st.m.empty()) {
    for (auto* p : params) {
      st.m.emplace_back(p->size(), 0.0);
      st.v.emplace_back(p->size(), 0.0);
    }
  }
  if (st.m.size() != params.size()) throw UsageError("adam_step: optimizer state does not match parameters");
  for (auto* p : params)
    for (std::size_t i = 0; i < p->size(); ++i)
      if (!std::isfinite(p->grad[i]))
        throw NumericalError("non-finite gradient in " + p->name + "[" + std::to_string(i) + "]");
  ++st.t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(st.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    auto& m = st.m[k];
    auto& v = st.v[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = beta1 * m[i] + (1.0 - beta1) * g;
      v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

void round_to_float32(std::vector<double>& values) {
  for (auto& v : values) v = static_cast<double>(static_cast<float>(v));
}

namespace {

std::uint64_t step_seed(std::uint64_t seed, std::size_t step) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (step + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Trainer::Trainer(Model& model, const TrainConfig& cfg)
    : model_(model), cfg_(cfg), params_(model.parameters()) {
  cfg_.validate();
}

double Trainer::evaluate(const data::Batch& batch) {
  model_.set_dropout(0.0, 0);
  return cross_entropy(model_.forward(batch.inputs), batch.targets);
}

StepResult Trainer::step(const data::Batch& batch) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t t = steps_done() + 1;
  model_.set_dropout(cfg_.dropout, step_seed(cfg_.seed, t));
  model_.zero_grad();

  Matrix d_logits;
  const double loss = cross_entropy(model_.forward(batch.inputs), batch.targets, &d_logits);
  if (!std::isfinite(loss))
    throw NumericalError("non-finite loss at step " + std::to_string(t));
  model_.backward(d_logits);

  const std::uint64_t forwards_before = model_.forward_count();
  if (cfg_.grad_mode == GradMode::FiniteDifference) {
    for (Param* theta : model_.quantum_parameters()) {
      const std::vector<double> saved = theta->value;
      auto loss_at = [&](std::span<const double> angles) {
        std::copy(angles.begin(), angles.end(), theta->value.begin());
        return cross_entropy(model_.forward(batch.inputs), batch.targets);
      };
      auto grad = qproj::quantum_grad_fd(loss_at, saved, cfg_.fd_delta);
      theta->value = saved;
      theta->grad = std::move(grad);
    }
  }
  const std::uint64_t extra = model_.forward_count() - forwards_before;

  if (cfg_.grad_clip > 0.0) {
    double sq = 0.0;
    for (auto* p : params_)
      for (double g : p->grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > cfg_.grad_clip) {
      const double s = cfg_.grad_clip / norm;
      for (auto* p : params_)
        for (double& g : p->grad) g *= s;
    }
  }

  const double lr = lr_at_step(t, cfg_);
  adam_step(params_, adam_, lr, cfg_.beta1, cfg_.beta2, cfg_.eps);
  if (float32_) {
    for (auto* p : params_) round_to_float32(p->value);
    for (auto& m : adam_.m) round_to_float32(m);
    for (auto& v : adam_.v) round_to_float32(v);
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  StepResult r;
  r.step = t;
  r.lr = lr;
  r.loss = loss;
  r.tokens_per_sec = secs > 0 ? static_cast<double>(batch.inputs.ids.size()) / secs : 0.0;
  r.extra_forwards = extra;
  return r;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string LossLog::format_row(const StepResult& r) {
  char tps[64];
  std::snprintf(tps, sizeof tps, "%.1f", r.tokens_per_sec);
  return std::to_string(r.step) + "," + shortest(r.lr) + "," + shortest(r.loss) + "," + tps;
}

LossLog::LossLog(const std::string& path, std::optional<std::size_t> resume_after) {
  std::vector<std::string> kept;
  if (resume_after) {
    std::ifstream in(path);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      std::size_t step = 0;
      std::from_chars(line.data(), line.data() + comma, step);
      if (step <= *resume_after) kept.push_back(line);
    }
  }
  out_.open(path, std::ios::trunc);
  if (!out_) throw IoError("cannot write loss log " + path);
  out_ << header() << "\n";
  for (const auto& l : kept) out_ << l << "\n";
  out_.flush();
}

void LossLog::write(const StepResult& r) {
  out_ << format_row(r) << "\n";
  out_.flush();
  if (!out_) throw IoError("failed writing loss log");
}

void run(Trainer& trainer, const data::BatchIterator& batches, std::size_t until,
         const std::function<void(const StepResult&)>& after_step) {
  while (trainer.steps_done() < until) {
    const auto result = trainer.step(batches.batch_at(trainer.steps_done()));
    if (after_step) after_step(result);
  }
}

}  // namespace hyqut::train
