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

// Loss, learning-rate schedule, Adam and the training step.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyqut/config.hpp"
#include "hyqut/data.hpp"
#include "hyqut/model.hpp"

namespace hyqut::train {

/// Target id that contributes nothing to the loss.
inline constexpr std::int32_t kIgnore = -1;

/// Mean over non-ignored positions of -log softmax(logits)[target]. When
/// `d_logits` is given it receives the gradient of that mean. Target ids
/// outside [0, V) other than kIgnore raise UsageError.
double cross_entropy(const Matrix& logits, std::span<const std::int32_t> targets,
                     Matrix* d_logits = nullptr);

/// Cosine segment eta_min + (eta_max - eta_min)(1 + cos(pi t_cur / t_max)) / 2.
double cosine_lr(double t_cur, double t_max, double eta_max, double eta_min);

/// Linear warmup to eta_max over the first T_warmup steps, then cosine
/// annealing with warm restarts of period T_max. Steps count from 1.
double lr_at_step(std::size_t t, const TrainConfig& cfg);

struct AdamState {
  std::uint64_t t = 0;
  std::vector<std::vector<double>> m, v;  // parallel to the parameter list
};

/// One bias-corrected Adam update of every parameter from its .grad.
/// A non-finite gradient raises NumericalError naming the parameter.
void adam_step(const std::vector<Param*>& params, AdamState& state, double lr,
               double beta1, double beta2, double eps);

/// Rounds to the nearest float32 value (the checkpoint storage precision).
void round_to_float32(std::vector<double>& values);

struct StepResult {
  std::size_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double tokens_per_sec = 0.0;
  std::uint64_t extra_forwards = 0;  // finite-difference evaluations
};

class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& cfg);

  /// Forward, loss, gradients, Adam. Circuit-angle gradients come from the
  /// adjoint pass or, in finite-difference mode, from 2 full-loss
  /// evaluations per angle. A non-finite loss raises NumericalError.
  StepResult step(const data::Batch& batch);

  /// Loss on a batch without touching gradients or optimizer state.
  double evaluate(const data::Batch& batch);

  std::size_t steps_done() const { return static_cast<std::size_t>(adam_.t); }
  AdamState& optimizer() { return adam_; }
  const TrainConfig& config() const { return cfg_; }

  /// Parameters and optimizer moments are kept at float32 precision after
  /// every update so checkpoints restore them bit for bit. On by default.
  void set_float32_state(bool on) { float32_ = on; }

 private:
  Model& model_;
  TrainConfig cfg_;
  std::vector<Param*> params_;
  AdamState adam_;
  bool float32_ = true;
};

/// CSV loss log "step,lr,loss,tokens_per_sec", flushed after every row.
class LossLog {
 public:
  /// With `resume_after` set, rows with larger step numbers are dropped and
  /// the log is appended to; otherwise the file is recreated.
  explicit LossLog(const std::string& path, std::optional<std::size_t> resume_after = {});
  void write(const StepResult& r);

  static std::string header() { return "step,lr,loss,tokens_per_sec"; }
  static std::string format_row(const StepResult& r);

 private:
  std::ofstream out_;
};

/// Runs steps steps_done()+1 .. until, fetching batch (step - 1) from the
/// iterator. `after_step` sees each result.
void run(Trainer& trainer, const data::BatchIterator& batches, std::size_t until,
         const std::function<void(const StepResult&)>& after_step);

}  // namespace hyqut::train
