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

// Model, projector and training configuration, plus the INI-style text form:
//
//   [model]      Table-1 style keys (hidden_size, num_hidden_layers, ...)
//                and `replace = [Wq, FFN_gate]`
//   [projector]  n_q, n_layers, variant, expand_mode, per_head
//   [train]      batch_size, total_steps, eta_max, fd_delta, grad_mode, ...

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hyqut/qproj.hpp"

namespace hyqut {

enum class Target : std::uint8_t { Wq, Wk, Wv, Wo, FfnGate, FfnUp, FfnDown };
inline constexpr int kNumTargets = 7;

std::string_view target_name(Target t);

/// Which projections are replaced by quantum projectors. Empty = classical.
class ReplacementStrategy {
 public:
  ReplacementStrategy() = default;
  ReplacementStrategy(std::initializer_list<Target> targets);

  bool contains(Target t) const { return (bits_ >> static_cast<int>(t)) & 1u; }
  void insert(Target t) { bits_ |= 1u << static_cast<int>(t); }
  bool empty() const { return bits_ == 0; }
  std::vector<Target> targets() const;

  /// "[Wq, FFN_gate]", "Wq,FFN_gate", "none" or "[]"; case-insensitive.
  static ReplacementStrategy parse(std::string_view text);
  /// "[Wq, FFN_gate]" style.
  std::string to_string() const;
  /// Human label in ablation-table style, e.g. "Attention: Wq, Wk, Wv".
  std::string label() const;

  friend bool operator==(const ReplacementStrategy&, const ReplacementStrategy&) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// The seven ablation rows, in table order.
std::vector<ReplacementStrategy> ablation_strategies();

enum class FfnKind : std::uint8_t { Gated, Plain };

struct ModelConfig {
  std::size_t vocab_size = 6401;
  std::size_t hidden_size = 512;
  std::size_t num_hidden_layers = 2;
  std::size_t num_attention_heads = 8;
  std::size_t num_key_value_heads = 2;
  std::size_t intermediate_size = 1024;
  std::size_t max_position_embeddings = 4096;
  std::size_t seq_len = 512;
  FfnKind ffn = FfnKind::Gated;
  double norm_eps = 1e-5;
  ReplacementStrategy replace;
  qproj::ProjectorConfig projector;

  std::size_t head_dim() const { return hidden_size / num_attention_heads; }
  std::size_t kv_dim() const { return head_dim() * num_key_value_heads; }
  /// Throws ConfigError naming the offending key.
  void validate() const;

  static ModelConfig classic_8m();
  static ModelConfig hybrid_8m();    // FFN gate replaced, A8M, scalar expansion
  static ModelConfig classic_150m();
  static ModelConfig hybrid_150m();  // Wq replaced, B150M, scalar expansion

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class GradMode : std::uint8_t { Adjoint, FiniteDifference };

struct TrainConfig {
  std::size_t batch_size = 8;
  std::size_t total_steps = 200;
  long warmup_steps = -1;  // -1: 5% of total_steps
  long cycle_steps = -1;   // -1: total_steps - warmup
  double eta_max = 3e-4;
  double eta_min = 3e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double fd_delta = 1e-4;
  std::uint64_t seed = 0;
  double dropout = 0.0;
  double grad_clip = 0.0;  // global-norm clip; 0 disables
  GradMode grad_mode = GradMode::Adjoint;
  std::string corpus;      // UTF-8 text, one sample per line
  std::size_t max_chars = 512;

  std::size_t resolved_warmup() const;
  std::size_t resolved_cycle() const;
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct Config {
  ModelConfig model;
  TrainConfig train;

  /// Parses the INI text. Unknown keys are rejected.
  static Config parse(std::string_view text, const std::filesystem::path& base_dir = {});
  static Config load(const std::filesystem::path& path);
  std::string to_text() const;

  friend bool operator==(const Config&, const Config&) = default;
};

/// "section.key: a -> b" lines for every model/projector field that differs.
std::vector<std::string> architecture_diff(const Config& expected, const Config& actual);

}  // namespace hyqut
