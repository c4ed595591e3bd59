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

// Parameter counting from shape rules (independent of model construction)
// and a documented FLOPs estimate.
//
// FLOPs per token = 2 * (weight MACs + causal attention MACs), where
//   weight MACs    dense: d_in * d_out; quantum: d_in * 2n + 2n * n (the
//                  circuit costed as a dense 2n -> n map) + d_out (scalar)
//                  or n * d_out (full); tied output head: d_model * V
//   attention MACs 0.5 * seq_len * d_model per layer (QK^T and AV over the
//                  causal half of the context)
// and the sequence total is seq_len times that.

#include <cstddef>
#include <string>
#include <vector>

#include "hyqut/config.hpp"
#include "hyqut/vqc.hpp"

namespace hyqut::accounting {

struct Entry {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t count = 0;
};

/// Parameter-count memory at 32 bits per value, in MiB.
double memory_mb(std::size_t count);
/// "12.50", or "<0.01" below 0.005.
std::string format_mb(std::size_t count);
/// 6721913 -> "6,721,913".
std::string format_count(std::size_t n);

struct ResourceReport {
  std::string label;
  std::vector<Entry> entries;  // model order
  std::size_t total = 0;
  double flops = 0.0;
  double classical_percent = 100.0;

  /// Aligned name / shape / count / MB table with a total row.
  std::string table() const;
  std::string csv() const;
  /// Rows with the layer index folded to "layers.N." when every layer is
  /// identical; tab-separated "name, shape, count, MB" plus a Total row.
  std::vector<std::vector<std::string>> collapsed_rows() const;
};

std::vector<Entry> parameter_entries(const ModelConfig& cfg);
std::size_t count_total(const ModelConfig& cfg);

/// Entries, total, FLOPs at cfg.seq_len and the percentage relative to the
/// same config with nothing replaced.
ResourceReport count_params(const ModelConfig& cfg);
ResourceReport count_params(const ModelConfig& cfg, const ReplacementStrategy& strategy);

struct FlopsBreakdown {
  double weight_macs_per_token = 0.0;
  double attention_macs_per_token = 0.0;
  double total = 0.0;
};

FlopsBreakdown flops_breakdown(const ModelConfig& cfg, std::size_t seq_len);
double estimate_flops(const ModelConfig& cfg, const ReplacementStrategy& strategy,
                      std::size_t seq_len);
/// 100 * flops(strategy) / flops(no replacement).
double classical_percentage(const ModelConfig& cfg, const ReplacementStrategy& strategy,
                            std::size_t seq_len);

/// 100 * (classical - hybrid) / classical, by parameter count.
double parameter_reduction(const ModelConfig& classical, const ModelConfig& hybrid);

struct Census {
  std::size_t gates = 0;  // ansatz rotations + CNOTs
  std::size_t rotations = 0;
  std::size_t cnots = 0;
  std::size_t params = 0;  // trainable circuit angles
};

Census gate_and_param_census(const qproj::AnsatzDescriptor& ansatz);

struct AblationRow {
  ReplacementStrategy strategy;
  std::size_t params = 0;
  double flops = 0.0;
  double classical_percent = 0.0;
};

/// The seven replacement rows evaluated on `base` (its replace set ignored).
std::vector<AblationRow> ablation_rows(const ModelConfig& base);

}  // namespace hyqut::accounting
