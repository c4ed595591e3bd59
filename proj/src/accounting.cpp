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


#include "hyqut/accounting.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace hyqut::accounting {

double memory_mb(std::size_t count) {
  return static_cast<double>(count) * 4.0 / (1024.0 * 1024.0);
}

std::string format_mb(std::size_t count) {
  const double mb = memory_mb(count);
  if (mb < 0.005) return "<0.01";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", mb);
  return buf;
}

std::string format_count(std::size_t n) {
  std::string digits = std::to_string(n), out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

void add(std::vector<Entry>& out, std::string name, std::vector<std::size_t> shape) {
  const std::size_t n = product(shape);
  out.push_back({std::move(name), std::move(shape), n});
}

void add_projection(std::vector<Entry>& out, const ModelConfig& cfg, Target t,
                    const std::string& name, std::size_t d_in, std::size_t d_out, bool bias,
                    std::size_t groups) {
  if (!cfg.replace.contains(t)) {
    add(out, name + ".weight", {d_out, d_in});
    if (bias) add(out, name + ".bias", {d_out});
    return;
  }
  const auto ansatz = cfg.projector.ansatz();
  const std::size_t n = static_cast<std::size_t>(ansatz.n_qubits);
  const std::size_t up_in = cfg.projector.expand_mode == qproj::ExpandMode::Full ? n : 1;
  if (!cfg.projector.per_head) groups = 1;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::string p = groups == 1 ? name : name + ".heads." + std::to_string(g);
    const std::size_t w = d_out / groups;
    add(out, p + ".reduce_proj.weight", {2 * n, d_in});
    add(out, p + ".reduce_proj.bias", {2 * n});
    add(out, p + ".mq_layers.0.weight", {ansatz.trainable_param_count()});
    add(out, p + ".dense_expand.weight", {w, up_in});
    add(out, p + ".dense_expand.bias", {w});
  }
}

}  // namespace

std::vector<Entry> parameter_entries(const ModelConfig& cfg) {
  const std::size_t d = cfg.hidden_size, kv = cfg.kv_dim(), f = cfg.intermediate_size;
  std::vector<Entry> out;
  add(out, "model.embed_tokens.embedding_table", {cfg.vocab_size, d});
  for (std::size_t i = 0; i < cfg.num_hidden_layers; ++i) {
    const std::string l = "layers." + std::to_string(i) + ".";
    add(out, l + "input_layernorm.weight", {d});
    add_projection(out, cfg, Target::Wq, l + "self_attn.q_proj", d, d, false,
                   cfg.num_attention_heads);
    add_projection(out, cfg, Target::Wk, l + "self_attn.k_proj", d, kv, false,
                   cfg.num_key_value_heads);
    add_projection(out, cfg, Target::Wv, l + "self_attn.v_proj", d, kv, false,
                   cfg.num_key_value_heads);
    add_projection(out, cfg, Target::Wo, l + "self_attn.o_proj", d, d, false, 1);
    add(out, l + "post_attention_layernorm.weight", {d});
    if (cfg.ffn == FfnKind::Gated)
      add_projection(out, cfg, Target::FfnGate, l + "mlp.gate_proj", d, f, true, 1);
    add_projection(out, cfg, Target::FfnDown, l + "mlp.down_proj", f, d, true, 1);
    add_projection(out, cfg, Target::FfnUp, l + "mlp.up_proj", d, f, true, 1);
  }
  add(out, "model.norm.weight", {d});
  add(out, "lm_head.bias", {cfg.vocab_size});
  return out;
}

std::size_t count_total(const ModelConfig& cfg) {
  std::size_t n = 0;
  for (const auto& e : parameter_entries(cfg)) n += e.count;
  return n;
}

namespace {

double projection_macs(const ModelConfig& cfg, Target t, std::size_t d_in, std::size_t d_out) {
  if (!cfg.replace.contains(t)) return static_cast<double>(d_in * d_out);
  const double n = cfg.projector.n_qubits;
  const double expand =
      cfg.projector.expand_mode == qproj::ExpandMode::Full ? n * d_out : static_cast<double>(d_out);
  // per-head groups split d_out but each sees the full input
  double groups = 1.0;
  if (cfg.projector.per_head) {
    if (t == Target::Wq) groups = static_cast<double>(cfg.num_attention_heads);
    if (t == Target::Wk || t == Target::Wv) groups = static_cast<double>(cfg.num_key_value_heads);
  }
  return groups * (static_cast<double>(d_in) * 2.0 * n + 2.0 * n * n) + expand;
}

}  // namespace

FlopsBreakdown flops_breakdown(const ModelConfig& cfg, std::size_t seq_len) {
  const std::size_t d = cfg.hidden_size, kv = cfg.kv_dim(), f = cfg.intermediate_size;
  double per_layer = projection_macs(cfg, Target::Wq, d, d) +
                     projection_macs(cfg, Target::Wk, d, kv) +
                     projection_macs(cfg, Target::Wv, d, kv) +
                     projection_macs(cfg, Target::Wo, d, d) +
                     projection_macs(cfg, Target::FfnDown, f, d) +
                     projection_macs(cfg, Target::FfnUp, d, f);
  if (cfg.ffn == FfnKind::Gated) per_layer += projection_macs(cfg, Target::FfnGate, d, f);
  FlopsBreakdown b;
  b.weight_macs_per_token = per_layer * static_cast<double>(cfg.num_hidden_layers) +
                            static_cast<double>(d * cfg.vocab_size);
  b.attention_macs_per_token = 0.5 * static_cast<double>(seq_len) * static_cast<double>(d) *
                               static_cast<double>(cfg.num_hidden_layers);
  b.total = 2.0 * (b.weight_macs_per_token + b.attention_macs_per_token) *
            static_cast<double>(seq_len);
  return b;
}

double estimate_flops(const ModelConfig& cfg, const ReplacementStrategy& strategy,
                      std::size_t seq_len) {
  ModelConfig c = cfg;
  c.replace = strategy;
  return flops_breakdown(c, seq_len).total;
}

double classical_percentage(const ModelConfig& cfg, const ReplacementStrategy& strategy,
                            std::size_t seq_len) {
  return 100.0 * estimate_flops(cfg, strategy, seq_len) / estimate_flops(cfg, {}, seq_len);
}

ResourceReport count_params(const ModelConfig& cfg, const ReplacementStrategy& strategy) {
  ModelConfig c = cfg;
  c.replace = strategy;
  ResourceReport r;
  r.label = strategy.label();
  r.entries = parameter_entries(c);
  for (const auto& e : r.entries) r.total += e.count;
  r.flops = estimate_flops(cfg, strategy, cfg.seq_len);
  r.classical_percent = classical_percentage(cfg, strategy, cfg.seq_len);
  return r;
}

ResourceReport count_params(const ModelConfig& cfg) { return count_params(cfg, cfg.replace); }

double parameter_reduction(const ModelConfig& classical, const ModelConfig& hybrid) {
  const double a = static_cast<double>(count_total(classical));
  const double b = static_cast<double>(count_total(hybrid));
  return 100.0 * (a - b) / a;
}

Census gate_and_param_census(const qproj::AnsatzDescriptor& ansatz) {
  Census c;
  c.rotations = ansatz.rotation_count();
  c.cnots = ansatz.cnot_count();
  c.gates = ansatz.gate_count();
  c.params = ansatz.trainable_param_count();
  return c;
}

std::vector<AblationRow> ablation_rows(const ModelConfig& base) {
  std::vector<AblationRow> rows;
  for (const auto& s : ablation_strategies()) {
    ModelConfig c = base;
    c.replace = s;
    rows.push_back({s, count_total(c), estimate_flops(base, s, base.seq_len),
                    classical_percentage(base, s, base.seq_len)});
  }
  return rows;
}

namespace {

// "layers.7.mlp.up_proj.weight" -> {7, "mlp.up_proj.weight"}
bool split_layer(const std::string& name, std::size_t& layer, std::string& rest) {
  if (name.rfind("layers.", 0) != 0) return false;
  const auto dot = name.find('.', 7);
  if (dot == std::string::npos) return false;
  layer = std::stoul(name.substr(7, dot - 7));
  rest = name.substr(dot + 1);
  return true;
}

}  // namespace

std::vector<std::vector<std::string>> ResourceReport::collapsed_rows() const {
  // Fold only when every layer lists the same (suffix, shape) sequence.
  std::vector<std::vector<std::pair<std::string, std::vector<std::size_t>>>> per_layer;
  for (const auto& e : entries) {
    std::size_t layer = 0;
    std::string rest;
    if (!split_layer(e.name, layer, rest)) continue;
    if (per_layer.size() <= layer) per_layer.resize(layer + 1);
    per_layer[layer].emplace_back(rest, e.shape);
  }
  const bool fold = !per_layer.empty() &&
                    std::all_of(per_layer.begin(), per_layer.end(),
                                [&](const auto& l) { return l == per_layer.front(); });

  std::vector<std::vector<std::string>> rows;
  for (const auto& e : entries) {
    std::size_t layer = 0;
    std::string rest;
    if (split_layer(e.name, layer, rest) && fold) {
      if (layer != 0) continue;
      rows.push_back({"layers.N." + rest, shape_string(e.shape), format_count(e.count),
                      format_mb(e.count)});
    } else {
      rows.push_back({e.name, shape_string(e.shape), format_count(e.count), format_mb(e.count)});
    }
  }
  char mb[32];
  std::snprintf(mb, sizeof mb, "%.2f MB", memory_mb(total));
  rows.push_back({"Total", "-", format_count(total), mb});
  return rows;
}

std::string ResourceReport::table() const {
  std::vector<std::vector<std::string>> rows{{"name", "shape", "params", "MB"}};
  for (const auto& e : entries)
    rows.push_back({e.name, shape_string(e.shape), format_count(e.count), format_mb(e.count)});
  char mb[32];
  std::snprintf(mb, sizeof mb, "%.2f", memory_mb(total));
  rows.push_back({"Total", "-", format_count(total), mb});
  std::size_t w[4] = {0, 0, 0, 0};
  for (const auto& r : rows)
    for (int i = 0; i < 4; ++i) w[i] = std::max(w[i], r[i].size());
  std::ostringstream out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (k + 1 == rows.size()) out << std::string(w[0] + w[1] + w[2] + w[3] + 6, '-') << "\n";
    out << r[0] << std::string(w[0] - r[0].size() + 2, ' ') << r[1]
        << std::string(w[1] - r[1].size() + 2, ' ') << std::string(w[2] - r[2].size(), ' ')
        << r[2] << "  " << std::string(w[3] - r[3].size(), ' ') << r[3] << "\n";
  }
  return out.str();
}

std::string ResourceReport::csv() const {
  std::ostringstream out;
  out << "name,shape,params,mb\n";
  for (const auto& e : entries)
    out << e.name << ",\"" << shape_string(e.shape) << "\"," << e.count << "," << format_mb(e.count)
        << "\n";
  char mb[32];
  std::snprintf(mb, sizeof mb, "%.2f", memory_mb(total));
  out << "Total,-," << total << "," << mb << "\n";
  return out.str();
}

}  // namespace hyqut::accounting
