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

#include "hyqut/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "hyqut/error.hpp"

namespace hyqut {

namespace pt = boost::property_tree;

std::string_view target_name(Target t) {
  switch (t) {
    case Target::Wq: return "Wq";
    case Target::Wk: return "Wk";
    case Target::Wv: return "Wv";
    case Target::Wo: return "Wo";
    case Target::FfnGate: return "FFN_gate";
    case Target::FfnUp: return "FFN_up";
    case Target::FfnDown: return "FFN_down";
  }
  return "?";
}

ReplacementStrategy::ReplacementStrategy(std::initializer_list<Target> targets) {
  for (auto t : targets) insert(t);
}

std::vector<Target> ReplacementStrategy::targets() const {
  std::vector<Target> out;
  for (int i = 0; i < kNumTargets; ++i)
    if (contains(static_cast<Target>(i))) out.push_back(static_cast<Target>(i));
  return out;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ReplacementStrategy ReplacementStrategy::parse(std::string_view text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw ConfigError("replace: missing closing ']'");
    body = trim(std::string_view(body).substr(1, body.size() - 2));
  }
  ReplacementStrategy s;
  if (body.empty() || lower(body) == "none") return s;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string key = lower(trim(item));
    bool found = false;
    for (int i = 0; i < kNumTargets; ++i) {
      auto t = static_cast<Target>(i);
      if (key == lower(target_name(t))) {
        s.insert(t);
        found = true;
      }
    }
    if (!found)
      throw ConfigError("replace: unknown target '" + trim(item) +
                        "' (expected Wq, Wk, Wv, Wo, FFN_gate, FFN_up, FFN_down)");
  }
  return s;
}

std::string ReplacementStrategy::to_string() const {
  std::string out = "[";
  bool first = true;
  for (auto t : targets()) {
    if (!first) out += ", ";
    out += target_name(t);
    first = false;
  }
  return out + "]";
}

std::string ReplacementStrategy::label() const {
  if (empty()) return "None (Classical Baseline)";
  if (bits_ == 0x7f) return "All Linear Layers";
  std::string attn, ffn;
  for (auto t : targets()) {
    bool is_attn = t <= Target::Wo;
    std::string& dst = is_attn ? attn : ffn;
    if (!dst.empty()) dst += ", ";
    static const char* short_names[] = {"Wq", "Wk", "Wv", "Wo", "W_gate", "W_up", "W_down"};
    dst += short_names[static_cast<int>(t)];
  }
  std::string out;
  if (!attn.empty()) out += "Attention: " + attn;
  if (!ffn.empty()) out += std::string(out.empty() ? "" : "; ") + "FFN: " + ffn;
  return out;
}

std::vector<ReplacementStrategy> ablation_strategies() {
  using T = Target;
  return {
      {},
      {T::Wq},
      {T::Wq, T::Wk, T::Wv},
      {T::Wq, T::Wk, T::Wv, T::Wo},
      {T::FfnGate},
      {T::FfnGate, T::FfnUp, T::FfnDown},
      {T::Wq, T::Wk, T::Wv, T::Wo, T::FfnGate, T::FfnUp, T::FfnDown},
  };
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* key) {
    if (v == 0) throw ConfigError(std::string("model.") + key + " must be positive");
  };
  positive(vocab_size, "vocab_size");
  positive(hidden_size, "hidden_size");
  positive(num_hidden_layers, "num_hidden_layers");
  positive(num_attention_heads, "num_attention_heads");
  positive(num_key_value_heads, "num_key_value_heads");
  positive(intermediate_size, "intermediate_size");
  positive(max_position_embeddings, "max_position_embeddings");
  positive(seq_len, "seq_len");
  if (hidden_size % num_attention_heads != 0)
    throw ConfigError("model.hidden_size must be divisible by num_attention_heads");
  if (num_attention_heads % num_key_value_heads != 0)
    throw ConfigError("model.num_attention_heads must be divisible by num_key_value_heads");
  if (seq_len > max_position_embeddings)
    throw ConfigError("model.seq_len exceeds max_position_embeddings");
  if (!(norm_eps > 0)) throw ConfigError("model.norm_eps must be positive");
  if (ffn == FfnKind::Plain && replace.contains(Target::FfnGate))
    throw ConfigError("model.replace: FFN_gate requires ffn = gated");
  if (!replace.empty()) {
    (void)projector.ansatz();  // validates n_q / n_layers / variant
    if (projector.per_head) {
      // per-head groups must split the projection width evenly
      if (replace.contains(Target::Wq) && hidden_size % num_attention_heads != 0)
        throw ConfigError("projector.per_head: hidden_size not divisible by heads");
    }
  }
}

ModelConfig ModelConfig::classic_8m() { return ModelConfig{}; }

ModelConfig ModelConfig::hybrid_8m() {
  ModelConfig c;
  c.replace = {Target::FfnGate};
  c.projector = {10, 2, qproj::AnsatzVariant::A8M, qproj::ExpandMode::Scalar, false};
  return c;
}

ModelConfig ModelConfig::classic_150m() {
  ModelConfig c;
  c.hidden_size = 1024;
  c.num_hidden_layers = 16;
  c.num_attention_heads = 8;
  c.num_key_value_heads = 2;
  c.intermediate_size = 2048;
  c.max_position_embeddings = 32768;
  c.seq_len = 512;
  c.projector = {10, 2, qproj::AnsatzVariant::B150M, qproj::ExpandMode::Scalar, false};
  return c;
}

ModelConfig ModelConfig::hybrid_150m() {
  ModelConfig c = classic_150m();
  c.replace = {Target::Wq};
  return c;
}

std::size_t TrainConfig::resolved_warmup() const {
  if (warmup_steps >= 0) return static_cast<std::size_t>(warmup_steps);
  return total_steps / 20;
}

std::size_t TrainConfig::resolved_cycle() const {
  if (cycle_steps > 0) return static_cast<std::size_t>(cycle_steps);
  std::size_t w = resolved_warmup();
  return total_steps > w ? total_steps - w : 1;
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (total_steps == 0) throw ConfigError("train.total_steps must be positive");
  if (!(eta_min > 0 && eta_min <= eta_max))
    throw ConfigError("train.eta_min/eta_max: need 0 < eta_min <= eta_max");
  if (resolved_warmup() >= total_steps)
    throw ConfigError("train.warmup_steps must be smaller than total_steps");
  if (!(fd_delta >= 1e-4 && fd_delta <= 1e-3))
    throw ConfigError("train.fd_delta must lie in [1e-4, 1e-3]");
  if (!(dropout >= 0 && dropout < 1)) throw ConfigError("train.dropout must lie in [0, 1)");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1))
    throw ConfigError("train.beta1/beta2 must lie in [0, 1)");
  if (!(eps > 0)) throw ConfigError("train.eps must be positive");
  if (grad_clip < 0) throw ConfigError("train.grad_clip must be non-negative");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Reader {
 public:
  Reader(const pt::ptree& tree) : tree_(tree) {}

  const pt::ptree* section(const std::string& name) const {
    auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  template <typename Fn>
  void each(const std::string& sec, Fn&& fn) const {
    if (const auto* s = section(sec))
      for (const auto& [key, node] : *s) fn(key, trim(node.data()));
  }

 private:
  const pt::ptree& tree_;
};

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string l = lower(v);
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

}  // namespace

Config Config::parse(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  {
    std::istringstream in{std::string(text)};
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(std::string("config syntax: ") + e.message() + " (line " +
                        std::to_string(e.line()) + ")");
    }
  }
  for (const auto& [name, _] : tree)
    if (name != "model" && name != "projector" && name != "train")
      throw ConfigError("unknown config section [" + name + "]");

  Config c;
  Reader r(tree);
  auto& m = c.model;
  r.each("model", [&](const std::string& k, const std::string& v) {
    const std::string key = "model." + k;
    if (k == "vocab_size") m.vocab_size = to_size(key, v);
    else if (k == "hidden_size") m.hidden_size = to_size(key, v);
    else if (k == "num_hidden_layers") m.num_hidden_layers = to_size(key, v);
    else if (k == "num_attention_heads") m.num_attention_heads = to_size(key, v);
    else if (k == "num_key_value_heads") m.num_key_value_heads = to_size(key, v);
    else if (k == "intermediate_size") m.intermediate_size = to_size(key, v);
    else if (k == "max_position_embeddings") m.max_position_embeddings = to_size(key, v);
    else if (k == "seq_len") m.seq_len = to_size(key, v);
    else if (k == "norm_eps") m.norm_eps = to_double(key, v);
    else if (k == "replace") m.replace = ReplacementStrategy::parse(v);
    else if (k == "ffn") {
      if (lower(v) == "gated") m.ffn = FfnKind::Gated;
      else if (lower(v) == "plain") m.ffn = FfnKind::Plain;
      else throw ConfigError(key + ": expected gated|plain, got '" + v + "'");
    } else throw ConfigError("unknown config key " + key);
  });
  auto& p = m.projector;
  r.each("projector", [&](const std::string& k, const std::string& v) {
    const std::string key = "projector." + k;
    if (k == "n_q") p.n_qubits = static_cast<int>(to_size(key, v));
    else if (k == "n_layers") p.n_layers = static_cast<int>(to_size(key, v));
    else if (k == "variant") p.variant = qproj::parse_variant(v);
    else if (k == "expand_mode") p.expand_mode = qproj::parse_expand_mode(v);
    else if (k == "per_head") p.per_head = to_bool(key, v);
    else throw ConfigError("unknown config key " + key);
  });
  auto& t = c.train;
  r.each("train", [&](const std::string& k, const std::string& v) {
    const std::string key = "train." + k;
    if (k == "batch_size") t.batch_size = to_size(key, v);
    else if (k == "total_steps") t.total_steps = to_size(key, v);
    else if (k == "warmup_steps") t.warmup_steps = to_long(key, v);
    else if (k == "cycle_steps") t.cycle_steps = to_long(key, v);
    else if (k == "eta_max") t.eta_max = to_double(key, v);
    else if (k == "eta_min") t.eta_min = to_double(key, v);
    else if (k == "beta1") t.beta1 = to_double(key, v);
    else if (k == "beta2") t.beta2 = to_double(key, v);
    else if (k == "eps") t.eps = to_double(key, v);
    else if (k == "fd_delta") t.fd_delta = to_double(key, v);
    else if (k == "seed") t.seed = to_size(key, v);
    else if (k == "dropout") t.dropout = to_double(key, v);
    else if (k == "grad_clip") t.grad_clip = to_double(key, v);
    else if (k == "max_chars") t.max_chars = to_size(key, v);
    else if (k == "grad_mode") {
      if (v == "adjoint") t.grad_mode = GradMode::Adjoint;
      else if (v == "fd") t.grad_mode = GradMode::FiniteDifference;
      else throw ConfigError(key + ": expected adjoint|fd, got '" + v + "'");
    } else if (k == "corpus") {
      std::filesystem::path path(v);
      if (path.is_relative() && !base_dir.empty()) path = (base_dir / path).lexically_normal();
      t.corpus = path.string();
    } else throw ConfigError("unknown config key " + key);
  });
  c.model.validate();
  c.train.validate();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path());
}

namespace {

std::map<std::string, std::string> architecture_fields(const ModelConfig& m) {
  return {
      {"model.vocab_size", std::to_string(m.vocab_size)},
      {"model.hidden_size", std::to_string(m.hidden_size)},
      {"model.num_hidden_layers", std::to_string(m.num_hidden_layers)},
      {"model.num_attention_heads", std::to_string(m.num_attention_heads)},
      {"model.num_key_value_heads", std::to_string(m.num_key_value_heads)},
      {"model.intermediate_size", std::to_string(m.intermediate_size)},
      {"model.max_position_embeddings", std::to_string(m.max_position_embeddings)},
      {"model.seq_len", std::to_string(m.seq_len)},
      {"model.ffn", m.ffn == FfnKind::Gated ? "gated" : "plain"},
      {"model.norm_eps", fmt_double(m.norm_eps)},
      {"model.replace", m.replace.to_string()},
      {"projector.n_q", std::to_string(m.projector.n_qubits)},
      {"projector.n_layers", std::to_string(m.projector.n_layers)},
      {"projector.variant", std::string(qproj::variant_name(m.projector.variant))},
      {"projector.expand_mode", std::string(qproj::expand_mode_name(m.projector.expand_mode))},
      {"projector.per_head", m.projector.per_head ? "true" : "false"},
  };
}

}  // namespace

std::string Config::to_text() const {
  std::ostringstream out;
  const auto& m = model;
  out << "[model]\n"
      << "vocab_size = " << m.vocab_size << "\n"
      << "hidden_size = " << m.hidden_size << "\n"
      << "num_hidden_layers = " << m.num_hidden_layers << "\n"
      << "num_attention_heads = " << m.num_attention_heads << "\n"
      << "num_key_value_heads = " << m.num_key_value_heads << "\n"
      << "intermediate_size = " << m.intermediate_size << "\n"
      << "max_position_embeddings = " << m.max_position_embeddings << "\n"
      << "seq_len = " << m.seq_len << "\n"
      << "ffn = " << (m.ffn == FfnKind::Gated ? "gated" : "plain") << "\n"
      << "norm_eps = " << fmt_double(m.norm_eps) << "\n"
      << "replace = " << m.replace.to_string() << "\n\n"
      << "[projector]\n"
      << "n_q = " << m.projector.n_qubits << "\n"
      << "n_layers = " << m.projector.n_layers << "\n"
      << "variant = " << qproj::variant_name(m.projector.variant) << "\n"
      << "expand_mode = " << qproj::expand_mode_name(m.projector.expand_mode) << "\n"
      << "per_head = " << (m.projector.per_head ? "true" : "false") << "\n\n";
  const auto& t = train;
  out << "[train]\n"
      << "batch_size = " << t.batch_size << "\n"
      << "total_steps = " << t.total_steps << "\n"
      << "warmup_steps = " << t.warmup_steps << "\n"
      << "cycle_steps = " << t.cycle_steps << "\n"
      << "eta_max = " << fmt_double(t.eta_max) << "\n"
      << "eta_min = " << fmt_double(t.eta_min) << "\n"
      << "beta1 = " << fmt_double(t.beta1) << "\n"
      << "beta2 = " << fmt_double(t.beta2) << "\n"
      << "eps = " << fmt_double(t.eps) << "\n"
      << "fd_delta = " << fmt_double(t.fd_delta) << "\n"
      << "seed = " << t.seed << "\n"
      << "dropout = " << fmt_double(t.dropout) << "\n"
      << "grad_clip = " << fmt_double(t.grad_clip) << "\n"
      << "grad_mode = " << (t.grad_mode == GradMode::Adjoint ? "adjoint" : "fd") << "\n"
      << "max_chars = " << t.max_chars << "\n";
  if (!t.corpus.empty()) out << "corpus = " << t.corpus << "\n";
  return out.str();
}

std::vector<std::string> architecture_diff(const Config& expected, const Config& actual) {
  auto a = architecture_fields(expected.model);
  auto b = architecture_fields(actual.model);
  std::vector<std::string> out;
  for (const auto& [key, value] : a)
    if (b.at(key) != value) out.push_back(key + ": " + value + " -> " + b.at(key));
  return out;
}

}  // namespace hyqut
