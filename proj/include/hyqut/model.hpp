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

// Decoder-only transformer with grouped key/value heads. Every projection
// sits behind the Projection interface so any subset of
// {q, k, v, o, gate, up, down} can be a quantum projector instead of a dense
// matrix. Activations are [batch*seq, width] row-major matrices; row r is
// token (r / seq, r % seq).
//
// Layer form (normalization inside each residual branch):
//   X~ = X  + Dropout(Attn(LayerNorm(X)))
//   Y  = X~ + Dropout(FFN(LayerNorm(X~)))
//
// Positions use a fixed sinusoidal table; the output head reuses the
// embedding matrix and adds a trainable bias.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hyqut/config.hpp"
#include "hyqut/qproj.hpp"
#include "hyqut/tensor.hpp"

namespace hyqut {

struct TokenBatch {
  std::size_t batch = 0;
  std::size_t seq = 0;
  std::vector<std::int32_t> ids;  // [batch * seq]
};

/// A d_in -> d_out map with cached forward and accumulating backward.
class Projection {
 public:
  virtual ~Projection() = default;
  virtual std::size_t d_in() const = 0;
  virtual std::size_t d_out() const = 0;
  virtual bool is_quantum() const = 0;
  virtual Matrix forward(const Matrix& x) = 0;
  virtual Matrix backward(const Matrix& dy) = 0;
  virtual std::vector<Param*> params() = 0;
  virtual std::vector<qproj::QuantumProjector*> quantum() { return {}; }
};

class DenseProjection final : public Projection {
 public:
  /// Weight "<name>.weight" (d_out, d_in) ~ U(+-1/sqrt(d_in)); optional zero bias.
  DenseProjection(const std::string& name, std::size_t d_in, std::size_t d_out, bool bias,
                  std::mt19937_64& rng);

  std::size_t d_in() const override { return d_in_; }
  std::size_t d_out() const override { return d_out_; }
  bool is_quantum() const override { return false; }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& dy) override;
  std::vector<Param*> params() override;

  Param& weight() { return w_; }
  Param* bias() { return has_bias_ ? &b_ : nullptr; }

 private:
  std::size_t d_in_, d_out_;
  bool has_bias_;
  Param w_, b_;
  Matrix x_;
};

/// One quantum projector, or `groups` projectors each producing d_out/groups
/// columns (per-head circuits) whose outputs are concatenated.
class QuantumProjection final : public Projection {
 public:
  QuantumProjection(const std::string& prefix, std::size_t d_in, std::size_t d_out,
                    const qproj::ProjectorConfig& cfg, std::size_t groups, std::mt19937_64& rng);

  std::size_t d_in() const override { return d_in_; }
  std::size_t d_out() const override { return d_out_; }
  bool is_quantum() const override { return true; }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& dy) override;
  std::vector<Param*> params() override;
  std::vector<qproj::QuantumProjector*> quantum() override;

 private:
  std::size_t d_in_, d_out_;
  std::vector<std::unique_ptr<qproj::QuantumProjector>> parts_;
};

/// y = (x - mean) / sqrt(var + eps) * gamma + beta over the feature axis.
/// beta may be empty (no shift).
std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gamma,
                               std::span<const double> beta, double eps);

/// Row-wise layer normalization with a trainable scale only.
class LayerNorm {
 public:
  LayerNorm(const std::string& name, std::size_t d, double eps);
  Matrix forward(const Matrix& x);
  Matrix backward(const Matrix& dy);
  Param& weight() { return gamma_; }

 private:
  double eps_;
  Param gamma_;
  Matrix xhat_;
  std::vector<double> rstd_;
};

struct AttentionShape {
  std::size_t batch = 1, seq = 1, heads = 1, kv_heads = 1, head_dim = 1;
};

/// Causal grouped-query attention. q is [B*L, H*dk]; k, v are [B*L, KV*dk];
/// query head h reads key/value head h / (H/KV). When `probs` is given it
/// receives the [B, H, L, L] attention weights (zero above the diagonal).
Matrix causal_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                        const AttentionShape& shape, std::vector<double>* probs = nullptr);

/// Gradients of causal_attention given its saved weights.
void causal_attention_backward(const Matrix& q, const Matrix& k, const Matrix& v,
                               const std::vector<double>& probs, const Matrix& d_out,
                               const AttentionShape& shape, Matrix& dq, Matrix& dk, Matrix& dv);

/// Single-head softmax(Q K^T / sqrt(d_k) + mask) V on [B, L, d_k] tensors.
/// Throws UsageError on shape mismatch.
FeatureTensor attention(const FeatureTensor& q, const FeatureTensor& k, const FeatureTensor& v,
                        bool causal = true);

/// Inverted-dropout mask: 0 with probability `rate`, else 1/(1-rate).
std::vector<double> dropout_mask(std::size_t n, double rate, std::uint64_t seed);

/// Fixed sinusoidal position table, [seq, d].
Matrix positional_encoding(std::size_t seq, std::size_t d);

class TransformerLayer {
 public:
  TransformerLayer(std::size_t index, const ModelConfig& cfg, std::mt19937_64& rng);

  /// `dropout_seed` selects the masks when rate > 0.
  Matrix forward(const Matrix& x, std::size_t batch, std::size_t seq, double dropout,
                 std::uint64_t dropout_seed);
  Matrix backward(const Matrix& dy);

  /// Parameters in report order: norms, attention, FFN gate, down, up.
  std::vector<Param*> params();
  std::vector<qproj::QuantumProjector*> quantum();

  Projection& projection(Target t);
  LayerNorm& input_norm() { return input_norm_; }
  LayerNorm& post_norm() { return post_norm_; }

 private:
  FfnKind ffn_;
  AttentionShape shape_;
  LayerNorm input_norm_, post_norm_;
  std::unique_ptr<Projection> q_, k_, v_, o_, gate_, up_, down_;

  struct Cache {
    Matrix q, k, v, gate, up;
    std::vector<double> probs, mask1, mask2;
  } cache_;
};

class Model {
 public:
  Model(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }

  /// Logits [batch*seq, vocab]. Token ids outside the vocabulary or a
  /// sequence longer than max_position_embeddings raise UsageError.
  Matrix forward(const TokenBatch& tokens);
  /// Accumulates parameter gradients for the last forward pass.
  void backward(const Matrix& d_logits);

  /// Dropout applies to forward passes while rate > 0.
  void set_dropout(double rate, std::uint64_t seed);

  std::vector<Param*> parameters();
  /// The circuit angle vectors of every quantum projector.
  std::vector<Param*> quantum_parameters();
  std::vector<qproj::QuantumProjector*> quantum_projectors();
  std::size_t parameter_count();
  void zero_grad();

  /// Number of forward passes run so far.
  std::uint64_t forward_count() const { return forwards_; }

  Param& embedding() { return embed_; }
  Param& head_bias() { return head_bias_; }
  LayerNorm& final_norm() { return norm_; }
  TransformerLayer& layer(std::size_t i) { return *layers_.at(i); }

 private:
  ModelConfig cfg_;
  Param embed_, head_bias_;
  LayerNorm norm_;
  std::vector<std::unique_ptr<TransformerLayer>> layers_;
  double dropout_ = 0.0;
  std::uint64_t dropout_seed_ = 0;
  std::uint64_t forwards_ = 0;

  TokenBatch tokens_;
  Matrix hidden_;
};

/// Logits as a [B, L, V] tensor.
FeatureTensor model_forward(const TokenBatch& tokens, Model& model);

/// Autoregressive continuation of `prompt`. temperature 0 is greedy (lowest
/// index wins ties); otherwise samples softmax(logits / temperature) with a
/// generator seeded by `seed`. The context is cropped to the last seq_len
/// tokens. An empty prompt raises UsageError.
std::vector<std::int32_t> generate(const std::vector<std::int32_t>& prompt, Model& model,
                                   std::size_t max_new, double temperature, std::uint64_t seed);

}  // namespace hyqut
