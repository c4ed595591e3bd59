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


#include "hyqut/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyqut/error.hpp"
#include "hyqut/parallel.hpp"

namespace hyqut {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void add_into(Matrix& dst, const Matrix& src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

}  // namespace

DenseProjection::DenseProjection(const std::string& name, std::size_t d_in, std::size_t d_out,
                                 bool bias, std::mt19937_64& rng)
    : d_in_(d_in),
      d_out_(d_out),
      has_bias_(bias),
      w_(name + ".weight", {d_out, d_in}),
      b_(bias ? Param(name + ".bias", {d_out}) : Param()) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (auto& v : w_.value) v = uniform(rng, -bound, bound);
}

Matrix DenseProjection::forward(const Matrix& x) {
  x_ = x;
  return linear(x, w_.value, d_out_, has_bias_ ? std::span<const double>(b_.value)
                                                : std::span<const double>());
}

Matrix DenseProjection::backward(const Matrix& dy) {
  return linear_backward(x_, w_.value, dy, w_.grad,
                         has_bias_ ? std::span<double>(b_.grad) : std::span<double>());
}

std::vector<Param*> DenseProjection::params() {
  if (has_bias_) return {&w_, &b_};
  return {&w_};
}

QuantumProjection::QuantumProjection(const std::string& prefix, std::size_t d_in,
                                     std::size_t d_out, const qproj::ProjectorConfig& cfg,
                                     std::size_t groups, std::mt19937_64& rng)
    : d_in_(d_in), d_out_(d_out) {
  if (groups == 0 || d_out % groups != 0)
    throw ConfigError("per-head projector groups must divide the output width");
  if (groups == 1) {
    parts_.push_back(std::make_unique<qproj::QuantumProjector>(prefix, d_in, d_out, cfg, rng));
    return;
  }
  for (std::size_t g = 0; g < groups; ++g)
    parts_.push_back(std::make_unique<qproj::QuantumProjector>(
        prefix + ".heads." + std::to_string(g), d_in, d_out / groups, cfg, rng));
}

Matrix QuantumProjection::forward(const Matrix& x) {
  if (parts_.size() == 1) return parts_[0]->forward(x);
  const std::size_t w = d_out_ / parts_.size();
  Matrix y(x.rows, d_out_);
  for (std::size_t g = 0; g < parts_.size(); ++g) {
    Matrix part = parts_[g]->forward(x);
    for (std::size_t r = 0; r < x.rows; ++r)
      std::copy(part.row(r).begin(), part.row(r).end(), y.row(r).begin() + g * w);
  }
  return y;
}

Matrix QuantumProjection::backward(const Matrix& dy) {
  if (parts_.size() == 1) return parts_[0]->backward(dy);
  const std::size_t w = d_out_ / parts_.size();
  Matrix dx(dy.rows, d_in_);
  for (std::size_t g = 0; g < parts_.size(); ++g) {
    Matrix part(dy.rows, w);
    for (std::size_t r = 0; r < dy.rows; ++r)
      std::copy_n(dy.row(r).begin() + g * w, w, part.row(r).begin());
    add_into(dx, parts_[g]->backward(part));
  }
  return dx;
}

std::vector<Param*> QuantumProjection::params() {
  std::vector<Param*> out;
  for (auto& p : parts_)
    for (auto* q : p->params()) out.push_back(q);
  return out;
}

std::vector<qproj::QuantumProjector*> QuantumProjection::quantum() {
  std::vector<qproj::QuantumProjector*> out;
  for (auto& p : parts_) out.push_back(p.get());
  return out;
}

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gamma,
                               std::span<const double> beta, double eps) {
  const std::size_t d = x.size();
  if (gamma.size() != d || (!beta.empty() && beta.size() != d))
    throw UsageError("layer_norm: gamma/beta length mismatch");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(d);
  const double rstd = 1.0 / std::sqrt(var + eps);
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i)
    y[i] = (x[i] - mean) * rstd * gamma[i] + (beta.empty() ? 0.0 : beta[i]);
  return y;
}

LayerNorm::LayerNorm(const std::string& name, std::size_t d, double eps)
    : eps_(eps), gamma_(name + ".weight", {d}) {
  std::fill(gamma_.value.begin(), gamma_.value.end(), 1.0);
}

Matrix LayerNorm::forward(const Matrix& x) {
  const std::size_t d = x.cols;
  xhat_ = Matrix(x.rows, d);
  rstd_.assign(x.rows, 0.0);
  Matrix y(x.rows, d);
  for (std::size_t r = 0; r < x.rows; ++r) {
    auto xr = x.row(r);
    double mean = 0.0;
    for (double v : xr) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : xr) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    rstd_[r] = 1.0 / std::sqrt(var + eps_);
    for (std::size_t i = 0; i < d; ++i) {
      xhat_(r, i) = (xr[i] - mean) * rstd_[r];
      y(r, i) = xhat_(r, i) * gamma_.value[i];
    }
  }
  return y;
}

Matrix LayerNorm::backward(const Matrix& dy) {
  const std::size_t d = dy.cols;
  Matrix dx(dy.rows, d);
  std::vector<double> g(d);
  for (std::size_t r = 0; r < dy.rows; ++r) {
    double mean_g = 0.0, mean_gx = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      gamma_.grad[i] += dy(r, i) * xhat_(r, i);
      g[i] = dy(r, i) * gamma_.value[i];
      mean_g += g[i];
      mean_gx += g[i] * xhat_(r, i);
    }
    mean_g /= static_cast<double>(d);
    mean_gx /= static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i)
      dx(r, i) = rstd_[r] * (g[i] - mean_g - xhat_(r, i) * mean_gx);
  }
  return dx;
}

namespace {

void check_attention_shape(const Matrix& q, const Matrix& k, const Matrix& v,
                           const AttentionShape& s) {
  const std::size_t rows = s.batch * s.seq;
  if (s.kv_heads == 0 || s.heads % s.kv_heads != 0)
    throw UsageError("attention: heads must be a multiple of kv_heads");
  if (q.rows != rows || k.rows != rows || v.rows != rows || q.cols != s.heads * s.head_dim ||
      k.cols != s.kv_heads * s.head_dim || v.cols != s.kv_heads * s.head_dim)
    throw UsageError("attention: Q/K/V shapes are inconsistent");
}

}  // namespace

Matrix causal_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                        const AttentionShape& s, std::vector<double>* probs) {
  check_attention_shape(q, k, v, s);
  const std::size_t L = s.seq, dk = s.head_dim, group = s.heads / s.kv_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Matrix out(q.rows, q.cols);
  std::vector<double> local;
  std::vector<double>& p = probs ? *probs : local;
  p.assign(s.batch * s.heads * L * L, 0.0);
  parallel_for(s.batch * s.heads, [&](std::size_t bh) {
    const std::size_t b = bh / s.heads, h = bh % s.heads, kvh = h / group;
    double* pm = p.data() + bh * L * L;
    for (std::size_t t = 0; t < L; ++t) {
      const double* qt = &q.data[(b * L + t) * q.cols + h * dk];
      double* pt = pm + t * L;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u <= t; ++u) {
        const double* ku = &k.data[(b * L + u) * k.cols + kvh * dk];
        double sc = 0.0;
        for (std::size_t i = 0; i < dk; ++i) sc += qt[i] * ku[i];
        pt[u] = sc * scale;
        mx = std::max(mx, pt[u]);
      }
      double z = 0.0;
      for (std::size_t u = 0; u <= t; ++u) z += (pt[u] = std::exp(pt[u] - mx));
      for (std::size_t u = 0; u <= t; ++u) pt[u] /= z;
      double* ot = &out.data[(b * L + t) * out.cols + h * dk];
      for (std::size_t u = 0; u <= t; ++u) {
        const double* vu = &v.data[(b * L + u) * v.cols + kvh * dk];
        for (std::size_t i = 0; i < dk; ++i) ot[i] += pt[u] * vu[i];
      }
    }
  });
  return out;
}

void causal_attention_backward(const Matrix& q, const Matrix& k, const Matrix& v,
                               const std::vector<double>& probs, const Matrix& d_out,
                               const AttentionShape& s, Matrix& dq, Matrix& dk_out,
                               Matrix& dv) {
  check_attention_shape(q, k, v, s);
  const std::size_t L = s.seq, dk = s.head_dim, group = s.heads / s.kv_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  dq = Matrix(q.rows, q.cols);
  dk_out = Matrix(k.rows, k.cols);
  dv = Matrix(v.rows, v.cols);
  // Heads sharing a key/value head write the same rows, so split by batch only.
  parallel_for(s.batch, [&](std::size_t b) {
    std::vector<double> dp(L);
    for (std::size_t h = 0; h < s.heads; ++h) {
      const std::size_t kvh = h / group;
      const double* pm = probs.data() + (b * s.heads + h) * L * L;
      for (std::size_t t = 0; t < L; ++t) {
        const double* pt = pm + t * L;
        const double* go = &d_out.data[(b * L + t) * d_out.cols + h * dk];
        double dot = 0.0;
        for (std::size_t u = 0; u <= t; ++u) {
          const double* vu = &v.data[(b * L + u) * v.cols + kvh * dk];
          double* dvu = &dv.data[(b * L + u) * dv.cols + kvh * dk];
          double acc = 0.0;
          for (std::size_t i = 0; i < dk; ++i) {
            acc += go[i] * vu[i];
            dvu[i] += pt[u] * go[i];
          }
          dp[u] = acc;
          dot += pt[u] * acc;
        }
        const double* qt = &q.data[(b * L + t) * q.cols + h * dk];
        double* dqt = &dq.data[(b * L + t) * dq.cols + h * dk];
        for (std::size_t u = 0; u <= t; ++u) {
          const double ds = pt[u] * (dp[u] - dot) * scale;
          if (ds == 0.0) continue;
          const double* ku = &k.data[(b * L + u) * k.cols + kvh * dk];
          double* dku = &dk_out.data[(b * L + u) * dk_out.cols + kvh * dk];
          for (std::size_t i = 0; i < dk; ++i) {
            dqt[i] += ds * ku[i];
            dku[i] += ds * qt[i];
          }
        }
      }
    }
  });
}

FeatureTensor attention(const FeatureTensor& q, const FeatureTensor& k, const FeatureTensor& v,
                        bool causal) {
  if (q.batch != k.batch || q.batch != v.batch || q.seq != k.seq || k.seq != v.seq ||
      q.width != k.width || q.width != v.width || q.width == 0)
    throw UsageError("attention: Q, K, V must share [B, L, d_k]");
  const std::size_t L = q.seq, d = q.width;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  FeatureTensor out(q.batch, L, d);
  std::vector<double> w(L);
  for (std::size_t b = 0; b < q.batch; ++b)
    for (std::size_t t = 0; t < L; ++t) {
      const std::size_t visible = causal ? t + 1 : L;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < visible; ++u) {
        double sc = 0.0;
        for (std::size_t i = 0; i < d; ++i) sc += q.at(b, t, i) * k.at(b, u, i);
        w[u] = sc * scale;
        mx = std::max(mx, w[u]);
      }
      double z = 0.0;
      for (std::size_t u = 0; u < visible; ++u) z += (w[u] = std::exp(w[u] - mx));
      for (std::size_t u = 0; u < visible; ++u)
        for (std::size_t i = 0; i < d; ++i) out.at(b, t, i) += w[u] / z * v.at(b, u, i);
    }
  return out;
}

std::vector<double> dropout_mask(std::size_t n, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
  std::vector<double> mask(n, 1.0);
  if (rate == 0.0) return mask;
  std::mt19937_64 rng(seed);
  const double keep = 1.0 / (1.0 - rate);
  for (auto& m : mask) m = uniform01(rng) < rate ? 0.0 : keep;
  return mask;
}

Matrix positional_encoding(std::size_t seq, std::size_t d) {
  Matrix pe(seq, d);
  for (std::size_t t = 0; t < seq; ++t)
    for (std::size_t i = 0; i < d; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(d));
      pe(t, i) = i % 2 == 0 ? std::sin(t * freq) : std::cos(t * freq);
    }
  return pe;
}

namespace {

std::unique_ptr<Projection> make_projection(const ModelConfig& cfg, Target t,
                                            const std::string& name, std::size_t d_in,
                                            std::size_t d_out, bool bias, std::size_t groups,
                                            std::mt19937_64& rng) {
  if (cfg.replace.contains(t))
    return std::make_unique<QuantumProjection>(name, d_in, d_out, cfg.projector, groups, rng);
  return std::make_unique<DenseProjection>(name, d_in, d_out, bias, rng);
}

}  // namespace

TransformerLayer::TransformerLayer(std::size_t index, const ModelConfig& cfg,
                                   std::mt19937_64& rng)
    : ffn_(cfg.ffn),
      input_norm_("layers." + std::to_string(index) + ".input_layernorm", cfg.hidden_size,
                  cfg.norm_eps),
      post_norm_("layers." + std::to_string(index) + ".post_attention_layernorm",
                 cfg.hidden_size, cfg.norm_eps) {
  const std::string attn = "layers." + std::to_string(index) + ".self_attn.";
  const std::string mlp = "layers." + std::to_string(index) + ".mlp.";
  const std::size_t d = cfg.hidden_size, kv = cfg.kv_dim(), f = cfg.intermediate_size;
  const bool per_head = cfg.projector.per_head;
  shape_.heads = cfg.num_attention_heads;
  shape_.kv_heads = cfg.num_key_value_heads;
  shape_.head_dim = cfg.head_dim();
  q_ = make_projection(cfg, Target::Wq, attn + "q_proj", d, d, false,
                       per_head ? cfg.num_attention_heads : 1, rng);
  k_ = make_projection(cfg, Target::Wk, attn + "k_proj", d, kv, false,
                       per_head ? cfg.num_key_value_heads : 1, rng);
  v_ = make_projection(cfg, Target::Wv, attn + "v_proj", d, kv, false,
                       per_head ? cfg.num_key_value_heads : 1, rng);
  o_ = make_projection(cfg, Target::Wo, attn + "o_proj", d, d, false, 1, rng);
  if (ffn_ == FfnKind::Gated) gate_ = make_projection(cfg, Target::FfnGate, mlp + "gate_proj", d, f, true, 1, rng);
  down_ = make_projection(cfg, Target::FfnDown, mlp + "down_proj", f, d, true, 1, rng);
  up_ = make_projection(cfg, Target::FfnUp, mlp + "up_proj", d, f, true, 1, rng);
}

Projection& TransformerLayer::projection(Target t) {
  Projection* p = nullptr;
  switch (t) {
    case Target::Wq: p = q_.get(); break;
    case Target::Wk: p = k_.get(); break;
    case Target::Wv: p = v_.get(); break;
    case Target::Wo: p = o_.get(); break;
    case Target::FfnGate: p = gate_.get(); break;
    case Target::FfnUp: p = up_.get(); break;
    case Target::FfnDown: p = down_.get(); break;
  }
  if (!p) throw UsageError("this layer has no gate projection (ffn = plain)");
  return *p;
}

Matrix TransformerLayer::forward(const Matrix& x, std::size_t batch, std::size_t seq,
                                 double dropout, std::uint64_t dropout_seed) {
  shape_.batch = batch;
  shape_.seq = seq;
  auto& c = cache_;

  Matrix h = input_norm_.forward(x);
  c.q = q_->forward(h);
  c.k = k_->forward(h);
  c.v = v_->forward(h);
  Matrix a = o_->forward(causal_attention(c.q, c.k, c.v, shape_, &c.probs));
  c.mask1 = dropout_mask(a.data.size(), dropout, mix_seed(dropout_seed, 1));
  Matrix x2 = x;
  for (std::size_t i = 0; i < x2.data.size(); ++i) x2.data[i] += a.data[i] * c.mask1[i];

  Matrix h2 = post_norm_.forward(x2);
  Matrix f;
  if (ffn_ == FfnKind::Gated) {
    c.gate = gate_->forward(h2);
    c.up = up_->forward(h2);
    Matrix m(c.gate.rows, c.gate.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = gelu(c.gate.data[i]) * c.up.data[i];
    f = down_->forward(m);
  } else {
    c.up = up_->forward(h2);
    Matrix m(c.up.rows, c.up.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = gelu(c.up.data[i]);
    f = down_->forward(m);
  }
  c.mask2 = dropout_mask(f.data.size(), dropout, mix_seed(dropout_seed, 2));
  for (std::size_t i = 0; i < x2.data.size(); ++i) x2.data[i] += f.data[i] * c.mask2[i];
  return x2;
}

Matrix TransformerLayer::backward(const Matrix& dy) {
  auto& c = cache_;
  Matrix df = dy;
  for (std::size_t i = 0; i < df.data.size(); ++i) df.data[i] *= c.mask2[i];
  Matrix dm = down_->backward(df);
  Matrix dh2;
  if (ffn_ == FfnKind::Gated) {
    Matrix dg(dm.rows, dm.cols), du(dm.rows, dm.cols);
    for (std::size_t i = 0; i < dm.data.size(); ++i) {
      const double g = c.gate.data[i];
      du.data[i] = dm.data[i] * gelu(g);
      dg.data[i] = dm.data[i] * c.up.data[i] * gelu_grad(g);
    }
    dh2 = gate_->backward(dg);
    add_into(dh2, up_->backward(du));
  } else {
    for (std::size_t i = 0; i < dm.data.size(); ++i) dm.data[i] *= gelu_grad(c.up.data[i]);
    dh2 = up_->backward(dm);
  }
  Matrix dx2 = dy;
  add_into(dx2, post_norm_.backward(dh2));

  Matrix da = dx2;
  for (std::size_t i = 0; i < da.data.size(); ++i) da.data[i] *= c.mask1[i];
  Matrix d_attn = o_->backward(da);
  Matrix dq, dk, dv;
  causal_attention_backward(c.q, c.k, c.v, c.probs, d_attn, shape_, dq, dk, dv);
  Matrix dh = q_->backward(dq);
  add_into(dh, k_->backward(dk));
  add_into(dh, v_->backward(dv));
  Matrix dx = std::move(dx2);
  add_into(dx, input_norm_.backward(dh));
  return dx;
}

std::vector<Param*> TransformerLayer::params() {
  std::vector<Param*> out{&input_norm_.weight()};
  auto append = [&](Projection* p) {
    if (!p) return;
    for (auto* q : p->params()) out.push_back(q);
  };
  append(q_.get());
  append(k_.get());
  append(v_.get());
  append(o_.get());
  out.push_back(&post_norm_.weight());
  append(gate_.get());
  append(down_.get());
  append(up_.get());
  return out;
}

std::vector<qproj::QuantumProjector*> TransformerLayer::quantum() {
  std::vector<qproj::QuantumProjector*> out;
  for (auto* p : {q_.get(), k_.get(), v_.get(), o_.get(), gate_.get(), down_.get(), up_.get()})
    if (p)
      for (auto* q : p->quantum()) out.push_back(q);
  return out;
}

Model::Model(const ModelConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      embed_("model.embed_tokens.embedding_table", {cfg.vocab_size, cfg.hidden_size}),
      head_bias_("lm_head.bias", {cfg.vocab_size}),
      norm_("model.norm", cfg.hidden_size, cfg.norm_eps) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  for (auto& v : embed_.value) v = normal(rng, 0.0, 0.02);
  for (std::size_t i = 0; i < cfg.num_hidden_layers; ++i)
    layers_.push_back(std::make_unique<TransformerLayer>(i, cfg_, rng));
}

void Model::set_dropout(double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
  dropout_ = rate;
  dropout_seed_ = seed;
}

Matrix Model::forward(const TokenBatch& tokens) {
  const std::size_t B = tokens.batch, L = tokens.seq, d = cfg_.hidden_size;
  if (B == 0 || L == 0 || tokens.ids.size() != B * L)
    throw UsageError("token batch shape does not match its ids");
  if (L > cfg_.max_position_embeddings)
    throw UsageError("sequence length " + std::to_string(L) + " exceeds max_position_embeddings");
  for (auto id : tokens.ids)
    if (id < 0 || static_cast<std::size_t>(id) >= cfg_.vocab_size)
      throw UsageError("token id " + std::to_string(id) + " outside vocabulary of " +
                       std::to_string(cfg_.vocab_size));
  ++forwards_;
  tokens_ = tokens;
  const Matrix pe = positional_encoding(L, d);
  Matrix x(B * L, d);
  for (std::size_t r = 0; r < B * L; ++r) {
    const double* e = embed_.value.data() + static_cast<std::size_t>(tokens.ids[r]) * d;
    for (std::size_t i = 0; i < d; ++i) x(r, i) = e[i] + pe(r % L, i);
  }
  for (std::size_t i = 0; i < layers_.size(); ++i)
    x = layers_[i]->forward(x, B, L, dropout_, mix_seed(dropout_seed_, i));
  hidden_ = norm_.forward(x);
  return linear(hidden_, embed_.value, cfg_.vocab_size, head_bias_.value);
}

void Model::backward(const Matrix& d_logits) {
  const std::size_t d = cfg_.hidden_size;
  if (d_logits.rows != hidden_.rows || d_logits.cols != cfg_.vocab_size)
    throw UsageError("backward: logits gradient shape does not match the last forward pass");
  Matrix dh = linear_backward(hidden_, embed_.value, d_logits, embed_.grad, head_bias_.grad);
  Matrix dx = norm_.backward(dh);
  for (std::size_t i = layers_.size(); i-- > 0;) dx = layers_[i]->backward(dx);
  for (std::size_t r = 0; r < dx.rows; ++r) {
    double* g = embed_.grad.data() + static_cast<std::size_t>(tokens_.ids[r]) * d;
    for (std::size_t i = 0; i < d; ++i) g[i] += dx(r, i);
  }
}

std::vector<Param*> Model::parameters() {
  std::vector<Param*> out{&embed_};
  for (auto& l : layers_)
    for (auto* p : l->params()) out.push_back(p);
  out.push_back(&norm_.weight());
  out.push_back(&head_bias_);
  return out;
}

std::vector<qproj::QuantumProjector*> Model::quantum_projectors() {
  std::vector<qproj::QuantumProjector*> out;
  for (auto& l : layers_)
    for (auto* q : l->quantum()) out.push_back(q);
  return out;
}

std::vector<Param*> Model::quantum_parameters() {
  std::vector<Param*> out;
  for (auto* q : quantum_projectors()) out.push_back(&q->theta());
  return out;
}

std::size_t Model::parameter_count() {
  std::size_t n = 0;
  for (auto* p : parameters()) n += p->size();
  return n;
}

void Model::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

FeatureTensor model_forward(const TokenBatch& tokens, Model& model) {
  return unflatten_batch(model.forward(tokens), tokens.batch, tokens.seq);
}

std::vector<std::int32_t> generate(const std::vector<std::int32_t>& prompt, Model& model,
                                   std::size_t max_new, double temperature, std::uint64_t seed) {
  if (prompt.empty()) throw UsageError("generate: prompt must not be empty");
  if (!(temperature >= 0.0)) throw UsageError("generate: temperature must be >= 0");
  std::mt19937_64 rng(seed);
  std::vector<std::int32_t> seq = prompt;
  const std::size_t window = model.config().seq_len;
  for (std::size_t step = 0; step < max_new; ++step) {
    TokenBatch ctx;
    ctx.batch = 1;
    const std::size_t start = seq.size() > window ? seq.size() - window : 0;
    ctx.ids.assign(seq.begin() + static_cast<std::ptrdiff_t>(start), seq.end());
    ctx.seq = ctx.ids.size();
    Matrix logits = model.forward(ctx);
    auto last = logits.row(logits.rows - 1);
    std::size_t pick = 0;
    if (temperature == 0.0) {
      for (std::size_t i = 1; i < last.size(); ++i)
        if (last[i] > last[pick]) pick = i;
    } else {
      const double mx = *std::max_element(last.begin(), last.end());
      std::vector<double> w(last.size());
      double z = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] = std::exp((last[i] - mx) / temperature));
      double u = uniform01(rng) * z;
      pick = w.size() - 1;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (u < w[i]) {
          pick = i;
          break;
        }
        u -= w[i];
      }
    }
    seq.push_back(static_cast<std::int32_t>(pick));
  }
  return seq;
}

}  // namespace hyqut
