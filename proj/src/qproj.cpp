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

#include "hyqut/qproj.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyqut/error.hpp"
#include "hyqut/parallel.hpp"

namespace hyqut::qproj {

std::string_view expand_mode_name(ExpandMode m) { return m == ExpandMode::Full ? "full" : "scalar"; }

ExpandMode parse_expand_mode(std::string_view name) {
  if (name == "full") return ExpandMode::Full;
  if (name == "scalar") return ExpandMode::Scalar;
  throw ConfigError("unknown expand_mode '" + std::string(name) + "' (expected scalar|full)");
}

FeatureTensor compress(const FeatureTensor& x, std::span<const double> w_down,
                       std::span<const double> b_down) {
  const std::size_t width = b_down.size();
  if (width == 0 || width % 2 != 0) throw UsageError("compress: b_down must have length 2n_q");
  if (w_down.size() != width * x.width) throw UsageError("compress: W_down shape mismatch");
  Matrix y = linear(flatten_batch(x), w_down, width, b_down);
  for (auto& v : y.data) v = std::tanh(v);
  return unflatten_batch(y, x.batch, x.seq);
}

FeatureTensor expand(const FeatureTensor& m, std::span<const double> w_up,
                     std::span<const double> b_up, ExpandMode mode) {
  const std::size_t d_out = b_up.size();
  const std::size_t in = mode == ExpandMode::Full ? m.width : 1;
  if (w_up.size() != d_out * in) throw UsageError("expand: W_up shape does not match mode");
  Matrix src = flatten_batch(m);
  if (mode == ExpandMode::Scalar) {
    Matrix mean(src.rows, 1);
    for (std::size_t r = 0; r < src.rows; ++r) {
      double s = 0.0;
      for (double v : src.row(r)) s += v;
      mean(r, 0) = s / static_cast<double>(src.cols);
    }
    src = std::move(mean);
  }
  Matrix y = linear(src, w_up, d_out, b_up);
  for (auto& v : y.data) v = gelu(v);
  return unflatten_batch(y, m.batch, m.seq);
}

namespace {

std::vector<double> row_angles(std::span<const double> compressed) {
  std::vector<double> a(compressed.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::numbers::pi * sigmoid(compressed[i]);
  return a;
}

}  // namespace

Matrix measure_rows(const Matrix& compressed, const ParametricCircuit& circuit,
                    std::span<const double> theta) {
  if (compressed.cols != circuit.num_inputs()) throw UsageError("measure_rows: width mismatch");
  Matrix out(compressed.rows, static_cast<std::size_t>(circuit.num_qubits()));
  parallel_for(compressed.rows, [&](std::size_t r) {
    auto m = circuit.measure(row_angles(compressed.row(r)), theta);
    std::copy(m.begin(), m.end(), out.row(r).begin());
  });
  return out;
}

QuantumProjector::QuantumProjector(std::string prefix, std::size_t d_in, std::size_t d_out,
                                   const ProjectorConfig& cfg, std::mt19937_64& rng)
    : d_in_(d_in), d_out_(d_out), ansatz_(cfg.ansatz()), circuit_(hybrid_circuit(ansatz_)),
      mode_(cfg.expand_mode) {
  if (d_in == 0 || d_out == 0) throw ConfigError("projector widths must be positive");
  const std::size_t n = static_cast<std::size_t>(ansatz_.n_qubits);
  const std::size_t up_in = mode_ == ExpandMode::Full ? n : 1;
  reduce_w_ = Param(prefix + ".reduce_proj.weight", {2 * n, d_in});
  reduce_b_ = Param(prefix + ".reduce_proj.bias", {2 * n});
  theta_ = Param(prefix + ".mq_layers.0.weight", {ansatz_.trainable_param_count()});
  expand_w_ = Param(prefix + ".dense_expand.weight", {d_out, up_in});
  expand_b_ = Param(prefix + ".dense_expand.bias", {d_out});

  const double down_bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  for (auto& v : reduce_w_.value) v = uniform(rng, -down_bound, down_bound);
  for (auto& v : theta_.value) v = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double up_bound = 1.0 / std::sqrt(static_cast<double>(up_in));
  for (auto& v : expand_w_.value) v = uniform(rng, -up_bound, up_bound);
}

std::vector<Param*> QuantumProjector::params() {
  return {&reduce_w_, &reduce_b_, &theta_, &expand_w_, &expand_b_};
}

Matrix QuantumProjector::forward(const Matrix& x) {
  if (x.cols != d_in_)
    throw UsageError("projector expects width " + std::to_string(d_in_) + ", got " +
                     std::to_string(x.cols));
  Cache c;
  c.x = x;
  c.compressed = linear(x, reduce_w_.value, reduce_b_.size(), reduce_b_.value);
  for (auto& v : c.compressed.data) v = std::tanh(v);
  c.measured = measure_rows(c.compressed, circuit_, theta_.value);
  evaluations_ += x.rows;

  if (mode_ == ExpandMode::Full) {
    c.preact = linear(c.measured, expand_w_.value, d_out_, expand_b_.value);
  } else {
    Matrix mean(x.rows, 1);
    for (std::size_t r = 0; r < x.rows; ++r) {
      double s = 0.0;
      for (double v : c.measured.row(r)) s += v;
      mean(r, 0) = s / static_cast<double>(c.measured.cols);
    }
    c.preact = linear(mean, expand_w_.value, d_out_, expand_b_.value);
  }
  Matrix y = c.preact;
  for (auto& v : y.data) v = gelu(v);
  cache_ = std::move(c);
  return y;
}

Matrix QuantumProjector::backward(const Matrix& dy) {
  if (!cache_) throw UsageError("projector backward called without a cached forward pass");
  const Cache& c = *cache_;
  if (dy.rows != c.x.rows || dy.cols != d_out_) throw UsageError("projector backward: dy shape");
  const std::size_t rows = dy.rows;
  const std::size_t n = static_cast<std::size_t>(ansatz_.n_qubits);

  Matrix dz = dy;
  for (std::size_t i = 0; i < dz.data.size(); ++i) dz.data[i] *= gelu_grad(c.preact.data[i]);

  Matrix dm(rows, n);
  if (mode_ == ExpandMode::Full) {
    dm = linear_backward(c.measured, expand_w_.value, dz, expand_w_.grad, expand_b_.grad);
  } else {
    Matrix mean(rows, 1);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (double v : c.measured.row(r)) s += v;
      mean(r, 0) = s / static_cast<double>(n);
    }
    Matrix dmean = linear_backward(mean, expand_w_.value, dz, expand_w_.grad, expand_b_.grad);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < n; ++j) dm(r, j) = dmean(r, 0) / static_cast<double>(n);
  }

  // Adjoint pass per row into private buffers, then an ordered reduction.
  Matrix d_angles(rows, 2 * n);
  Matrix d_theta_rows(rows, theta_.size());
  parallel_for(rows, [&](std::size_t r) {
    circuit_.backward(row_angles(c.compressed.row(r)), theta_.value, dm.row(r), d_angles.row(r),
                      d_theta_rows.row(r));
  });
  evaluations_ += rows;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < theta_.size(); ++k) theta_.grad[k] += d_theta_rows(r, k);

  Matrix dpre(rows, 2 * n);
  for (std::size_t i = 0; i < dpre.data.size(); ++i) {
    const double cval = c.compressed.data[i];
    const double s = sigmoid(cval);
    dpre.data[i] = d_angles.data[i] * std::numbers::pi * s * (1.0 - s) * (1.0 - cval * cval);
  }
  angle_grads_ = std::move(d_angles);
  return linear_backward(c.x, reduce_w_.value, dpre, reduce_w_.grad, reduce_b_.grad);
}

ProjectorGradients quantum_grad_adjoint(QuantumProjector& p, const Matrix& dy) {
  for (auto* prm : p.params()) prm->zero_grad();
  ProjectorGradients g;
  g.input = p.backward(dy);
  g.angles = p.angle_gradients();
  g.theta = p.theta().grad;
  g.w_down = p.reduce_weight().grad;
  g.b_down = p.reduce_bias().grad;
  g.w_up = p.expand_weight().grad;
  g.b_up = p.expand_bias().grad;
  return g;
}

FeatureTensor projector_forward(const FeatureTensor& x, QuantumProjector& p) {
  Matrix y = p.forward(flatten_batch(x));
  p.clear_cache();
  return unflatten_batch(y, x.batch, x.seq);
}

std::vector<double> quantum_grad_fd(const std::function<double(std::span<const double>)>& loss,
                                    std::span<const double> theta, double delta) {
  if (!(delta >= 1e-4 && delta <= 1e-3))
    throw ConfigError("finite-difference delta must lie in [1e-4, 1e-3]");
  std::vector<double> work(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double orig = work[j];
    work[j] = orig + delta;
    const double up = loss(work);
    work[j] = orig - delta;
    const double down = loss(work);
    work[j] = orig;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw NumericalError("non-finite loss while differentiating parameter " + std::to_string(j));
    grad[j] = (up - down) / (2.0 * delta);
  }
  return grad;
}

GradcheckReport gradcheck(const AnsatzDescriptor& ansatz, std::uint64_t seed, double delta,
                          double floor) {
  std::mt19937_64 rng(seed);
  const ParametricCircuit circuit = hybrid_circuit(ansatz);
  std::vector<double> inputs(circuit.num_inputs()), theta(circuit.num_trainable()),
      weights(static_cast<std::size_t>(ansatz.n_qubits));
  for (auto& v : inputs) v = uniform(rng, 0.0, std::numbers::pi);
  for (auto& v : theta) v = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  for (auto& v : weights) v = uniform(rng, -1.0, 1.0);

  std::vector<double> d_inputs(inputs.size(), 0.0), adjoint(theta.size(), 0.0);
  circuit.backward(inputs, theta, weights, d_inputs, adjoint);

  GradcheckReport report;
  report.params = theta.size();
  auto objective = [&](std::span<const double> angles) {
    ++report.loss_evaluations;
    const auto m = circuit.measure(inputs, angles);
    double c = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) c += weights[j] * m[j];
    return c;
  };
  const auto fd = quantum_grad_fd(objective, theta, delta);
  for (std::size_t i = 0; i < fd.size(); ++i) {
    const double scale = std::max({std::abs(adjoint[i]), std::abs(fd[i]), floor});
    report.max_rel_error = std::max(report.max_rel_error, std::abs(adjoint[i] - fd[i]) / scale);
  }
  return report;
}

}  // namespace hyqut::qproj
