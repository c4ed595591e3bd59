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

// The hybrid quantum projector: a drop-in replacement for a d_in -> d_out
// linear layer.
//
//   compress   C = tanh(X W_down^T + b_down)             [rows, 2n_q]
//   encode     theta = pi*sigmoid(C[:, :n]), phi = pi*sigmoid(C[:, n:])
//   evolve     encoded product state -> ansatz layers
//   measure    M[r, j] = <Z_j>                           [rows, n_q]
//   expand     full:   GELU(M W_up^T + b_up)             W_up is (d_out, n_q)
//              scalar: GELU(mean_j(M) W_up^T + b_up)     W_up is (d_out, 1)
//
// Rows (tokens) are independent circuit instances and are evaluated in
// parallel. Parameter gradients are reduced over rows in row order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyqut/tensor.hpp"
#include "hyqut/vqc.hpp"

namespace hyqut::qproj {

enum class ExpandMode : std::uint8_t { Full, Scalar };

std::string_view expand_mode_name(ExpandMode m);
ExpandMode parse_expand_mode(std::string_view name);

struct ProjectorConfig {
  int n_qubits = 10;
  int n_layers = 2;
  AnsatzVariant variant = AnsatzVariant::A8M;
  ExpandMode expand_mode = ExpandMode::Scalar;
  /// One projector per attention head for q/k/v instead of one wide projector.
  bool per_head = false;

  AnsatzDescriptor ansatz() const { return AnsatzDescriptor::make(variant, n_qubits, n_layers); }
  friend bool operator==(const ProjectorConfig&, const ProjectorConfig&) = default;
};

/// tanh(X W_down^T + b_down). w_down is (2n_q, d_in).
FeatureTensor compress(const FeatureTensor& x, std::span<const double> w_down,
                       std::span<const double> b_down);

/// Expansion stage. w_up is (d_out, n_q) for Full or (d_out, 1) for Scalar.
FeatureTensor expand(const FeatureTensor& m, std::span<const double> w_up,
                     std::span<const double> b_up, ExpandMode mode);

/// Per-row encode -> evolve -> measure over a [rows, 2n_q] matrix.
Matrix measure_rows(const Matrix& compressed, const ParametricCircuit& circuit,
                    std::span<const double> theta);

class QuantumProjector {
 public:
  /// `prefix` names the parameters, e.g. "layers.0.mlp.gate_proj".
  QuantumProjector(std::string prefix, std::size_t d_in, std::size_t d_out,
                   const ProjectorConfig& cfg, std::mt19937_64& rng);

  std::size_t d_in() const { return d_in_; }
  std::size_t d_out() const { return d_out_; }
  int n_qubits() const { return ansatz_.n_qubits; }
  const AnsatzDescriptor& ansatz() const { return ansatz_; }
  const ParametricCircuit& circuit() const { return circuit_; }
  ExpandMode expand_mode() const { return mode_; }

  Param& reduce_weight() { return reduce_w_; }
  Param& reduce_bias() { return reduce_b_; }
  Param& theta() { return theta_; }
  Param& expand_weight() { return expand_w_; }
  Param& expand_bias() { return expand_b_; }
  std::vector<Param*> params();

  /// Forward over [rows, d_in]; caches what backward needs.
  Matrix forward(const Matrix& x);
  /// Uses the cached forward pass; accumulates parameter gradients and
  /// returns dL/dX. Throws UsageError when no forward pass is cached.
  Matrix backward(const Matrix& dy);
  void clear_cache() { cache_.reset(); }

  /// dL/d(angle) per row from the last backward pass, [rows, 2n_q].
  const Matrix& angle_gradients() const { return angle_grads_; }

  /// Number of circuit instances executed so far (forward and backward).
  std::uint64_t circuit_evaluations() const { return evaluations_; }

 private:
  struct Cache {
    Matrix x, compressed, measured, preact;
  };

  std::size_t d_in_, d_out_;
  AnsatzDescriptor ansatz_;
  ParametricCircuit circuit_;
  ExpandMode mode_;
  Param reduce_w_, reduce_b_, theta_, expand_w_, expand_b_;
  std::optional<Cache> cache_;
  Matrix angle_grads_;
  std::uint64_t evaluations_ = 0;
};

struct ProjectorGradients {
  std::vector<double> theta, w_down, b_down, w_up, b_up;
  Matrix angles;  // [rows, 2n_q]
  Matrix input;   // [rows, d_in]
};

/// Exact gradients of sum(dy * Y) for the cached forward pass, with the
/// projector's accumulators zeroed first.
ProjectorGradients quantum_grad_adjoint(QuantumProjector& p, const Matrix& dy);

/// Single-shot forward over a feature tensor (no cache kept).
FeatureTensor projector_forward(const FeatureTensor& x, QuantumProjector& p);

/// Central differences (L(t_j + d) - L(t_j - d)) / 2d for every component,
/// using exactly 2 * theta.size() loss evaluations. delta must lie in
/// [1e-4, 1e-3]; a non-finite loss raises NumericalError naming the index.
std::vector<double> quantum_grad_fd(const std::function<double(std::span<const double>)>& loss,
                                    std::span<const double> theta, double delta = 1e-4);

struct GradcheckReport {
  std::size_t params = 0;
  std::uint64_t loss_evaluations = 0;
  double max_rel_error = 0.0;
};

/// Draws inputs, angles and observable weights g from `seed` and compares
/// adjoint against central-difference gradients of sum_j g_j <Z_j> with
/// respect to the circuit angles. The error of a component is
/// |a - f| / max(|a|, |f|, floor).
GradcheckReport gradcheck(const AnsatzDescriptor& ansatz, std::uint64_t seed,
                          double delta = 1e-4, double floor = 1e-3);

}  // namespace hyqut::qproj
