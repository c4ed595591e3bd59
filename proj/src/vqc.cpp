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

#include "hyqut/vqc.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "hyqut/error.hpp"

namespace hyqut::qproj {

using qsim::Gate;
using qsim::GateKind;
using qsim::StateVector;
using qsim::complex_t;

std::string_view variant_name(AnsatzVariant v) {
  switch (v) {
    case AnsatzVariant::A8M: return "A8M";
    case AnsatzVariant::B150M: return "B150M";
    case AnsatzVariant::Custom: return "Custom";
  }
  return "?";
}

AnsatzVariant parse_variant(std::string_view name) {
  if (name == "A8M") return AnsatzVariant::A8M;
  if (name == "B150M") return AnsatzVariant::B150M;
  if (name == "Custom") return AnsatzVariant::Custom;
  throw ConfigError("unknown ansatz variant '" + std::string(name) + "' (expected A8M|B150M)");
}

namespace {

void check_shape(int n_qubits, int n_layers) {
  if (n_qubits < 1 || n_qubits > qsim::kMaxQubits)
    throw ConfigError("n_q must lie in [1, " + std::to_string(qsim::kMaxQubits) + "], got " +
                      std::to_string(n_qubits));
  if (n_layers < 1) throw ConfigError("n_layers must be positive");
}

std::size_t ring_cnots(int n) { return n >= 2 ? static_cast<std::size_t>(n) : 0; }

void append_ring(std::vector<BoundGate>& out, int n) {
  if (n < 2) return;
  for (int j = 0; j < n; ++j) out.push_back({Gate::cnot(j, (j + 1) % n), AngleSource::Fixed, -1});
}

void append_brick(std::vector<BoundGate>& out, int n, int first) {
  for (int j = first; j + 1 < n; j += 2) out.push_back({Gate::cnot(j, j + 1), AngleSource::Fixed, -1});
}

BoundGate trainable(GateKind kind, int qubit, int index) {
  return {Gate{kind, qubit, -1, 0.0}, AngleSource::Trainable, index};
}

}  // namespace

AnsatzDescriptor AnsatzDescriptor::a8m(int n_qubits, int n_layers) {
  check_shape(n_qubits, n_layers);
  AnsatzDescriptor d{AnsatzVariant::A8M, n_qubits, n_layers, {}};
  if (d.trainable_param_count() != static_cast<std::size_t>(2 * n_qubits * n_layers))
    throw ConfigError("A8M parameter identity violated");
  return d;
}

AnsatzDescriptor AnsatzDescriptor::b150m(int n_qubits, int n_layers) {
  check_shape(n_qubits, n_layers);
  AnsatzDescriptor d{AnsatzVariant::B150M, n_qubits, n_layers, {}};
  if (d.trainable_param_count() != static_cast<std::size_t>(3 * n_qubits * n_layers))
    throw ConfigError("B150M parameter identity violated");
  return d;
}

AnsatzDescriptor AnsatzDescriptor::custom(int n_qubits, int n_layers,
                                          std::vector<GateKind> rotations) {
  check_shape(n_qubits, n_layers);
  if (rotations.empty()) throw ConfigError("custom ansatz needs at least one rotation");
  for (auto k : rotations)
    if (k != GateKind::RY && k != GateKind::RZ)
      throw ConfigError("custom ansatz rotations must be RY or RZ");
  return {AnsatzVariant::Custom, n_qubits, n_layers, std::move(rotations)};
}

AnsatzDescriptor AnsatzDescriptor::make(AnsatzVariant v, int n_qubits, int n_layers) {
  switch (v) {
    case AnsatzVariant::A8M: return a8m(n_qubits, n_layers);
    case AnsatzVariant::B150M: return b150m(n_qubits, n_layers);
    case AnsatzVariant::Custom: break;
  }
  throw ConfigError("Custom ansatz needs an explicit rotation template");
}

std::size_t AnsatzDescriptor::trainable_param_count() const {
  std::size_t per_qubit = 0;
  switch (variant) {
    case AnsatzVariant::A8M: per_qubit = 2; break;
    case AnsatzVariant::B150M: per_qubit = 3; break;
    case AnsatzVariant::Custom: per_qubit = rotation_template.size(); break;
  }
  return per_qubit * static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(n_layers);
}

std::size_t AnsatzDescriptor::rotation_count() const { return trainable_param_count(); }

std::size_t AnsatzDescriptor::cnot_count() const {
  std::size_t per_layer = variant == AnsatzVariant::A8M
                              ? static_cast<std::size_t>(n_qubits - 1)
                              : ring_cnots(n_qubits);
  return per_layer * static_cast<std::size_t>(n_layers);
}

ParametricCircuit::ParametricCircuit(int n_qubits, std::size_t num_inputs,
                                     std::size_t num_trainable, std::vector<BoundGate> gates)
    : n_q_(n_qubits), num_inputs_(num_inputs), num_trainable_(num_trainable),
      gates_(std::move(gates)) {
  for (const auto& bg : gates_) {
    qsim::check_gate(bg.gate, n_q_);
    if (bg.source == AngleSource::Fixed) continue;
    if (!bg.gate.is_parametric()) throw UsageError("only rotations can bind an angle");
    std::size_t limit = bg.source == AngleSource::Input ? num_inputs_ : num_trainable_;
    if (bg.index < 0 || static_cast<std::size_t>(bg.index) >= limit)
      throw UsageError("bound angle index out of range");
  }
}

void ParametricCircuit::check_sizes(std::span<const double> inputs,
                                    std::span<const double> theta) const {
  if (inputs.size() != num_inputs_)
    throw UsageError("circuit expects " + std::to_string(num_inputs_) + " input angles, got " +
                     std::to_string(inputs.size()));
  if (theta.size() != num_trainable_)
    throw UsageError("circuit expects " + std::to_string(num_trainable_) +
                     " trainable parameters, got " + std::to_string(theta.size()));
}

std::vector<Gate> ParametricCircuit::bind(std::span<const double> inputs,
                                          std::span<const double> theta) const {
  check_sizes(inputs, theta);
  std::vector<Gate> out;
  out.reserve(gates_.size());
  for (const auto& bg : gates_) {
    Gate g = bg.gate;
    if (bg.source == AngleSource::Input) g.angle = inputs[bg.index];
    if (bg.source == AngleSource::Trainable) g.angle = theta[bg.index];
    out.push_back(g);
  }
  return out;
}

StateVector ParametricCircuit::run(std::span<const double> inputs,
                                   std::span<const double> theta) const {
  StateVector s(n_q_);
  s.apply(bind(inputs, theta));
  return s;
}

std::vector<double> ParametricCircuit::measure(std::span<const double> inputs,
                                               std::span<const double> theta) const {
  return qsim::measure_all_z(run(inputs, theta));
}

namespace {

// <lambda| G |psi> for the rotation generator G (sigma_y or sigma_z) on `target`.
complex_t generator_overlap(const StateVector& lambda, const StateVector& psi, GateKind kind,
                            int target) {
  const std::size_t tbit = std::size_t{1} << target;
  const auto l = lambda.amps();
  const auto p = psi.amps();
  complex_t acc{0.0, 0.0};
  if (kind == GateKind::RZ) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      complex_t t = std::conj(l[k]) * p[k];
      acc += (k & tbit) ? -t : t;
    }
  } else {
    const complex_t i{0.0, 1.0};
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k & tbit) continue;
      // sigma_y |psi>: component 0 = -i psi_1, component 1 = i psi_0
      acc += std::conj(l[k]) * (-i * p[k | tbit]) + std::conj(l[k | tbit]) * (i * p[k]);
    }
  }
  return acc;
}

}  // namespace

std::vector<double> ParametricCircuit::backward(std::span<const double> inputs,
                                                std::span<const double> theta,
                                                std::span<const double> upstream,
                                                std::span<double> d_inputs,
                                                std::span<double> d_theta) const {
  check_sizes(inputs, theta);
  if (upstream.size() != static_cast<std::size_t>(n_q_))
    throw UsageError("upstream gradient must have one entry per qubit");
  if (d_inputs.size() != num_inputs_ || d_theta.size() != num_trainable_)
    throw UsageError("gradient buffers have the wrong size");

  const auto bound = bind(inputs, theta);
  StateVector psi(n_q_);
  psi.apply(bound);
  std::vector<double> meas = qsim::measure_all_z(psi);

  // lambda = (sum_j g_j Z_j) |psi>, diagonal in the computational basis
  StateVector lambda = psi;
  {
    auto amps = lambda.amps();
    for (std::size_t k = 0; k < amps.size(); ++k) {
      double w = 0.0;
      for (int j = 0; j < n_q_; ++j) w += ((k >> j) & 1) ? -upstream[j] : upstream[j];
      amps[k] *= w;
    }
  }

  for (std::size_t idx = bound.size(); idx-- > 0;) {
    const BoundGate& bg = gates_[idx];
    if (bg.source != AngleSource::Fixed) {
      // d/dangle of U = (-i/2) G U  =>  dC/dangle = Im <lambda| G |psi>
      double grad = generator_overlap(lambda, psi, bg.gate.kind, bg.gate.target).imag();
      if (bg.source == AngleSource::Input)
        d_inputs[bg.index] += grad;
      else
        d_theta[bg.index] += grad;
    }
    const Gate inv = bound[idx].inverse();
    psi.apply(inv);
    lambda.apply(inv);
  }
  return meas;
}

ParametricCircuit encoding_circuit(int n_qubits) {
  check_shape(n_qubits, 1);
  std::vector<BoundGate> gates;
  for (int j = 0; j < n_qubits; ++j) {
    gates.push_back({Gate::h(j), AngleSource::Fixed, -1});
    gates.push_back({Gate{GateKind::RY, j, -1, 0.0}, AngleSource::Input, j});
    gates.push_back({Gate{GateKind::RZ, j, -1, 0.0}, AngleSource::Input, n_qubits + j});
  }
  return ParametricCircuit(n_qubits, 2 * static_cast<std::size_t>(n_qubits), 0, std::move(gates));
}

namespace {

std::vector<BoundGate> ansatz_gates(const AnsatzDescriptor& a) {
  const int n = a.n_qubits;
  std::vector<BoundGate> gates;
  int p = 0;
  for (int layer = 0; layer < a.n_layers; ++layer) {
    switch (a.variant) {
      case AnsatzVariant::A8M: {
        append_brick(gates, n, 0);
        for (int j = 0; j < n; ++j)
          gates.push_back(trainable(j % 2 ? GateKind::RY : GateKind::RZ, j, p + j));
        append_brick(gates, n, 1);
        for (int j = 0; j < n; ++j)
          gates.push_back(trainable(j % 2 ? GateKind::RZ : GateKind::RY, j, p + n + j));
        p += 2 * n;
        break;
      }
      case AnsatzVariant::B150M: {
        // RZ(alpha) RY(beta) RZ(gamma): gamma acts first
        for (int j = 0; j < n; ++j) {
          gates.push_back(trainable(GateKind::RZ, j, p + 3 * j + 2));
          gates.push_back(trainable(GateKind::RY, j, p + 3 * j + 1));
          gates.push_back(trainable(GateKind::RZ, j, p + 3 * j));
        }
        append_ring(gates, n);
        p += 3 * n;
        break;
      }
      case AnsatzVariant::Custom: {
        const int r = static_cast<int>(a.rotation_template.size());
        for (int j = 0; j < n; ++j)
          for (int s = 0; s < r; ++s) gates.push_back(trainable(a.rotation_template[s], j, p + r * j + s));
        append_ring(gates, n);
        p += r * n;
        break;
      }
    }
  }
  return gates;
}

}  // namespace

ParametricCircuit ansatz_circuit(const AnsatzDescriptor& ansatz) {
  return ParametricCircuit(ansatz.n_qubits, 0, ansatz.trainable_param_count(),
                           ansatz_gates(ansatz));
}

ParametricCircuit hybrid_circuit(const AnsatzDescriptor& ansatz) {
  auto enc = encoding_circuit(ansatz.n_qubits);
  std::vector<BoundGate> gates(enc.gates().begin(), enc.gates().end());
  auto body = ansatz_gates(ansatz);
  gates.insert(gates.end(), body.begin(), body.end());
  return ParametricCircuit(ansatz.n_qubits, enc.num_inputs(), ansatz.trainable_param_count(),
                           std::move(gates));
}

EncodedAngles encode_angles(std::span<const double> x) {
  if (x.size() % 2 != 0 || x.empty()) throw UsageError("encoding input must have even length 2n_q");
  const std::size_t n = x.size() / 2;
  auto scaled_sigmoid = [](double v) { return std::numbers::pi / (1.0 + std::exp(-v)); };
  EncodedAngles out;
  out.theta.resize(n);
  out.phi.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.theta[j] = scaled_sigmoid(x[j]);
    out.phi[j] = scaled_sigmoid(x[n + j]);
  }
  return out;
}

StateVector build_encoded_state(std::span<const double> theta, std::span<const double> phi,
                                int n_qubits) {
  if (theta.size() != static_cast<std::size_t>(n_qubits) ||
      phi.size() != static_cast<std::size_t>(n_qubits))
    throw UsageError("expected " + std::to_string(n_qubits) + " theta and phi angles");
  StateVector state(n_qubits);
  auto amps = state.amps();
  const double r = 1.0 / std::numbers::sqrt2;
  std::size_t filled = 1;
  for (int j = 0; j < n_qubits; ++j) {
    const double c = std::cos(theta[j] / 2), s = std::sin(theta[j] / 2);
    const complex_t v0 = r * (c - s) * std::polar(1.0, -phi[j] / 2);
    const complex_t v1 = r * (s + c) * std::polar(1.0, phi[j] / 2);
    for (std::size_t k = 0; k < filled; ++k) {
      amps[k + filled] = amps[k] * v1;
      amps[k] *= v0;
    }
    filled *= 2;
  }
  return state;
}

StateVector apply_ansatz(StateVector state, const AnsatzDescriptor& ansatz,
                         std::span<const double> theta) {
  if (state.num_qubits() != ansatz.n_qubits) throw UsageError("state width does not match ansatz");
  if (theta.size() != ansatz.trainable_param_count())
    throw UsageError("ansatz expects " + std::to_string(ansatz.trainable_param_count()) +
                     " parameters, got " + std::to_string(theta.size()));
  state.apply(ansatz_circuit(ansatz).bind({}, theta));
  return state;
}

}  // namespace hyqut::qproj
