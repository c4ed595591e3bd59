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

// Parameterized circuits for the hybrid projector: angle encoding, the two
// hardware-efficient ansatz variants, and exact adjoint differentiation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyqut/qsim.hpp"

namespace hyqut::qproj {

enum class AnsatzVariant : std::uint8_t {
  A8M,    // two CNOT brick chains per layer, one RY and one RZ per qubit per layer
  B150M,  // ZYZ rotations on every qubit, then a CNOT ring
  Custom  // user rotation sequence per qubit, then a CNOT ring
};

std::string_view variant_name(AnsatzVariant v);
AnsatzVariant parse_variant(std::string_view name);

/// Layer structure of the variational block. Construct through the factory
/// functions; they assert the parameter-count identities.
struct AnsatzDescriptor {
  AnsatzVariant variant = AnsatzVariant::B150M;
  int n_qubits = 10;
  int n_layers = 2;
  /// Custom only: rotations applied to every qubit in each layer, in order.
  std::vector<qsim::GateKind> rotation_template;

  static AnsatzDescriptor a8m(int n_qubits, int n_layers = 2);
  static AnsatzDescriptor b150m(int n_qubits, int n_layers = 2);
  static AnsatzDescriptor custom(int n_qubits, int n_layers, std::vector<qsim::GateKind> rotations);
  static AnsatzDescriptor make(AnsatzVariant v, int n_qubits, int n_layers);

  std::size_t trainable_param_count() const;
  std::size_t rotation_count() const;  // == trainable_param_count()
  std::size_t cnot_count() const;
  std::size_t gate_count() const { return rotation_count() + cnot_count(); }
};

/// Where a rotation angle comes from when a circuit is bound.
enum class AngleSource : std::uint8_t { Fixed, Input, Trainable };

struct BoundGate {
  qsim::Gate gate;  // gate.angle is the value used for Fixed sources
  AngleSource source = AngleSource::Fixed;
  int index = -1;  // into the input or trainable vector
};

/// An ordered gate list whose rotation angles bind to encoded inputs or to
/// trainable parameters. Execution always starts from |0...0>.
class ParametricCircuit {
 public:
  ParametricCircuit(int n_qubits, std::size_t num_inputs, std::size_t num_trainable,
                    std::vector<BoundGate> gates);

  int num_qubits() const { return n_q_; }
  std::size_t num_inputs() const { return num_inputs_; }
  std::size_t num_trainable() const { return num_trainable_; }
  std::span<const BoundGate> gates() const { return gates_; }

  std::vector<qsim::Gate> bind(std::span<const double> inputs, std::span<const double> theta) const;
  qsim::StateVector run(std::span<const double> inputs, std::span<const double> theta) const;
  std::vector<double> measure(std::span<const double> inputs, std::span<const double> theta) const;

  /// Adjoint pass for the scalar C = sum_j upstream[j] * <Z_j>. Gradients
  /// are accumulated (+=) into d_inputs and d_theta; returns the measured
  /// <Z_j> of the forward pass.
  std::vector<double> backward(std::span<const double> inputs, std::span<const double> theta,
                               std::span<const double> upstream, std::span<double> d_inputs,
                               std::span<double> d_theta) const;

 private:
  void check_sizes(std::span<const double> inputs, std::span<const double> theta) const;

  int n_q_;
  std::size_t num_inputs_;
  std::size_t num_trainable_;
  std::vector<BoundGate> gates_;
};

/// H, RY(input j), RZ(input n+j) on every qubit j.
ParametricCircuit encoding_circuit(int n_qubits);
/// Ansatz layers only; all angles are trainable.
ParametricCircuit ansatz_circuit(const AnsatzDescriptor& ansatz);
/// Encoding followed by the ansatz; 2n inputs (theta angles, then phi angles).
ParametricCircuit hybrid_circuit(const AnsatzDescriptor& ansatz);

struct EncodedAngles {
  std::vector<double> theta;  // RY angles
  std::vector<double> phi;    // RZ angles
};

/// theta_j = pi * sigmoid(x_j), phi_j = pi * sigmoid(x_{n+j}) for x of length 2n.
EncodedAngles encode_angles(std::span<const double> x);

/// Product state (x)_j RZ(phi_j) RY(theta_j) H |0>, built amplitude by amplitude.
qsim::StateVector build_encoded_state(std::span<const double> theta, std::span<const double> phi,
                                      int n_qubits);

/// Applies the ansatz layers. theta.size() must equal trainable_param_count().
qsim::StateVector apply_ansatz(qsim::StateVector state, const AnsatzDescriptor& ansatz,
                               std::span<const double> theta);

}  // namespace hyqut::qproj
