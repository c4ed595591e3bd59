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

// Exact statevector simulation for the gate set {H, RY, RZ, CNOT}.
//
// Qubit j is bit j of the basis-state index (qubit 0 is least significant).
// Amplitudes are complex<double>.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyqut::qsim {

using complex_t = std::complex<double>;

inline constexpr int kMaxQubits = 14;
inline constexpr int kMaxOracleQubits = 6;

enum class GateKind : std::uint8_t { H, RY, RZ, CNOT };

std::string_view gate_name(GateKind kind);

struct Gate {
  GateKind kind = GateKind::H;
  int target = 0;
  int control = -1;  // CNOT only
  double angle = 0.0;  // RY/RZ only

  static Gate h(int target) { return {GateKind::H, target, -1, 0.0}; }
  static Gate ry(int target, double angle) { return {GateKind::RY, target, -1, angle}; }
  static Gate rz(int target, double angle) { return {GateKind::RZ, target, -1, angle}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }

  bool is_parametric() const { return kind == GateKind::RY || kind == GateKind::RZ; }
  /// The inverse gate (H and CNOT are self-inverse; rotations negate).
  Gate inverse() const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

class StateVector {
 public:
  /// |0...0> on n_q qubits. Throws ConfigError outside [1, kMaxQubits].
  explicit StateVector(int n_q);
  StateVector(int n_q, std::vector<complex_t> amps);

  int num_qubits() const { return n_q_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const complex_t> amps() const { return amps_; }
  std::span<complex_t> amps() { return amps_; }
  const complex_t& operator[](std::size_t k) const { return amps_[k]; }
  complex_t& operator[](std::size_t k) { return amps_[k]; }

  double norm_squared() const;

  /// In-place gate application. Throws UsageError on bad qubit indices.
  void apply(const Gate& g);
  void apply(std::span<const Gate> circuit);

 private:
  int n_q_;
  std::vector<complex_t> amps_;
};

StateVector init_ground(int n_q);

/// Value-in/value-out form of StateVector::apply.
StateVector apply_gate(StateVector state, const Gate& g);
StateVector apply_circuit(StateVector state, std::span<const Gate> circuit);

/// <Z_j> = P0 - P1 for qubit j.
double expectation_z(const StateVector& state, int j);

/// All n_q single-qubit Z expectations in one pass over the amplitudes.
std::vector<double> measure_all_z(const StateVector& state);

/// Validates gate indices against a register width.
void check_gate(const Gate& g, int n_q);

// Dense-matrix oracle. Only meant for small registers in tests.

class DenseUnitary {
 public:
  explicit DenseUnitary(int n_q);  // identity

  int num_qubits() const { return n_q_; }
  std::size_t dim() const { return dim_; }
  complex_t& at(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
  const complex_t& at(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }

  DenseUnitary operator*(const DenseUnitary& rhs) const;
  std::vector<complex_t> apply(std::span<const complex_t> vec) const;
  /// max |(U^dagger U - I)_ab|.
  double unitarity_error() const;

 private:
  int n_q_;
  std::size_t dim_;
  std::vector<complex_t> entries_;
};

/// Full 2^n x 2^n embedding of a single gate.
DenseUnitary gate_matrix(const Gate& g, int n_q);

/// Product of gate embeddings in circuit order. Throws UsageError when
/// n_q > kMaxOracleQubits.
DenseUnitary dense_unitary(std::span<const Gate> circuit, int n_q);

// Debug text format, one gate per line: `KIND target [control] [angle]`.
// Angles are printed with round-trip precision. Blank lines and lines
// starting with '#' are ignored when parsing.

std::string serialize_circuit(std::span<const Gate> circuit);
std::vector<Gate> parse_circuit(std::string_view text);

}  // namespace hyqut::qsim
