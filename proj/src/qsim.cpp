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

#include "hyqut/qsim.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "hyqut/error.hpp"

namespace hyqut::qsim {

namespace {

using Mat2 = std::array<std::array<complex_t, 2>, 2>;

Mat2 single_qubit_matrix(const Gate& g) {
  using std::cos, std::sin;
  const double r = 1.0 / std::numbers::sqrt2;
  switch (g.kind) {
    case GateKind::H:
      return {{{r, r}, {r, -r}}};
    case GateKind::RY: {
      double c = cos(g.angle / 2), s = sin(g.angle / 2);
      return {{{c, -s}, {s, c}}};
    }
    case GateKind::RZ:
      return {{{std::polar(1.0, -g.angle / 2), 0.0}, {0.0, std::polar(1.0, g.angle / 2)}}};
    case GateKind::CNOT:
      break;
  }
  throw UsageError("CNOT has no single-qubit matrix");
}

}  // namespace

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

Gate Gate::inverse() const {
  Gate g = *this;
  if (is_parametric()) g.angle = -angle;
  return g;
}

void check_gate(const Gate& g, int n_q) {
  if (g.target < 0 || g.target >= n_q)
    throw UsageError("gate target " + std::to_string(g.target) + " out of range for " +
                     std::to_string(n_q) + " qubits");
  if (g.kind == GateKind::CNOT) {
    if (g.control < 0 || g.control >= n_q)
      throw UsageError("CNOT control " + std::to_string(g.control) + " out of range for " +
                       std::to_string(n_q) + " qubits");
    if (g.control == g.target) throw UsageError("CNOT control equals target");
  }
}

StateVector::StateVector(int n_q) : n_q_(n_q) {
  if (n_q < 1 || n_q > kMaxQubits)
    throw ConfigError("qubit count " + std::to_string(n_q) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
  amps_.assign(std::size_t{1} << n_q, complex_t{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int n_q, std::vector<complex_t> amps) : StateVector(n_q) {
  if (amps.size() != amps_.size())
    throw UsageError("amplitude count " + std::to_string(amps.size()) + " != 2^" +
                     std::to_string(n_q));
  amps_ = std::move(amps);
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void StateVector::apply(const Gate& g) {
  check_gate(g, n_q_);
  const std::size_t dim = amps_.size();
  const std::size_t tbit = std::size_t{1} << g.target;
  complex_t* a = amps_.data();

  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::numbers::sqrt2;
      for (std::size_t k = 0; k < dim; ++k) {
        if (k & tbit) continue;
        complex_t x = a[k], y = a[k | tbit];
        a[k] = (x + y) * r;
        a[k | tbit] = (x - y) * r;
      }
      break;
    }
    case GateKind::RY: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      for (std::size_t k = 0; k < dim; ++k) {
        if (k & tbit) continue;
        complex_t x = a[k], y = a[k | tbit];
        a[k] = c * x - s * y;
        a[k | tbit] = s * x + c * y;
      }
      break;
    }
    case GateKind::RZ: {
      const complex_t p0 = std::polar(1.0, -g.angle / 2);
      const complex_t p1 = std::conj(p0);
      for (std::size_t k = 0; k < dim; ++k) a[k] *= (k & tbit) ? p1 : p0;
      break;
    }
    case GateKind::CNOT: {
      const std::size_t cbit = std::size_t{1} << g.control;
      for (std::size_t k = 0; k < dim; ++k)
        if ((k & cbit) && !(k & tbit)) std::swap(a[k], a[k | tbit]);
      break;
    }
  }
}

void StateVector::apply(std::span<const Gate> circuit) {
  for (const auto& g : circuit) apply(g);
}

StateVector init_ground(int n_q) { return StateVector(n_q); }

StateVector apply_gate(StateVector state, const Gate& g) {
  state.apply(g);
  return state;
}

StateVector apply_circuit(StateVector state, std::span<const Gate> circuit) {
  state.apply(circuit);
  return state;
}

double expectation_z(const StateVector& state, int j) {
  if (j < 0 || j >= state.num_qubits())
    throw UsageError("qubit index " + std::to_string(j) + " out of range");
  const std::size_t bit = std::size_t{1} << j;
  double p0 = 0.0, p1 = 0.0;
  auto amps = state.amps();
  for (std::size_t k = 0; k < amps.size(); ++k) (k & bit ? p1 : p0) += std::norm(amps[k]);
  return p0 - p1;
}

std::vector<double> measure_all_z(const StateVector& state) {
  const int n = state.num_qubits();
  std::vector<double> p0(n, 0.0), p1(n, 0.0);
  auto amps = state.amps();
  for (std::size_t k = 0; k < amps.size(); ++k) {
    double p = std::norm(amps[k]);
    for (int j = 0; j < n; ++j) ((k >> j) & 1 ? p1[j] : p0[j]) += p;
  }
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = p0[j] - p1[j];
  return out;
}

DenseUnitary::DenseUnitary(int n_q)
    : n_q_(n_q), dim_(std::size_t{1} << n_q), entries_(dim_ * dim_, complex_t{0.0, 0.0}) {
  for (std::size_t i = 0; i < dim_; ++i) at(i, i) = 1.0;
}

DenseUnitary DenseUnitary::operator*(const DenseUnitary& rhs) const {
  if (rhs.dim_ != dim_) throw UsageError("dense unitary dimension mismatch");
  DenseUnitary out(n_q_);
  std::fill(out.entries_.begin(), out.entries_.end(), complex_t{0.0, 0.0});
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = 0; k < dim_; ++k) {
      complex_t a = at(i, k);
      if (a == complex_t{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < dim_; ++j) out.at(i, j) += a * rhs.at(k, j);
    }
  return out;
}

std::vector<complex_t> DenseUnitary::apply(std::span<const complex_t> vec) const {
  if (vec.size() != dim_) throw UsageError("vector length does not match unitary dimension");
  std::vector<complex_t> out(dim_, complex_t{0.0, 0.0});
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out[i] += at(i, j) * vec[j];
  return out;
}

double DenseUnitary::unitarity_error() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < dim_; ++a)
    for (std::size_t b = 0; b < dim_; ++b) {
      complex_t s = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) s += std::conj(at(k, a)) * at(k, b);
      if (a == b) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

DenseUnitary gate_matrix(const Gate& g, int n_q) {
  check_gate(g, n_q);
  DenseUnitary u(n_q);
  const std::size_t dim = u.dim();
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) u.at(r, c) = 0.0;

  if (g.kind == GateKind::CNOT) {
    for (std::size_t c = 0; c < dim; ++c) {
      std::size_t r = ((c >> g.control) & 1) ? c ^ (std::size_t{1} << g.target) : c;
      u.at(r, c) = 1.0;
    }
    return u;
  }
  const Mat2 m = single_qubit_matrix(g);
  const std::size_t tbit = std::size_t{1} << g.target;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if ((r & ~tbit) == (c & ~tbit)) u.at(r, c) = m[(r >> g.target) & 1][(c >> g.target) & 1];
  return u;
}

DenseUnitary dense_unitary(std::span<const Gate> circuit, int n_q) {
  if (n_q < 1 || n_q > kMaxOracleQubits)
    throw UsageError("dense oracle limited to " + std::to_string(kMaxOracleQubits) +
                     " qubits, got " + std::to_string(n_q));
  DenseUnitary u(n_q);
  for (const auto& g : circuit) u = gate_matrix(g, n_q) * u;
  return u;
}

std::string serialize_circuit(std::span<const Gate> circuit) {
  std::string out;
  char buf[64];
  for (const auto& g : circuit) {
    out += gate_name(g.kind);
    out += ' ';
    out += std::to_string(g.target);
    if (g.kind == GateKind::CNOT) {
      out += ' ';
      out += std::to_string(g.control);
    }
    if (g.is_parametric()) {
      auto res = std::to_chars(buf, buf + sizeof buf, g.angle);
      out += ' ';
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

std::vector<Gate> parse_circuit(std::string_view text) {
  std::vector<Gate> gates;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      return UsageError("circuit line " + std::to_string(lineno) + ": " + why);
    };
    Gate g;
    if (!(ls >> g.target)) throw fail("missing target");
    if (kind == "H") {
      g.kind = GateKind::H;
    } else if (kind == "RY" || kind == "RZ") {
      g.kind = kind == "RY" ? GateKind::RY : GateKind::RZ;
      if (!(ls >> g.angle)) throw fail("missing angle");
    } else if (kind == "CNOT") {
      g.kind = GateKind::CNOT;
      if (!(ls >> g.control)) throw fail("missing control");
    } else {
      throw fail("unknown gate '" + kind + "'");
    }
    std::string extra;
    if (ls >> extra) throw fail("trailing token '" + extra + "'");
    gates.push_back(g);
  }
  return gates;
}

}  // namespace hyqut::qsim
