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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hyqut/error.hpp"
#include "hyqut/qproj.hpp"
#include "hyqut/vqc.hpp"
#include "test_util.hpp"

using namespace hyqut;
using namespace hyqut::qproj;
using qsim::complex_t;
using qsim::Gate;
using qsim::GateKind;
using qsim::StateVector;

namespace {

// True when the amplitudes, reshaped to 2^k x 2^(n-k) (low k qubits vs the
// rest), have every 2x2 minor equal to zero, i.e. Schmidt rank 1.
bool is_product_across(const StateVector& s, int k, double tol) {
  const std::size_t rows = std::size_t{1} << k;
  const std::size_t cols = s.dim() / rows;
  auto a = [&](std::size_t r, std::size_t c) { return s[c * rows + r]; };
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t i2 = i + 1; i2 < rows; ++i2)
      for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t j2 = j + 1; j2 < cols; ++j2)
          if (std::abs(a(i, j) * a(i2, j2) - a(i, j2) * a(i2, j)) > tol) return false;
  return true;
}

}  // namespace

TEST(Ansatz, ParameterAndGateCensus) {
  EXPECT_EQ(AnsatzDescriptor::a8m(10, 2).trainable_param_count(), 40u);
  auto b = AnsatzDescriptor::b150m(10, 2);
  EXPECT_EQ(b.trainable_param_count(), 60u);
  EXPECT_EQ(b.rotation_count(), 60u);
  EXPECT_EQ(b.cnot_count(), 20u);
  EXPECT_EQ(b.gate_count(), 80u);
  for (int n = 1; n <= 8; ++n)
    for (int layers = 1; layers <= 3; ++layers)
      EXPECT_EQ(AnsatzDescriptor::b150m(n, layers).trainable_param_count(),
                static_cast<std::size_t>(3 * n * layers));
  auto single = AnsatzDescriptor::b150m(1, 1);
  EXPECT_EQ(single.trainable_param_count(), 3u);
  EXPECT_EQ(single.cnot_count(), 0u);
  EXPECT_EQ(AnsatzDescriptor::b150m(2, 1).cnot_count(), 2u);
}

TEST(Ansatz, CircuitMatchesCensus) {
  for (auto v : {AnsatzVariant::A8M, AnsatzVariant::B150M})
    for (int n = 1; n <= 10; ++n) {
      auto d = AnsatzDescriptor::make(v, n, 2);
      auto c = ansatz_circuit(d);
      std::size_t rot = 0, cx = 0;
      for (const auto& g : c.gates()) (g.gate.kind == GateKind::CNOT ? cx : rot)++;
      EXPECT_EQ(rot, d.rotation_count());
      EXPECT_EQ(cx, d.cnot_count());
      EXPECT_EQ(c.num_trainable(), d.trainable_param_count());
    }
}

TEST(Ansatz, RejectsBadShapes) {
  EXPECT_THROW(AnsatzDescriptor::b150m(0, 2), ConfigError);
  EXPECT_THROW(AnsatzDescriptor::b150m(15, 2), ConfigError);
  EXPECT_THROW(AnsatzDescriptor::a8m(4, 0), ConfigError);
  EXPECT_THROW(AnsatzDescriptor::custom(4, 1, {GateKind::H}), ConfigError);
  EXPECT_THROW(parse_variant("C"), ConfigError);
}

TEST(EncodeAngles, Examples) {
  std::vector<double> x{0.0, 0.0};
  auto a = encode_angles(x);
  EXPECT_DOUBLE_EQ(a.theta[0], std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(a.phi[0], std::numbers::pi / 2);
  auto big = encode_angles(std::vector<double>{40.0, -40.0});
  EXPECT_NEAR(big.theta[0], std::numbers::pi, 1e-15);
  EXPECT_NEAR(big.phi[0], 0.0, 1e-15);
  EXPECT_THROW(encode_angles(std::vector<double>{1.0}), UsageError);
}

TEST(EncodeAngles, TanhRangeMapsIntoKnownBand) {
  const double lo = std::numbers::pi / (1 + std::exp(1.0));   // pi * sigmoid(-1)
  const double hi = std::numbers::pi / (1 + std::exp(-1.0));  // pi * sigmoid(1)
  EXPECT_NEAR(lo / std::numbers::pi, 0.2689, 1e-4);
  EXPECT_NEAR(hi / std::numbers::pi, 0.7311, 1e-4);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto x = testutil::random_vector(rng, 8);
    for (auto& v : x) v = std::tanh(v * 5);
    auto a = encode_angles(x);
    for (double t : a.theta) {
      EXPECT_GT(t, lo);
      EXPECT_LT(t, hi);
    }
  }
}

TEST(EncodedState, UniformSuperpositionAtZeroAngles) {
  std::vector<double> zeros(4, 0.0);
  auto s = build_encoded_state(zeros, zeros, 4);
  for (std::size_t k = 0; k < s.dim(); ++k) EXPECT_NEAR(std::abs(s[k] - complex_t(0.25)), 0.0, 1e-15);
}

TEST(EncodedState, SingleQubitHalfPi) {
  std::vector<double> theta{std::numbers::pi / 2}, phi{0.0};
  auto s = build_encoded_state(theta, phi, 1);
  EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - complex_t(1.0)), 0.0, 1e-15);
}

TEST(EncodedState, MatchesGateSequenceAndClosedForm) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    auto theta = testutil::random_vector(rng, n, 0, std::numbers::pi);
    auto phi = testutil::random_vector(rng, n, 0, std::numbers::pi);
    auto direct = build_encoded_state(theta, phi, n);
    std::vector<double> inputs(theta);
    inputs.insert(inputs.end(), phi.begin(), phi.end());
    auto via_gates = encoding_circuit(n).run(inputs, {});
    for (std::size_t k = 0; k < direct.dim(); ++k) EXPECT_LT(std::abs(direct[k] - via_gates[k]), 1e-13);
    auto m = qsim::measure_all_z(direct);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(m[j], -std::sin(theta[j]), 1e-13);
  }
}

TEST(EncodedState, IsProductUntilAnsatzEntangles) {
  std::mt19937_64 rng(6);
  const int n = 4;
  auto theta = testutil::random_vector(rng, n, 0.3, 2.8);
  auto phi = testutil::random_vector(rng, n, 0.3, 2.8);
  auto s = build_encoded_state(theta, phi, n);
  for (int k = 1; k < n; ++k) EXPECT_TRUE(is_product_across(s, k, 1e-12)) << k;
  auto ansatz = AnsatzDescriptor::b150m(n, 2);
  auto params = testutil::random_vector(rng, ansatz.trainable_param_count(), 0, 6.28);
  auto evolved = apply_ansatz(s, ansatz, params);
  EXPECT_FALSE(is_product_across(evolved, 1, 1e-6));
}

TEST(ApplyAnsatz, ZeroParametersLeaveOnlyTheCnotRing) {
  std::mt19937_64 rng(8);
  const int n = 3;
  auto ansatz = AnsatzDescriptor::b150m(n, 2);
  auto s = build_encoded_state(testutil::random_vector(rng, n), testutil::random_vector(rng, n), n);
  std::vector<double> zeros(ansatz.trainable_param_count(), 0.0);
  auto got = apply_ansatz(s, ansatz, zeros);
  auto want = s;
  for (int layer = 0; layer < 2; ++layer)
    for (int j = 0; j < n; ++j) want.apply(Gate::cnot(j, (j + 1) % n));
  for (std::size_t k = 0; k < got.dim(); ++k) EXPECT_LT(std::abs(got[k] - want[k]), 1e-14);
}

TEST(ApplyAnsatz, TwoQubitLayerMatchesIndependentDenseConstruction) {
  std::mt19937_64 rng(12);
  auto ansatz = AnsatzDescriptor::b150m(2, 1);
  auto p = testutil::random_vector(rng, 6, -3, 3);
  // qubit j uses p[3j] = alpha, p[3j+1] = beta, p[3j+2] = gamma.
  auto zyz = [](double a, double b, double g) {
    auto rz = [](double t) {
      return std::array<std::array<complex_t, 2>, 2>{
          {{std::polar(1.0, -t / 2), 0.0}, {0.0, std::polar(1.0, t / 2)}}};
    };
    auto ry = [](double t) {
      double c = std::cos(t / 2), s = std::sin(t / 2);
      return std::array<std::array<complex_t, 2>, 2>{{{c, -s}, {s, c}}};
    };
    auto mul = [](auto x, auto y) {
      std::array<std::array<complex_t, 2>, 2> z{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) z[i][j] += x[i][k] * y[k][j];
      return z;
    };
    return mul(rz(a), mul(ry(b), rz(g)));
  };
  auto m0 = zyz(p[0], p[1], p[2]);
  auto m1 = zyz(p[3], p[4], p[5]);
  // Kronecker product with qubit 0 as the low bit: U[r][c] = m1[r1][c1] m0[r0][c0].
  qsim::DenseUnitary rot(2);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rot.at(r, c) = m1[r >> 1][c >> 1] * m0[r & 1][c & 1];
  std::vector<Gate> ring{Gate::cnot(0, 1), Gate::cnot(1, 0)};
  auto full = qsim::dense_unitary(ring, 2) * rot;

  auto input = build_encoded_state(std::vector<double>{0.7, 1.9}, std::vector<double>{2.2, 0.4}, 2);
  auto want = full.apply(input.amps());
  auto got = apply_ansatz(input, ansatz, p);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(got[k] - want[k]), 1e-13);
}

TEST(ApplyAnsatz, RejectsWrongParameterCount) {
  auto ansatz = AnsatzDescriptor::a8m(3, 2);
  EXPECT_THROW(apply_ansatz(StateVector(3), ansatz, std::vector<double>(5)), UsageError);
  EXPECT_THROW(apply_ansatz(StateVector(2), ansatz, std::vector<double>(12)), UsageError);
}

TEST(FiniteDifference, QuadraticIsExact) {
  int calls = 0;
  auto loss = [&](std::span<const double> t) {
    ++calls;
    return t[0] * t[0] + t[1] * t[1];
  };
  auto g = quantum_grad_fd(loss, std::vector<double>{1.0, -2.0}, 1e-4);
  EXPECT_NEAR(g[0], 2.0, 1e-9);
  EXPECT_NEAR(g[1], -4.0, 1e-9);
  EXPECT_EQ(calls, 4);
}

TEST(FiniteDifference, ConstantGivesZero) {
  auto g = quantum_grad_fd([](std::span<const double>) { return 3.5; }, std::vector<double>(5, 1.0));
  for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(FiniteDifference, SingleQubitDerivativeIsMinusCos) {
  auto circuit = ParametricCircuit(1, 0, 1,
                                   {{Gate::h(0), AngleSource::Fixed, -1},
                                    {Gate{GateKind::RY, 0, -1, 0.0}, AngleSource::Trainable, 0}});
  for (double theta : {-2.0, -0.3, 0.0, 0.9, 2.5}) {
    auto g = quantum_grad_fd([&](std::span<const double> t) { return circuit.measure({}, t)[0]; },
                             std::vector<double>{theta}, 1e-4);
    EXPECT_NEAR(g[0], -std::cos(theta), 1e-6);
  }
}

TEST(FiniteDifference, ValidatesDeltaAndFiniteness) {
  auto ok = [](std::span<const double>) { return 0.0; };
  EXPECT_THROW(quantum_grad_fd(ok, std::vector<double>{1.0}, 1e-5), ConfigError);
  EXPECT_THROW(quantum_grad_fd(ok, std::vector<double>{1.0}, 1e-2), ConfigError);
  auto bad = [](std::span<const double> t) { return t[1] > 2.0 ? NAN : 0.0; };
  try {
    quantum_grad_fd(bad, std::vector<double>{0.0, 2.0}, 1e-4);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("parameter 1"), std::string::npos);
  }
}

TEST(Adjoint, MatchesFiniteDifferenceOnRandomCircuits) {
  for (int n : {2, 4}) {
    std::mt19937_64 rng(100 + n);
    auto circuit = hybrid_circuit(AnsatzDescriptor::b150m(n, 2));
    auto inputs = testutil::random_vector(rng, 2 * n, 0.1, 3.0);
    auto theta = testutil::random_vector(rng, circuit.num_trainable(), 0, 6.28);
    auto weights = testutil::random_vector(rng, n);
    auto loss_of = [&](std::span<const double> in, std::span<const double> th) {
      auto m = circuit.measure(in, th);
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += weights[j] * m[j];
      return s;
    };
    std::vector<double> d_in(inputs.size(), 0.0), d_th(theta.size(), 0.0);
    circuit.backward(inputs, theta, weights, d_in, d_th);
    auto fd_th = quantum_grad_fd([&](std::span<const double> t) { return loss_of(inputs, t); }, theta);
    auto fd_in = quantum_grad_fd([&](std::span<const double> x) { return loss_of(x, theta); }, inputs);
    EXPECT_LT(testutil::max_rel_error(d_th, fd_th, 1e-5, 1e-8), 1e-5);
    EXPECT_LT(testutil::max_rel_error(d_in, fd_in, 1e-5, 1e-8), 1e-5);
  }
}

TEST(Adjoint, TrailingRzHasZeroGradient) {
  auto circuit = ParametricCircuit(
      2, 0, 3,
      {{Gate::h(0), AngleSource::Fixed, -1},
       {Gate{GateKind::RY, 1, -1, 0.0}, AngleSource::Trainable, 0},
       {Gate::cnot(0, 1), AngleSource::Fixed, -1},
       {Gate{GateKind::RY, 0, -1, 0.0}, AngleSource::Trainable, 1},
       {Gate{GateKind::RZ, 1, -1, 0.0}, AngleSource::Trainable, 2}});
  std::vector<double> theta{0.4, 1.1, 2.3}, d_theta(3, 0.0), d_in;
  circuit.backward({}, theta, std::vector<double>{0.7, -1.3}, d_in, d_theta);
  EXPECT_NEAR(d_theta[2], 0.0, 1e-10);
  EXPECT_GT(std::abs(d_theta[0]) + std::abs(d_theta[1]), 1e-3);
}
