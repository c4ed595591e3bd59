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

#include "hyqut/tensor.hpp"

#include <cmath>
#include <numbers>

#include "hyqut/error.hpp"

namespace hyqut {

Matrix flatten_batch(const FeatureTensor& x) {
  Matrix m(x.batch * x.seq, x.width);
  m.data = x.data;
  return m;
}

FeatureTensor unflatten_batch(const Matrix& m, std::size_t batch, std::size_t seq) {
  if (batch * seq != m.rows)
    throw UsageError("cannot unflatten " + std::to_string(m.rows) + " rows into " +
                     std::to_string(batch) + "x" + std::to_string(seq));
  FeatureTensor x(batch, seq, m.cols);
  x.data = m.data;
  return x;
}

Param::Param(std::string n, std::vector<std::size_t> s) : name(std::move(n)), shape(std::move(s)) {
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  value.assign(count, 0.0);
  grad.assign(count, 0.0);
}

void Param::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double normal(std::mt19937_64& rng, double mean, double stddev) {
  // Box-Muller; u1 in (0, 1]
  double u1 = 1.0 - uniform01(rng);
  double u2 = uniform01(rng);
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix linear(const Matrix& x, std::span<const double> w, std::size_t out,
              std::span<const double> b) {
  const std::size_t in = x.cols;
  if (w.size() != out * in) throw UsageError("linear: weight shape does not match input width");
  if (!b.empty() && b.size() != out) throw UsageError("linear: bias length mismatch");
  Matrix y(x.rows, out);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* xr = x.data.data() + r * in;
    double* yr = y.data.data() + r * out;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = w.data() + o * in;
      double acc = b.empty() ? 0.0 : b[o];
      for (std::size_t i = 0; i < in; ++i) acc += xr[i] * wo[i];
      yr[o] = acc;
    }
  }
  return y;
}

Matrix linear_backward(const Matrix& x, std::span<const double> w, const Matrix& dy,
                       std::span<double> dw, std::span<double> db) {
  const std::size_t in = x.cols, out = dy.cols;
  if (dy.rows != x.rows || w.size() != out * in || dw.size() != out * in)
    throw UsageError("linear_backward: shape mismatch");
  Matrix dx(x.rows, in);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* xr = x.data.data() + r * in;
    const double* gr = dy.data.data() + r * out;
    double* dxr = dx.data.data() + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = gr[o];
      if (g == 0.0) continue;
      const double* wo = w.data() + o * in;
      double* dwo = dw.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        dxr[i] += g * wo[i];
        dwo[i] += g * xr[i];
      }
    }
    if (!db.empty())
      for (std::size_t o = 0; o < out; ++o) db[o] += gr[o];
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace hyqut
