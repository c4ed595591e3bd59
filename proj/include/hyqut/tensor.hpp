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

// Dense row-major matrices plus the handful of kernels the model needs.
// Weight matrices follow the (out_features, in_features) layout, so a linear
// map computes Y = X W^T + b.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hyqut {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Activations shaped [batch, seq, width], stored row-major.
struct FeatureTensor {
  std::size_t batch = 0;
  std::size_t seq = 0;
  std::size_t width = 0;
  std::vector<double> data;

  FeatureTensor() = default;
  FeatureTensor(std::size_t b, std::size_t l, std::size_t d, double fill = 0.0)
      : batch(b), seq(l), width(d), data(b * l * d, fill) {}

  double& at(std::size_t b, std::size_t t, std::size_t k) { return data[(b * seq + t) * width + k]; }
  double at(std::size_t b, std::size_t t, std::size_t k) const {
    return data[(b * seq + t) * width + k];
  }

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;
};

/// Row i of the result is token (i / seq, i % seq).
Matrix flatten_batch(const FeatureTensor& x);
/// Inverse of flatten_batch; m.rows must equal batch * seq.
FeatureTensor unflatten_batch(const Matrix& m, std::size_t batch, std::size_t seq);

/// A named trainable tensor with its gradient accumulator.
struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;

  Param() = default;
  Param(std::string n, std::vector<std::size_t> s);
  std::size_t size() const { return value.size(); }
  void zero_grad();
};

std::string shape_string(const std::vector<std::size_t>& shape);

// Deterministic sampling; std distributions are implementation-defined.
double uniform01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);
double normal(std::mt19937_64& rng, double mean, double stddev);

/// Y = X W^T (+ b). W is (out, in); b may be empty.
Matrix linear(const Matrix& x, std::span<const double> w, std::size_t out,
              std::span<const double> b = {});
/// Accumulates dW (+= dY^T X) and db (+= column sums of dY, skipped when
/// empty) and returns dX = dY W.
Matrix linear_backward(const Matrix& x, std::span<const double> w, const Matrix& dy,
                       std::span<double> dw, std::span<double> db);

double gelu(double x);
double gelu_grad(double x);
double sigmoid(double x);

}  // namespace hyqut
