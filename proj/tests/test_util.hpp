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

// Shared helpers for the test binaries.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hyqut/qsim.hpp"
#include "hyqut/tensor.hpp"

namespace hyqut::testutil {

inline std::vector<qsim::Gate> random_circuit(std::mt19937_64& rng, int n_q, int n_gates) {
  std::vector<qsim::Gate> gates;
  for (int i = 0; i < n_gates; ++i) {
    int kind = static_cast<int>(rng() % (n_q >= 2 ? 4 : 3));
    int t = static_cast<int>(rng() % n_q);
    double angle = uniform(rng, -2 * std::numbers::pi, 2 * std::numbers::pi);
    switch (kind) {
      case 0: gates.push_back(qsim::Gate::h(t)); break;
      case 1: gates.push_back(qsim::Gate::ry(t, angle)); break;
      case 2: gates.push_back(qsim::Gate::rz(t, angle)); break;
      default: {
        int c = static_cast<int>(rng() % (n_q - 1));
        if (c >= t) ++c;
        gates.push_back(qsim::Gate::cnot(c, t));
      }
    }
  }
  return gates;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

/// |a - f| / max(|a|, |f|, atol / rtol): the worst ratio stays below rtol
/// exactly when every component satisfies |a - f| <= max(rtol * scale, atol).
inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& f,
                            double rtol, double atol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double scale = std::max({std::abs(a[i]), std::abs(f[i]), atol / rtol});
    worst = std::max(worst, std::abs(a[i] - f[i]) / scale);
  }
  return worst;
}

}  // namespace hyqut::testutil
