// Copyright 2026 The swapkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace swapkit {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

constexpr double kPi = std::numbers::pi;

// Raised when a computation produces values that violate its mathematical
// contract (negative probability mass, non-physical spectrum roots, ...).
// Kept distinct from std::invalid_argument so callers can separate "you
// passed garbage" from "the numbers went bad".
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// exp(-i 2pi num/den), exact at the quarter points so parity-style weights
// come out as exact +/-1 and +/-i rather than cos/sin round-off.
inline Complex unit_root(long long num, long long den) {
  num %= den;
  if (num < 0) num += den;
  if (num == 0) return {1.0, 0.0};
  if (2 * num == den) return {-1.0, 0.0};
  if (4 * num == den) return {0.0, -1.0};
  if (4 * num == 3 * den) return {0.0, 1.0};
  const double angle =
      -2.0 * kPi * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

inline double inf_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  Matrix gram = u.adjoint() * u;
  gram -= Matrix::Identity(u.rows(), u.cols());
  return inf_norm(gram) < tol;
}

}  // namespace swapkit
