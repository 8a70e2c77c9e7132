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

// Matrix permanents.
//
// permanent() is Ryser's inclusion-exclusion formula with Gray-code subset
// updates, O(2^n * n).  permanent_repeated() evaluates the permanent of a
// matrix whose rows/columns are repetitions of a small template matrix, as
// produced by photon-occupation substitution; collapsing identical columns
// into counts turns the 2^s subset sum into a product of (count+1)-ary
// digits, which is exponentially cheaper for high occupations.

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "swapkit/common.hpp"

namespace swapkit {

inline Complex permanent(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("permanent: matrix must be square");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return {1.0, 0.0};
  if (n > 62) throw std::invalid_argument("permanent: dimension too large");

  std::vector<Complex> row_sum(static_cast<std::size_t>(n), Complex(0, 0));
  Complex total(0.0, 0.0);
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t prev_gray = 0;
  for (std::uint64_t k = 1; k < limit; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t changed = gray ^ prev_gray;
    const int col = std::countr_zero(changed);
    const double sign_col = (gray & changed) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i)
      row_sum[static_cast<std::size_t>(i)] += sign_col * a(i, col);
    Complex prod(1.0, 0.0);
    for (int i = 0; i < n; ++i) prod *= row_sum[static_cast<std::size_t>(i)];
    const bool odd = (std::popcount(gray) & 1) != 0;
    total += odd ? -prod : prod;
    prev_gray = gray;
  }
  return ((n & 1) ? -total : total);
}

namespace detail {

inline const std::vector<double>& factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (std::size_t i = 1; i < t.size(); ++i)
      t[i] = t[i - 1] * static_cast<double>(i);
    return t;
  }();
  return table;
}

inline double factorial(int n) {
  const auto& table = factorial_table();
  if (n < 0 || static_cast<std::size_t>(n) >= table.size())
    throw std::invalid_argument("factorial argument out of range");
  return table[static_cast<std::size_t>(n)];
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

}  // namespace detail

// Permanent of the matrix built from `u` by repeating row i row_mult[i]
// times and column j col_mult[j] times.  Requires sum(row_mult) ==
// sum(col_mult); both may be zero (empty matrix, permanent 1).
inline Complex permanent_repeated(const Matrix& u,
                                  const std::vector<int>& row_mult,
                                  const std::vector<int>& col_mult) {
  if (u.rows() != static_cast<Eigen::Index>(row_mult.size()) ||
      u.cols() != static_cast<Eigen::Index>(col_mult.size()))
    throw std::invalid_argument("permanent_repeated: multiplicity size mismatch");
  int total_rows = 0, total_cols = 0;
  for (int m : row_mult) {
    if (m < 0) throw std::invalid_argument("permanent_repeated: negative row multiplicity");
    total_rows += m;
  }
  for (int m : col_mult) {
    if (m < 0) throw std::invalid_argument("permanent_repeated: negative column multiplicity");
    total_cols += m;
  }
  if (total_rows != total_cols)
    throw std::invalid_argument("permanent_repeated: row/column totals differ");
  const int s = total_rows;
  if (s == 0) return {1.0, 0.0};

  // Ryser over column subsets, with identical columns merged: a subset is
  // a count vector 0 <= c_j <= col_mult[j]; its weight is the product of
  // binomial(col_mult[j], c_j), and row sums become sum_j c_j * u(i, j),
  // each raised to the row multiplicity.
  const int cols = static_cast<int>(col_mult.size());
  std::vector<int> count(static_cast<std::size_t>(cols), 0);
  std::vector<Complex> row_sum(row_mult.size(), Complex(0, 0));
  Complex total(0.0, 0.0);
  int depth = 0;  // number of selected columns, sum of count[]
  for (;;) {
    // Advance the mixed-radix counter; maintain row sums incrementally.
    int j = 0;
    while (j < cols && count[static_cast<std::size_t>(j)] ==
                           col_mult[static_cast<std::size_t>(j)]) {
      depth -= count[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < row_mult.size(); ++i)
        row_sum[i] -= static_cast<double>(count[static_cast<std::size_t>(j)]) *
                      u(static_cast<Eigen::Index>(i), j);
      count[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == cols) break;
    ++count[static_cast<std::size_t>(j)];
    ++depth;
    for (std::size_t i = 0; i < row_mult.size(); ++i)
      row_sum[i] += u(static_cast<Eigen::Index>(i), j);

    double weight = 1.0;
    for (int c = 0; c < cols; ++c)
      weight *= detail::binomial(col_mult[static_cast<std::size_t>(c)],
                                 count[static_cast<std::size_t>(c)]);
    Complex prod(1.0, 0.0);
    for (std::size_t i = 0; i < row_mult.size(); ++i)
      for (int rep = 0; rep < row_mult[i]; ++rep) prod *= row_sum[i];
    const bool odd = (depth & 1) != 0;
    total += (odd ? -weight : weight) * prod;
  }
  return ((s & 1) ? -total : total);
}

}  // namespace swapkit
