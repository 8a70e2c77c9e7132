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

#include <catch2/catch_amalgamated.hpp>

#include "swapkit/permanent.hpp"
#include "support/test_helpers.hpp"

using namespace swapkit;
using testkit::Rng;

TEST_CASE("permanent against the permutation-sum definition") {
  Rng rng(100);
  for (int n = 1; n <= 7; ++n) {
    Matrix a(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = rng.complex_gaussian();
    const Complex fast = permanent(a);
    const Complex slow = testkit::permanent_bruteforce(a);
    REQUIRE(std::abs(fast - slow) < 1e-10 * std::max(1.0, std::abs(slow)));
  }
}

TEST_CASE("permanent closed forms") {
  SECTION("empty matrix") {
    REQUIRE(permanent(Matrix(0, 0)) == Complex(1.0, 0.0));
  }
  SECTION("identity") {
    REQUIRE(std::abs(permanent(Matrix::Identity(5, 5)) - Complex(1, 0)) <
            1e-14);
  }
  SECTION("all-ones n x n gives n!") {
    for (int n = 1; n <= 6; ++n) {
      double fact = 1.0;
      for (int i = 2; i <= n; ++i) fact *= i;
      REQUIRE(std::abs(permanent(Matrix::Ones(n, n)) - Complex(fact, 0)) <
              1e-10 * fact);
    }
  }
  SECTION("non-square rejected") {
    REQUIRE_THROWS_AS(permanent(Matrix::Ones(2, 3)), std::invalid_argument);
  }
}

TEST_CASE("permanent_repeated equals the permanent of the expanded matrix") {
  Rng rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const int base = rng.uniform_int(1, 3);
    Matrix u(base, base);
    for (int r = 0; r < base; ++r)
      for (int c = 0; c < base; ++c) u(r, c) = rng.complex_gaussian();

    // Random multiplicities with matching totals, expanded size <= 7.
    std::vector<int> rm(static_cast<std::size_t>(base)),
        cm(static_cast<std::size_t>(base));
    int total = 0;
    for (int i = 0; i < base; ++i) {
      rm[static_cast<std::size_t>(i)] = rng.uniform_int(0, 2);
      total += rm[static_cast<std::size_t>(i)];
    }
    int left = total;
    for (int i = 0; i < base; ++i) {
      const int v = (i == base - 1) ? left : rng.uniform_int(0, left);
      cm[static_cast<std::size_t>(i)] = v;
      left -= v;
    }

    Matrix expanded(total, total);
    int rr = 0;
    for (int i = 0; i < base; ++i)
      for (int rep = 0; rep < rm[static_cast<std::size_t>(i)]; ++rep, ++rr) {
        int cc = 0;
        for (int j = 0; j < base; ++j)
          for (int rep2 = 0; rep2 < cm[static_cast<std::size_t>(j)];
               ++rep2, ++cc)
            expanded(rr, cc) = u(i, j);
      }

    const Complex collapsed = permanent_repeated(u, rm, cm);
    const Complex direct = permanent(expanded);
    REQUIRE(std::abs(collapsed - direct) <
            1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("permanent_repeated closed forms and preconditions") {
  SECTION("all multiplicities zero is the empty permanent") {
    const Matrix u = Matrix::Ones(2, 2);
    REQUIRE(permanent_repeated(u, {0, 0}, {0, 0}) == Complex(1.0, 0.0));
  }
  SECTION("single entry repeated twice") {
    Matrix u(1, 1);
    u(0, 0) = Complex(0.3, 0.4);
    const Complex expect = 2.0 * u(0, 0) * u(0, 0);
    REQUIRE(std::abs(permanent_repeated(u, {2}, {2}) - expect) < 1e-14);
  }
  SECTION("mismatched totals rejected") {
    const Matrix u = Matrix::Ones(2, 2);
    REQUIRE_THROWS_AS(permanent_repeated(u, {1, 0}, {1, 1}),
                      std::invalid_argument);
  }
  SECTION("negative multiplicity rejected") {
    const Matrix u = Matrix::Ones(2, 2);
    REQUIRE_THROWS_AS(permanent_repeated(u, {-1, 2}, {1, 0}),
                      std::invalid_argument);
  }
  SECTION("size mismatch rejected") {
    const Matrix u = Matrix::Ones(2, 2);
    REQUIRE_THROWS_AS(permanent_repeated(u, {1}, {1}), std::invalid_argument);
  }
}

TEST_CASE("unit_root exactness at quarter turns") {
  REQUIRE(unit_root(0, 4) == Complex(1.0, 0.0));
  REQUIRE(unit_root(2, 4) == Complex(-1.0, 0.0));
  REQUIRE(unit_root(1, 4) == Complex(0.0, -1.0));
  REQUIRE(unit_root(3, 4) == Complex(0.0, 1.0));
  REQUIRE(unit_root(5, 2) == Complex(-1.0, 0.0));
  REQUIRE(unit_root(-1, 4) == Complex(0.0, 1.0));
  // Generic angle agrees with polar form.
  REQUIRE(std::abs(unit_root(1, 3) -
                   std::polar(1.0, -2.0 * kPi / 3.0)) < 1e-15);
}
