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

#include <Eigen/Eigenvalues>

#include "swapkit/swap_oracle.hpp"
#include "support/test_helpers.hpp"

using namespace swapkit;
using testkit::Rng;

namespace {

MultiModeState antisymmetric_pair() {
  const CutoffConfig cutoff{1, 2};
  return superpose({{Complex(1, 0), fock_state(cutoff, {0, 1})},
                    {Complex(-1, 0), fock_state(cutoff, {1, 0})}});
}

MultiModeState symmetric_pair() {
  const CutoffConfig cutoff{1, 2};
  return superpose({{Complex(1, 0), fock_state(cutoff, {0, 1})},
                    {Complex(1, 0), fock_state(cutoff, {1, 0})}});
}

MultiModeState diagonal_qubit(double p0, double p1) {
  auto basis = enumerate_basis({1, 1});
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = p0;
  rho(1, 1) = p1;
  return MultiModeState::density(std::move(basis), std::move(rho));
}

}  // namespace

TEST_CASE("build_swap ket mapping") {
  SECTION("two registers exchange contents") {
    const SwapOperator v = build_swap({2, 2}, 2);
    const auto& basis = v.basis();
    REQUIRE(v.map_index(basis.index_of({0, 1})) == basis.index_of({1, 0}));
    REQUIRE(v.map_index(basis.index_of({1, 0})) == basis.index_of({0, 1}));
    REQUIRE(v.map_index(basis.index_of({0, 0})) == basis.index_of({0, 0}));
    REQUIRE(v.map_index(basis.index_of({2, 0})) == basis.index_of({0, 2}));
    REQUIRE(v.map_index(basis.index_of({1, 1})) == basis.index_of({1, 1}));
  }
  SECTION("three registers advance one slot") {
    const SwapOperator v = build_swap({1, 3}, 3);
    const auto& basis = v.basis();
    REQUIRE(v.map_index(basis.index_of({1, 0, 0})) ==
            basis.index_of({0, 1, 0}));
    REQUIRE(v.map_index(basis.index_of({0, 1, 0})) ==
            basis.index_of({0, 0, 1}));
    REQUIRE(v.map_index(basis.index_of({0, 0, 1})) ==
            basis.index_of({1, 0, 0}));
  }
  SECTION("two-mode registers move as blocks") {
    const SwapOperator v = build_swap({2, 4}, 2, 2);
    const auto& basis = v.basis();
    REQUIRE(v.map_index(basis.index_of({1, 0, 0, 1})) ==
            basis.index_of({0, 1, 1, 0}));
    REQUIRE(v.map_index(basis.index_of({2, 0, 0, 0})) ==
            basis.index_of({0, 0, 2, 0}));
  }
  SECTION("mode count must factor") {
    REQUIRE_THROWS_AS(build_swap({1, 3}, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(build_swap({1, 4}, 0), std::invalid_argument);
  }
}

TEST_CASE("swap operator algebra") {
  const SwapOperator v = build_swap({2, 3}, 3);
  const int dim = v.basis().dim();
  SECTION("matrix is a permutation matrix") {
    const Matrix m = v.matrix();
    REQUIRE(is_unitary(m, 1e-14));
    for (int c = 0; c < dim; ++c) {
      int units = 0;
      for (int r = 0; r < dim; ++r) {
        if (m(r, c) == Complex(1, 0)) ++units;
        else REQUIRE(m(r, c) == Complex(0, 0));
      }
      REQUIRE(units == 1);
    }
  }
  SECTION("n-th power is the identity") {
    const SwapOperator cycled = v.power(3);
    for (int g = 0; g < dim; ++g) REQUIRE(cycled.map_index(g) == g);
    const SwapOperator id = v.power(0);
    for (int g = 0; g < dim; ++g) REQUIRE(id.map_index(g) == g);
  }
  SECTION("power(2) equals applying twice") {
    const SwapOperator two = v.power(2);
    for (int g = 0; g < dim; ++g)
      REQUIRE(two.map_index(g) == v.map_index(v.map_index(g)));
  }
  SECTION("apply agrees with the dense matrix") {
    Rng rng(300);
    const Matrix m = v.matrix();
    const MultiModeState psi = testkit::random_pure(v.basis_ptr(), rng);
    const MultiModeState vpsi = v.apply(psi);
    REQUIRE((vpsi.amplitudes() - m * psi.amplitudes()).norm() < 1e-14);
    const MultiModeState rho = testkit::random_mixed(v.basis_ptr(), rng);
    const MultiModeState vrho = v.apply(rho);
    REQUIRE(testkit::max_abs_diff(vrho.rho(), m * rho.rho() * m.adjoint()) <
            1e-14);
  }
}

TEST_CASE("swap expectation values") {
  SECTION("antisymmetric two-register state gives -1") {
    const MultiModeState psi = antisymmetric_pair();
    const SwapOperator v = build_swap(psi.cutoff(), 2);
    const Complex val = expect_swap_direct(psi, v);
    REQUIRE(std::abs(val - Complex(-1, 0)) < 1e-12);
  }
  SECTION("orthogonal product state gives 0") {
    const MultiModeState psi = fock_state({1, 2}, {0, 1});
    const SwapOperator v = build_swap(psi.cutoff(), 2);
    REQUIRE(std::abs(expect_swap_direct(psi, v)) < 1e-15);
  }
  SECTION("identical pure product gives +1") {
    Rng rng(301);
    const MultiModeState single =
        testkit::random_pure(enumerate_basis({2, 1}), rng);
    const MultiModeState joint = tensor(single, single);
    const SwapOperator v = build_swap(joint.cutoff(), 2);
    REQUIRE(std::abs(expect_swap_direct(joint, v) - Complex(1, 0)) < 1e-12);
  }
  SECTION("mixed product gives the overlap of the factors") {
    Rng rng(302);
    auto basis = enumerate_basis({2, 1});
    const MultiModeState a = testkit::random_mixed(basis, rng);
    const MultiModeState b = testkit::random_mixed(basis, rng);
    const MultiModeState joint = tensor(a, b);
    const SwapOperator v = build_swap(joint.cutoff(), 2);
    const Complex expected = (a.rho() * b.rho()).trace();
    REQUIRE(std::abs(expect_swap_direct(joint, v) - expected) < 1e-12);
  }
}

TEST_CASE("overlap and purity") {
  Rng rng(303);
  auto basis = enumerate_basis({2, 1});
  SECTION("overlap equals the direct matrix trace") {
    for (int trial = 0; trial < 10; ++trial) {
      const MultiModeState a = testkit::random_mixed(basis, rng);
      const MultiModeState b = testkit::random_mixed(basis, rng);
      const double direct = (a.rho() * b.rho()).trace().real();
      REQUIRE(overlap(a, b) == Catch::Approx(direct).margin(1e-12));
      REQUIRE(overlap(a, b) == Catch::Approx(overlap(b, a)).margin(1e-12));
    }
  }
  SECTION("pure states have unit purity") {
    for (int trial = 0; trial < 5; ++trial)
      REQUIRE(purity(testkit::random_pure(basis, rng)) ==
              Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("frozen diagonal values") {
    REQUIRE(purity(diagonal_qubit(0.5, 0.5)) ==
            Catch::Approx(0.5).margin(1e-12));
    REQUIRE(purity(diagonal_qubit(0.75, 0.25)) ==
            Catch::Approx(0.625).margin(1e-12));
  }
  SECTION("basis mismatch is rejected") {
    const MultiModeState a = testkit::random_pure(basis, rng);
    const MultiModeState b =
        testkit::random_pure(enumerate_basis({3, 1}), rng);
    REQUIRE_THROWS_AS(overlap(a, b), std::invalid_argument);
  }
}

TEST_CASE("pure-state fidelity") {
  Rng rng(304);
  auto basis = enumerate_basis({2, 1});
  SECTION("matches the quadratic form <alpha|rho|alpha>") {
    for (int trial = 0; trial < 10; ++trial) {
      const MultiModeState alpha = testkit::random_pure(basis, rng);
      const MultiModeState rho = testkit::random_mixed(basis, rng);
      const double direct =
          (alpha.amplitudes().adjoint() * rho.rho() * alpha.amplitudes())(0)
              .real();
      REQUIRE(fidelity_pure(alpha, rho) ==
              Catch::Approx(direct).margin(1e-12));
    }
  }
  SECTION("mixed reference is rejected") {
    const MultiModeState rho = testkit::random_mixed(basis, rng);
    REQUIRE_THROWS_AS(fidelity_pure(rho, rho), std::invalid_argument);
  }
}

TEST_CASE("power traces") {
  Rng rng(305);
  auto basis = enumerate_basis({2, 1});
  SECTION("k = 1 is the trace, i.e. 1") {
    const MultiModeState rho = testkit::random_mixed(basis, rng);
    REQUIRE(power_trace(rho, 1) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("frozen value: maximally mixed qubit at k = 3") {
    REQUIRE(power_trace(diagonal_qubit(0.5, 0.5), 3) ==
            Catch::Approx(0.25).margin(1e-12));
  }
  SECTION("matches the eigenvalue power sums") {
    for (int trial = 0; trial < 4; ++trial) {
      const MultiModeState rho = testkit::random_mixed(basis, rng);
      Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.rho(),
                                                   Eigen::EigenvaluesOnly);
      for (int k = 2; k <= 4; ++k) {
        double expected = 0.0;
        for (int i = 0; i < solver.eigenvalues().size(); ++i)
          expected += std::pow(solver.eigenvalues()[i], k);
        REQUIRE(power_trace(rho, k) ==
                Catch::Approx(expected).margin(1e-10));
      }
    }
  }
  SECTION("k = 0 is rejected") {
    const MultiModeState rho = testkit::random_mixed(basis, rng);
    REQUIRE_THROWS_AS(power_trace(rho, 0), std::invalid_argument);
  }
}

TEST_CASE("Hilbert-Schmidt distance") {
  SECTION("orthogonal pure states are at squared distance 2") {
    const MultiModeState zero = fock_state({1, 1}, {0});
    const MultiModeState one = fock_state({1, 1}, {1});
    REQUIRE(hs_distance(zero, one) == Catch::Approx(2.0).margin(1e-12));
  }
  SECTION("pure basis state vs maximally mixed qubit") {
    const MultiModeState zero = fock_state({1, 1}, {0});
    REQUIRE(hs_distance(zero, diagonal_qubit(0.5, 0.5)) ==
            Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("identical states are at distance ~0") {
    Rng rng(306);
    const MultiModeState rho =
        testkit::random_mixed(enumerate_basis({2, 1}), rng);
    REQUIRE(std::abs(hs_distance(rho, rho)) < 1e-12);
  }
}

TEST_CASE("entanglement witness") {
  SECTION("antisymmetric state is witnessed") {
    const WitnessResult r = witness_verdict(antisymmetric_pair());
    REQUIRE(r.verdict == WitnessVerdict::WitnessedEntangled);
    REQUIRE(r.value == Catch::Approx(-1.0).margin(1e-12));
  }
  SECTION("symmetric Bell-like state is inconclusive despite entanglement") {
    const WitnessResult r = witness_verdict(symmetric_pair());
    REQUIRE(r.verdict == WitnessVerdict::Inconclusive);
    REQUIRE(r.value == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("orthogonal product state sits exactly at 0, inconclusive") {
    const WitnessResult r = witness_verdict(fock_state({1, 2}, {0, 1}));
    REQUIRE(r.verdict == WitnessVerdict::Inconclusive);
    REQUIRE(std::abs(r.value) < 1e-15);
  }
  SECTION("separable states never trip the witness") {
    Rng rng(307);
    auto basis = enumerate_basis({2, 1});
    for (int trial = 0; trial < 25; ++trial) {
      const MultiModeState a = testkit::random_mixed(basis, rng);
      const MultiModeState b = testkit::random_mixed(basis, rng);
      const WitnessResult r = witness_verdict(tensor(a, b));
      REQUIRE(r.value >= -1e-10);
      REQUIRE(r.verdict == WitnessVerdict::Inconclusive);
    }
  }
  SECTION("convex mixtures of products stay non-negative") {
    Rng rng(308);
    auto basis = enumerate_basis({1, 1});
    Matrix mix;
    for (int trial = 0; trial < 5; ++trial) {
      const MultiModeState p1 =
          tensor(testkit::random_pure(basis, rng),
                 testkit::random_pure(basis, rng));
      const MultiModeState p2 =
          tensor(testkit::random_pure(basis, rng),
                 testkit::random_pure(basis, rng));
      const double w = rng.uniform();
      mix = w * to_density(p1).rho() + (1.0 - w) * to_density(p2).rho();
      const MultiModeState joint =
          MultiModeState::density_unchecked(p1.basis_ptr(), mix);
      REQUIRE(witness_verdict(joint).value >= -1e-10);
    }
  }
  SECTION("threshold behavior of the value-level verdict") {
    REQUIRE(witness_verdict_value(-1e-3, 1e-9).verdict ==
            WitnessVerdict::WitnessedEntangled);
    REQUIRE(witness_verdict_value(-1e-12, 1e-9).verdict ==
            WitnessVerdict::Inconclusive);
    REQUIRE(witness_verdict_value(0.2, 1e-9).verdict ==
            WitnessVerdict::Inconclusive);
  }
  SECTION("odd register split is rejected") {
    REQUIRE_THROWS_AS(witness_verdict(fock_state({1, 3}, {0, 0, 1})),
                      std::invalid_argument);
  }
}
