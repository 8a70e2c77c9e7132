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

#include "swapkit/analysis.hpp"
#include "support/test_helpers.hpp"

using namespace swapkit;
using testkit::Rng;

namespace {

std::vector<double> power_sums(const std::vector<double>& eigs, int d) {
  std::vector<double> traces;
  for (int k = 2; k <= d; ++k) {
    double s = 0.0;
    for (double v : eigs) s += std::pow(v, k);
    traces.push_back(s);
  }
  return traces;
}

}  // namespace

TEST_CASE("spectrum recovery, frozen cases") {
  SECTION("maximally mixed qubit") {
    const Spectrum s = spectrum_from_power_traces({0.5}, 2);
    REQUIRE(s.source_dim == 2);
    REQUIRE(s.eigenvalues.size() == 2);
    REQUIRE(s.eigenvalues[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(s.eigenvalues[1] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(s.residual < 1e-10);
  }
  SECTION("pure qubit") {
    const Spectrum s = spectrum_from_power_traces({1.0}, 2);
    REQUIRE(s.eigenvalues[0] == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(s.eigenvalues[1] == Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("three distinct eigenvalues") {
    // {0.5, 0.3, 0.2}: Tr rho^2 = 0.38, Tr rho^3 = 0.16.
    const Spectrum s = spectrum_from_power_traces({0.38, 0.16}, 3);
    REQUIRE(s.eigenvalues[0] == Catch::Approx(0.5).margin(1e-6));
    REQUIRE(s.eigenvalues[1] == Catch::Approx(0.3).margin(1e-6));
    REQUIRE(s.eigenvalues[2] == Catch::Approx(0.2).margin(1e-6));
    REQUIRE(s.residual < 1e-6);
  }
}

TEST_CASE("spectrum recovery round trips") {
  Rng rng(500);
  for (int d = 2; d <= 5; ++d)
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<double> eigs(static_cast<std::size_t>(d));
      double total = 0.0;
      for (double& v : eigs) {
        v = 0.05 + rng.uniform();
        total += v;
      }
      for (double& v : eigs) v /= total;
      std::sort(eigs.begin(), eigs.end(), std::greater<double>());

      const Spectrum s = spectrum_from_power_traces(power_sums(eigs, d), d);
      REQUIRE(s.eigenvalues.size() == eigs.size());
      for (std::size_t i = 0; i < eigs.size(); ++i)
        REQUIRE(s.eigenvalues[i] == Catch::Approx(eigs[i]).margin(1e-6));
      REQUIRE(s.residual < 1e-6);
      REQUIRE(s.clipped_mass < 1e-8);
    }
}

TEST_CASE("spectrum recovery clipping and renormalization") {
  // A purity microscopically above 1 pushes one root just below zero; it
  // must be clipped, recorded, and the spectrum renormalized.
  const Spectrum s = spectrum_from_power_traces({1.0 + 1e-8}, 2);
  REQUIRE(s.clipped_mass > 0.0);
  REQUIRE(s.eigenvalues[0] == Catch::Approx(1.0).margin(1e-7));
  REQUIRE(s.eigenvalues[1] == Catch::Approx(0.0).margin(1e-7));
  double sum = 0.0;
  for (double v : s.eigenvalues) sum += v;
  REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("spectrum recovery error paths") {
  SECTION("trace arity must be d - 1") {
    REQUIRE_THROWS_AS(spectrum_from_power_traces({0.5}, 3),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(spectrum_from_power_traces({0.5, 0.3, 0.2}, 3),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(spectrum_from_power_traces({}, 0),
                      std::invalid_argument);
  }
  SECTION("a purity below the d-dimensional floor forces complex roots") {
    // For d = 3 no real spectrum has Tr rho^2 < 1/3.
    REQUIRE_THROWS_AS(spectrum_from_power_traces({0.2, 0.111}, 3),
                      numerical_error);
  }
  SECTION("roots far outside [0,1] are fatal at default tolerance") {
    REQUIRE_THROWS_AS(spectrum_from_power_traces({1.5}, 2), numerical_error);
  }
  SECTION("widening range_tol turns the same input into a clipped answer") {
    SpectrumOptions wide;
    wide.range_tol = 0.3;
    const Spectrum s = spectrum_from_power_traces({1.5}, 2, wide);
    REQUIRE(s.clipped_mass > 0.1);
    REQUIRE(s.eigenvalues[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(s.eigenvalues[1] == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("spectral functionals") {
  const std::vector<double> even = {0.5, 0.5};
  const std::vector<double> pure = {1.0, 0.0};
  SECTION("purity and linear entropy") {
    REQUIRE(functional_trace(even, SpectralFunctional::purity()) ==
            Catch::Approx(0.5));
    REQUIRE(functional_trace(pure, SpectralFunctional::purity()) ==
            Catch::Approx(1.0));
    REQUIRE(functional_trace(even, SpectralFunctional::linear_entropy()) ==
            Catch::Approx(0.5));
    REQUIRE(functional_trace(pure, SpectralFunctional::linear_entropy()) ==
            Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("von Neumann entropy, with 0 ln 0 = 0") {
    REQUIRE(functional_trace(pure,
                             SpectralFunctional::von_neumann_entropy()) ==
            Catch::Approx(0.0).margin(1e-15));
    REQUIRE(functional_trace(even,
                             SpectralFunctional::von_neumann_entropy()) ==
            Catch::Approx(std::log(2.0)));
    const std::vector<double> skew = {0.75, 0.25};
    REQUIRE(functional_trace(skew,
                             SpectralFunctional::von_neumann_entropy()) ==
            Catch::Approx(-0.75 * std::log(0.75) - 0.25 * std::log(0.25)));
  }
  SECTION("general powers") {
    REQUIRE(functional_trace(even, SpectralFunctional::power(3.0)) ==
            Catch::Approx(0.25));
    REQUIRE(functional_trace({0.25, 0.75}, SpectralFunctional::power(0.5)) ==
            Catch::Approx(0.5 + std::sqrt(0.75)));
  }
  SECTION("invalid inputs") {
    REQUIRE_THROWS_AS(
        functional_trace({0.5, -0.5}, SpectralFunctional::purity()),
        std::invalid_argument);
    REQUIRE_THROWS_AS(functional_trace(even, SpectralFunctional::power(0.0)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(functional_trace(even, SpectralFunctional::power(-1.0)),
                      std::invalid_argument);
  }
  SECTION("Spectrum overload consumes recovered eigenvalues") {
    const Spectrum s = spectrum_from_power_traces({0.5}, 2);
    REQUIRE(functional_trace(s, SpectralFunctional::purity()) ==
            Catch::Approx(0.5).margin(1e-10));
  }
}

TEST_CASE("majorization order") {
  SECTION("pure beats mixed, never the reverse") {
    REQUIRE(majorizes({1.0, 0.0}, {0.5, 0.5}));
    REQUIRE_FALSE(majorizes({0.5, 0.5}, {1.0, 0.0}));
  }
  SECTION("reflexive") {
    REQUIRE(majorizes({0.6, 0.3, 0.1}, {0.6, 0.3, 0.1}));
  }
  SECTION("unsorted input and length mismatch are handled") {
    REQUIRE(majorizes({0.1, 0.9}, {0.5, 0.5}));
    REQUIRE(majorizes({1.0}, {0.5, 0.5}));
    REQUIRE_FALSE(majorizes({0.5, 0.5}, {1.0}));
  }
  SECTION("empty spectra are rejected") {
    REQUIRE_THROWS_AS(majorizes({}, {}), std::invalid_argument);
  }
  SECTION("transitive on random spectra") {
    Rng rng(501);
    for (int trial = 0; trial < 50; ++trial) {
      auto draw = [&rng]() {
        std::vector<double> v(4);
        double t = 0.0;
        for (double& x : v) {
          x = rng.uniform();
          t += x;
        }
        for (double& x : v) x /= t;
        return v;
      };
      const auto a = draw(), b = draw(), c = draw();
      if (majorizes(a, b, 0.0) && majorizes(b, c, 0.0))
        REQUIRE(majorizes(a, c, 1e-12));
    }
  }
}

TEST_CASE("majorization entanglement test") {
  SECTION("maximally entangled pair: pure joint, mixed reductions") {
    const MajorizationResult r = majorization_test(
        {1.0, 0.0, 0.0, 0.0}, {0.5, 0.5}, {0.5, 0.5});
    REQUIRE(r.verdict == MajorizationVerdict::Entangled);
    REQUIRE_FALSE(r.joint_majorized_by_a);
    REQUIRE_FALSE(r.joint_majorized_by_b);
  }
  SECTION("pure product state stays inconclusive") {
    const MajorizationResult r = majorization_test(
        {1.0, 0.0, 0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0});
    REQUIRE(r.verdict == MajorizationVerdict::Inconclusive);
    REQUIRE(r.joint_majorized_by_a);
    REQUIRE(r.joint_majorized_by_b);
  }
  SECTION("maximally mixed joint is inconclusive") {
    const MajorizationResult r = majorization_test(
        {0.25, 0.25, 0.25, 0.25}, {0.5, 0.5}, {0.5, 0.5});
    REQUIRE(r.verdict == MajorizationVerdict::Inconclusive);
  }
  SECTION("high-fidelity noisy singlet is caught") {
    const double p = 0.9;
    const std::vector<double> joint = {p + (1 - p) / 4, (1 - p) / 4,
                                       (1 - p) / 4, (1 - p) / 4};
    const MajorizationResult r =
        majorization_test(joint, {0.5, 0.5}, {0.5, 0.5});
    REQUIRE(r.verdict == MajorizationVerdict::Entangled);
  }
  SECTION("one-sided violation is enough") {
    const MajorizationResult r =
        majorization_test({0.6, 0.4}, {0.7, 0.3}, {0.55, 0.45});
    REQUIRE(r.joint_majorized_by_a);
    REQUIRE_FALSE(r.joint_majorized_by_b);
    REQUIRE(r.verdict == MajorizationVerdict::Entangled);
  }
  SECTION("Spectrum overload plugs into trace recovery") {
    const Spectrum joint = spectrum_from_power_traces({1.0, 1.0, 1.0}, 4);
    const Spectrum reduced = spectrum_from_power_traces({0.5}, 2);
    const MajorizationResult r = majorization_test(joint, reduced, reduced);
    REQUIRE(r.verdict == MajorizationVerdict::Entangled);
  }
}
