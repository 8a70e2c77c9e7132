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

// From measured power traces Tr(rho^k) to the spectrum of rho and to
// spectral functionals Tr f(rho).  Newton's identities convert the power
// sums into the characteristic polynomial, whose roots come from the
// companion matrix; roots are then validated (near-real, near [0,1]),
// clipped, and renormalized.  Also: the majorization entanglement test on
// recovered spectra.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "swapkit/common.hpp"

namespace swapkit {

struct SpectrumOptions {
  // Largest tolerated |imaginary part| of a recovered root.
  double imag_tol = 1e-7;
  // How far outside [0, 1] a real root may fall before it is an error
  // rather than something to clip.  Widen for noisy input traces (a few
  // propagated standard errors).
  double range_tol = 1e-6;
};

struct Spectrum {
  std::vector<double> eigenvalues;  // descending, clipped to [0,1], sum 1
  int source_dim = 0;               // d: number of eigenvalues solved for
  double residual = 0.0;            // max_k |sum lambda^k - input trace k|
  double clipped_mass = 0.0;        // total amount moved by clipping
};

// Recover d eigenvalues from the higher power traces
// higher_traces[j] = Tr(rho^(j+2)), j = 0..d-2; Tr(rho) = 1 is implicit.
inline Spectrum spectrum_from_power_traces(
    const std::vector<double>& higher_traces, int d,
    const SpectrumOptions& options = {}) {
  if (d < 1) throw std::invalid_argument("spectrum_from_power_traces: d < 1");
  if (static_cast<int>(higher_traces.size()) != d - 1)
    throw std::invalid_argument(
        "spectrum_from_power_traces: expected " + std::to_string(d - 1) +
        " traces (powers 2..d), got " + std::to_string(higher_traces.size()));
  std::vector<double> p(static_cast<std::size_t>(d));
  p[0] = 1.0;
  for (int k = 2; k <= d; ++k)
    p[static_cast<std::size_t>(k - 1)] =
        higher_traces[static_cast<std::size_t>(k - 2)];

  // Newton's identities: e_0 = 1,
  // e_m = (1/m) sum_{i=1..m} (-1)^(i-1) e_{m-i} p_i.
  std::vector<double> e(static_cast<std::size_t>(d) + 1, 0.0);
  e[0] = 1.0;
  for (int m = 1; m <= d; ++m) {
    double acc = 0.0;
    for (int i = 1; i <= m; ++i) {
      const double term =
          e[static_cast<std::size_t>(m - i)] * p[static_cast<std::size_t>(i - 1)];
      acc += (i % 2 == 1) ? term : -term;
    }
    e[static_cast<std::size_t>(m)] = acc / static_cast<double>(m);
  }

  // Characteristic polynomial  x^d - e1 x^(d-1) + e2 x^(d-2) - ...; the
  // companion matrix carries the negated coefficients in its last column.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int r = 1; r < d; ++r) companion(r, r - 1) = 1.0;
  for (int r = 0; r < d; ++r) {
    const int m = d - r;  // coefficient of x^r is (-1)^m e_m
    const double coeff = (m % 2 == 0) ? e[static_cast<std::size_t>(m)]
                                      : -e[static_cast<std::size_t>(m)];
    companion(r, d - 1) = -coeff;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  if (solver.info() != Eigen::Success)
    throw numerical_error("spectrum recovery: companion eigensolve failed");

  Spectrum result;
  result.source_dim = d;
  result.eigenvalues.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const std::complex<double> root = solver.eigenvalues()[i];
    if (std::abs(root.imag()) > options.imag_tol)
      throw numerical_error(
          "spectrum recovery: root " + std::to_string(root.real()) + " + " +
          std::to_string(root.imag()) + "i is complex beyond imag_tol = " +
          std::to_string(options.imag_tol) +
          " (residual |Im| = " + std::to_string(std::abs(root.imag())) +
          "); the traces are inconsistent with a real positive spectrum");
    double lambda = root.real();
    if (lambda < -options.range_tol || lambda > 1.0 + options.range_tol) {
      const double excess =
          lambda < 0.0 ? -lambda : lambda - 1.0;  // distance outside [0,1]
      throw numerical_error(
          "spectrum recovery: root " + std::to_string(lambda) +
          " lies outside [0,1] by " + std::to_string(excess) +
          ", beyond range_tol = " + std::to_string(options.range_tol));
    }
    const double clipped = std::clamp(lambda, 0.0, 1.0);
    result.clipped_mass += std::abs(clipped - lambda);
    result.eigenvalues.push_back(clipped);
  }

  double sum = 0.0;
  for (double v : result.eigenvalues) sum += v;
  if (sum <= 0.0)
    throw numerical_error("spectrum recovery: clipped spectrum sums to zero");
  for (double& v : result.eigenvalues) v /= sum;
  std::sort(result.eigenvalues.begin(), result.eigenvalues.end(),
            std::greater<double>());

  for (int k = 1; k <= d; ++k) {
    double pk = 0.0;
    for (double v : result.eigenvalues) pk += std::pow(v, k);
    result.residual = std::max(
        result.residual, std::abs(pk - p[static_cast<std::size_t>(k - 1)]));
  }
  return result;
}

// Catalog of spectral functionals Tr f(rho) evaluated on a spectrum.
struct SpectralFunctional {
  enum class Kind {
    Purity,             // sum lambda^2
    VonNeumannEntropy,  // -sum lambda ln lambda  (nats), 0 ln 0 = 0
    LinearEntropy,      // 1 - sum lambda^2
    Power,              // sum lambda^alpha
  };
  Kind kind = Kind::Purity;
  double alpha = 2.0;  // used by Kind::Power only

  static SpectralFunctional purity() { return {Kind::Purity, 2.0}; }
  static SpectralFunctional von_neumann_entropy() {
    return {Kind::VonNeumannEntropy, 0.0};
  }
  static SpectralFunctional linear_entropy() {
    return {Kind::LinearEntropy, 0.0};
  }
  static SpectralFunctional power(double alpha) { return {Kind::Power, alpha}; }
};

inline double functional_trace(const std::vector<double>& eigenvalues,
                               const SpectralFunctional& f) {
  for (double v : eigenvalues)
    if (v < 0.0)
      throw std::invalid_argument("functional_trace: negative eigenvalue");
  switch (f.kind) {
    case SpectralFunctional::Kind::Purity: {
      double s = 0.0;
      for (double v : eigenvalues) s += v * v;
      return s;
    }
    case SpectralFunctional::Kind::VonNeumannEntropy: {
      double s = 0.0;
      for (double v : eigenvalues)
        if (v > 0.0) s -= v * std::log(v);
      return s;
    }
    case SpectralFunctional::Kind::LinearEntropy: {
      double s = 0.0;
      for (double v : eigenvalues) s += v * v;
      return 1.0 - s;
    }
    case SpectralFunctional::Kind::Power: {
      if (f.alpha <= 0.0)
        throw std::invalid_argument("functional_trace: alpha must be > 0");
      double s = 0.0;
      for (double v : eigenvalues)
        if (v > 0.0) s += std::pow(v, f.alpha);
      return s;
    }
  }
  throw std::invalid_argument("functional_trace: unknown functional");
}

inline double functional_trace(const Spectrum& spectrum,
                               const SpectralFunctional& f) {
  return functional_trace(spectrum.eigenvalues, f);
}

// Does a majorize b?  Both spectra are zero-padded to a common length and
// sorted descending; a majorizes b when every prefix sum of a is >= the
// matching prefix sum of b (within tol).
inline bool majorizes(std::vector<double> a, std::vector<double> b,
                      double tol = 1e-9) {
  const std::size_t d = std::max(a.size(), b.size());
  if (d == 0) throw std::invalid_argument("majorizes: empty spectra");
  a.resize(d, 0.0);
  b.resize(d, 0.0);
  std::sort(a.begin(), a.end(), std::greater<double>());
  std::sort(b.begin(), b.end(), std::greater<double>());
  double pa = 0.0, pb = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    pa += a[i];
    pb += b[i];
    if (pa < pb - tol) return false;
  }
  return true;
}

enum class MajorizationVerdict { Entangled, Inconclusive };

struct MajorizationResult {
  MajorizationVerdict verdict = MajorizationVerdict::Inconclusive;
  bool joint_majorized_by_a = false;
  bool joint_majorized_by_b = false;
};

// Separability requires the joint spectrum to be majorized by each reduced
// spectrum; a violated prefix sum on either side certifies entanglement.
// The converse does not hold, so the non-violating answer stays
// "inconclusive".
inline MajorizationResult majorization_test(const std::vector<double>& joint,
                                            const std::vector<double>& a,
                                            const std::vector<double>& b,
                                            double tol = 1e-9) {
  MajorizationResult r;
  r.joint_majorized_by_a = majorizes(a, joint, tol);
  r.joint_majorized_by_b = majorizes(b, joint, tol);
  r.verdict = (r.joint_majorized_by_a && r.joint_majorized_by_b)
                  ? MajorizationVerdict::Inconclusive
                  : MajorizationVerdict::Entangled;
  return r;
}

inline MajorizationResult majorization_test(const Spectrum& joint,
                                            const Spectrum& a,
                                            const Spectrum& b,
                                            double tol = 1e-9) {
  return majorization_test(joint.eigenvalues, a.eigenvalues, b.eigenvalues,
                           tol);
}

}  // namespace swapkit
