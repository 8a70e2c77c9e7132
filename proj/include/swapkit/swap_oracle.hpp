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

// Cyclic-permutation operators on tensor factors and the functionals they
// generate: Tr(rho^N), overlaps, pure-state fidelity, and a bipartite
// entanglement witness.  Everything here works directly on stored
// amplitudes / density matrices; it is the ground truth the estimator
// pipeline is checked against.
//
// The cyclic permutation V on N registers (each `slot_width` modes wide)
// maps the product ket |n^(1)> |n^(2)> ... |n^(N)>  to
// |n^(N)> |n^(1)> ... |n^(N-1)>: register contents advance one slot.
// On basis kets this is a pure index permutation, so V is stored as one.

#include <numeric>
#include <string>
#include <vector>

#include "swapkit/common.hpp"
#include "swapkit/fock.hpp"

namespace swapkit {

class SwapOperator {
 public:
  SwapOperator(std::shared_ptr<const BasisSet> basis, int oscillators,
               int slot_width, std::vector<int> image)
      : basis_(std::move(basis)),
        oscillators_(oscillators),
        slot_width_(slot_width),
        image_(std::move(image)) {}

  int oscillator_count() const { return oscillators_; }
  int slot_width() const { return slot_width_; }
  const BasisSet& basis() const { return *basis_; }
  std::shared_ptr<const BasisSet> basis_ptr() const { return basis_; }

  // Image of basis ket g under the permutation: V|g> = |map_index(g)>.
  int map_index(int g) const { return image_.at(static_cast<std::size_t>(g)); }

  SwapOperator power(int k) const {
    if (k < 0) throw std::invalid_argument("SwapOperator::power: k < 0");
    std::vector<int> img(image_.size());
    for (std::size_t g = 0; g < image_.size(); ++g) {
      int cur = static_cast<int>(g);
      for (int step = 0; step < k; ++step)
        cur = image_[static_cast<std::size_t>(cur)];
      img[g] = cur;
    }
    return SwapOperator(basis_, oscillators_, slot_width_, std::move(img));
  }

  Matrix matrix() const {
    const int d = basis_->dim();
    Matrix v = Matrix::Zero(d, d);
    for (int g = 0; g < d; ++g) v(image_[static_cast<std::size_t>(g)], g) = 1.0;
    return v;
  }

  MultiModeState apply(const MultiModeState& s) const {
    if (!(s.cutoff() == basis_->cutoff()))
      throw std::invalid_argument("SwapOperator::apply: basis mismatch");
    if (s.is_pure()) {
      Vector out(s.dim());
      for (int g = 0; g < s.dim(); ++g)
        out[image_[static_cast<std::size_t>(g)]] = s.amplitudes()[g];
      return MultiModeState::pure(s.basis_ptr(), std::move(out),
                                  s.truncation_error());
    }
    Matrix out(s.dim(), s.dim());
    for (int r = 0; r < s.dim(); ++r)
      for (int c = 0; c < s.dim(); ++c)
        out(image_[static_cast<std::size_t>(r)],
            image_[static_cast<std::size_t>(c)]) = s.rho()(r, c);
    return MultiModeState::density_unchecked(s.basis_ptr(), std::move(out),
                                             s.truncation_error());
  }

 private:
  std::shared_ptr<const BasisSet> basis_;
  int oscillators_;
  int slot_width_;
  std::vector<int> image_;
};

// Cyclic advance of `oscillators` registers, each `slot_width` modes wide,
// over the joint basis with the given cutoff.  cutoff.mode_count must equal
// oscillators * slot_width.
inline SwapOperator build_swap(const CutoffConfig& cutoff, int oscillators,
                               int slot_width = 1) {
  if (oscillators < 1) throw std::invalid_argument("build_swap: oscillators < 1");
  if (slot_width < 1) throw std::invalid_argument("build_swap: slot_width < 1");
  if (cutoff.mode_count != oscillators * slot_width)
    throw std::invalid_argument(
        "build_swap: cutoff has " + std::to_string(cutoff.mode_count) +
        " modes, expected oscillators*slot_width = " +
        std::to_string(oscillators * slot_width));
  auto basis = BasisSet::make(cutoff);
  std::vector<int> image(static_cast<std::size_t>(basis->dim()));
  OccupationVector moved(static_cast<std::size_t>(cutoff.mode_count));
  for (int g = 0; g < basis->dim(); ++g) {
    const OccupationVector& occ = basis->element(g);
    for (int reg = 0; reg < oscillators; ++reg) {
      const int dst = ((reg + 1) % oscillators) * slot_width;
      const int src = reg * slot_width;
      for (int m = 0; m < slot_width; ++m)
        moved[static_cast<std::size_t>(dst + m)] =
            occ[static_cast<std::size_t>(src + m)];
    }
    image[static_cast<std::size_t>(g)] = basis->index_of(moved);
  }
  return SwapOperator(std::move(basis), oscillators, slot_width,
                      std::move(image));
}

// Tr(rho V) evaluated directly from the stored representation.
inline Complex expect_swap_direct(const MultiModeState& state,
                                  const SwapOperator& v) {
  if (!(state.cutoff() == v.basis().cutoff()))
    throw std::invalid_argument("expect_swap_direct: basis mismatch");
  Complex total(0.0, 0.0);
  if (state.is_pure()) {
    // <psi| V |psi> = sum_g conj(psi[image(g)]) psi[g]
    for (int g = 0; g < state.dim(); ++g)
      total += std::conj(state.amplitudes()[v.map_index(g)]) *
               state.amplitudes()[g];
    return total;
  }
  // Tr(rho V) = sum_g rho(g, image(g))
  for (int g = 0; g < state.dim(); ++g)
    total += state.rho()(g, v.map_index(g));
  return total;
}

namespace detail {

inline void require_same_space(const MultiModeState& a, const MultiModeState& b,
                               const char* who) {
  if (!(a.cutoff() == b.cutoff()))
    throw std::invalid_argument(std::string(who) +
                                ": states live on different bases");
}

}  // namespace detail

// Tr(rho_a rho_b), via Tr[(rho_a (x) rho_b) V_2] with slot width equal to
// the mode count of the factors.
inline double overlap(const MultiModeState& a, const MultiModeState& b) {
  detail::require_same_space(a, b, "overlap");
  const MultiModeState joint = tensor(a, b);
  const SwapOperator v = build_swap(joint.cutoff(), 2, a.mode_count());
  const Complex val = expect_swap_direct(joint, v);
  if (std::abs(val.imag()) > 1e-9)
    throw numerical_error("overlap: expectation has imaginary part " +
                          std::to_string(val.imag()));
  return val.real();
}

inline double purity(const MultiModeState& s) { return overlap(s, s); }

// <alpha| rho |alpha> for pure alpha: the overlap functional specialized
// to a pure first argument.
inline double fidelity_pure(const MultiModeState& alpha,
                            const MultiModeState& rho) {
  if (!alpha.is_pure())
    throw std::invalid_argument("fidelity_pure: reference must be pure");
  return overlap(alpha, rho);
}

// Tr(rho^k) via the k-cycle on k tensor copies (k = 1 returns 1 for any
// normalized input).
inline double power_trace(const MultiModeState& s, int k) {
  if (k < 1) throw std::invalid_argument("power_trace: k < 1");
  MultiModeState joint = s;
  for (int c = 1; c < k; ++c) joint = tensor(joint, s);
  const SwapOperator v = build_swap(joint.cutoff(), k, s.mode_count());
  const Complex val = expect_swap_direct(joint, v);
  if (std::abs(val.imag()) > 1e-9)
    throw numerical_error("power_trace: expectation has imaginary part " +
                          std::to_string(val.imag()));
  return val.real();
}

// Squared Hilbert-Schmidt distance Tr[(a-b)^2] assembled from the three
// overlap measurements; >= 0 up to round-off (not clamped, so callers can
// see the round-off).
inline double hs_distance(const MultiModeState& a, const MultiModeState& b) {
  return purity(a) + purity(b) - 2.0 * overlap(a, b);
}

enum class WitnessVerdict { WitnessedEntangled, Inconclusive };

struct WitnessResult {
  WitnessVerdict verdict = WitnessVerdict::Inconclusive;
  double value = 0.0;      // Re Tr(rho V_2)
  double tolerance = 0.0;  // threshold actually used for the call
};

// Decide from a (possibly noisy) expectation value.  Separable states give
// values >= 0, so a value below -tolerance certifies entanglement.
inline WitnessResult witness_verdict_value(double value, double tolerance) {
  WitnessResult r;
  r.value = value;
  r.tolerance = tolerance;
  r.verdict = value < -tolerance ? WitnessVerdict::WitnessedEntangled
                                 : WitnessVerdict::Inconclusive;
  return r;
}

// Exact-arithmetic witness on a joint state of two equal-width registers.
inline WitnessResult witness_verdict(const MultiModeState& joint,
                                     double tolerance = 1e-9) {
  if (joint.mode_count() % 2 != 0)
    throw std::invalid_argument("witness_verdict: odd joint mode count");
  const SwapOperator v = build_swap(joint.cutoff(), 2, joint.mode_count() / 2);
  const Complex val = expect_swap_direct(joint, v);
  return witness_verdict_value(val.real(), tolerance);
}

}  // namespace swapkit
