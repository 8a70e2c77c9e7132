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

// Truncated multi-mode Fock space: sector bases and state algebra.
//
// The truncation caps the *total* photon number rather than each mode.
// Passive linear optics is generated by a^dag_i a_j terms, all of which
// conserve the total count, so under this cutoff every fixed-total sector
// evolves within itself and the simulation is exact on the retained space
// (no leakage out of the basis).
//
// Basis layout: sectors ordered by ascending total photon number, and
// occupation vectors in descending lexicographic order inside a sector,
// e.g. for two modes at n_max = 2:
//   (0,0) | (1,0) (0,1) | (2,0) (1,1) (0,2)
// With this ordering the one-photon sector of any lifted mode unitary
// reproduces the mode matrix itself.

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "swapkit/common.hpp"

namespace swapkit {

using OccupationVector = std::vector<int>;

inline int total_photons(const OccupationVector& occ) {
  return std::accumulate(occ.begin(), occ.end(), 0);
}

inline std::string occupation_to_string(const OccupationVector& occ) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (i) out << ',';
    out << occ[i];
  }
  out << ')';
  return out.str();
}

struct CutoffConfig {
  int max_total_photons = 0;
  int mode_count = 1;

  friend bool operator==(const CutoffConfig&, const CutoffConfig&) = default;

  void validate() const {
    if (max_total_photons < 0)
      throw std::invalid_argument("cutoff: max_total_photons must be >= 0");
    if (mode_count < 1)
      throw std::invalid_argument("cutoff: mode_count must be >= 1");
  }
};

namespace detail {

inline void enumerate_sector_rec(int modes_left, int photons_left,
                                 OccupationVector& current,
                                 std::vector<OccupationVector>& out) {
  if (modes_left == 1) {
    current.push_back(photons_left);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int n = photons_left; n >= 0; --n) {
    current.push_back(n);
    enumerate_sector_rec(modes_left - 1, photons_left - n, current, out);
    current.pop_back();
  }
}

}  // namespace detail

// All occupation vectors with one fixed total photon number.
class SectorBasis {
 public:
  SectorBasis(int mode_count, int total) : total_(total) {
    if (mode_count < 1) throw std::invalid_argument("sector: mode_count < 1");
    if (total < 0) throw std::invalid_argument("sector: total photons < 0");
    OccupationVector scratch;
    scratch.reserve(static_cast<std::size_t>(mode_count));
    detail::enumerate_sector_rec(mode_count, total, scratch, elements_);
    for (std::size_t i = 0; i < elements_.size(); ++i)
      index_.emplace(elements_[i], static_cast<int>(i));
  }

  int total_photons() const { return total_; }
  int dim() const { return static_cast<int>(elements_.size()); }
  const std::vector<OccupationVector>& elements() const { return elements_; }

  int index_of(const OccupationVector& occ) const {
    auto it = index_.find(occ);
    if (it == index_.end())
      throw std::out_of_range("occupation " + occupation_to_string(occ) +
                              " not in sector with total " +
                              std::to_string(total_));
    return it->second;
  }

 private:
  int total_;
  std::vector<OccupationVector> elements_;
  std::map<OccupationVector, int> index_;
};

// Concatenation of all sectors 0..max_total_photons.  Because sectors are
// stored in ascending order, a BasisSet with a lower cutoff is always an
// exact prefix of one with a higher cutoff (same mode count); embed() below
// relies on that.
class BasisSet {
 public:
  explicit BasisSet(CutoffConfig cutoff) : cutoff_(cutoff) {
    cutoff_.validate();
    offsets_.reserve(static_cast<std::size_t>(cutoff_.max_total_photons) + 2);
    int offset = 0;
    for (int s = 0; s <= cutoff_.max_total_photons; ++s) {
      sectors_.emplace_back(cutoff_.mode_count, s);
      offsets_.push_back(offset);
      offset += sectors_.back().dim();
    }
    offsets_.push_back(offset);
  }

  static std::shared_ptr<const BasisSet> make(CutoffConfig cutoff) {
    return std::make_shared<const BasisSet>(cutoff);
  }

  const CutoffConfig& cutoff() const { return cutoff_; }
  int mode_count() const { return cutoff_.mode_count; }
  int max_total_photons() const { return cutoff_.max_total_photons; }
  int sector_count() const { return static_cast<int>(sectors_.size()); }
  const std::vector<SectorBasis>& sectors() const { return sectors_; }
  const SectorBasis& sector(int s) const { return sectors_.at(s); }
  int sector_offset(int s) const { return offsets_.at(s); }
  int sector_dim(int s) const { return sectors_.at(s).dim(); }
  int dim() const { return offsets_.back(); }

  int index_of(const OccupationVector& occ) const {
    if (static_cast<int>(occ.size()) != cutoff_.mode_count)
      throw std::invalid_argument(
          "occupation " + occupation_to_string(occ) + " has " +
          std::to_string(occ.size()) + " modes, basis expects " +
          std::to_string(cutoff_.mode_count));
    for (int n : occ)
      if (n < 0)
        throw std::invalid_argument("occupation " + occupation_to_string(occ) +
                                    " has a negative entry");
    const int total = total_photons(occ);
    if (total > cutoff_.max_total_photons)
      throw std::invalid_argument(
          "occupation " + occupation_to_string(occ) + " lies in sector " +
          std::to_string(total) + ", beyond the cutoff n_max = " +
          std::to_string(cutoff_.max_total_photons));
    return offsets_[total] + sectors_[total].index_of(occ);
  }

  const OccupationVector& element(int global_index) const {
    const int s = sector_of_index(global_index);
    return sectors_[s].elements()[static_cast<std::size_t>(global_index -
                                                           offsets_[s])];
  }

  int sector_of_index(int global_index) const {
    if (global_index < 0 || global_index >= dim())
      throw std::out_of_range("basis index out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global_index);
    return static_cast<int>(it - offsets_.begin()) - 1;
  }

 private:
  CutoffConfig cutoff_;
  std::vector<SectorBasis> sectors_;
  std::vector<int> offsets_;
};

inline std::shared_ptr<const BasisSet> enumerate_basis(CutoffConfig cutoff) {
  return BasisSet::make(cutoff);
}

// A normalized pure state (amplitude vector over the basis) or a density
// matrix, tagged with the truncation error accumulated while building it
// (nonzero only for states, like coherent states, that had support above
// the cutoff before renormalization).
class MultiModeState {
 public:
  enum class Kind { Pure, Mixed };

  static MultiModeState pure(std::shared_ptr<const BasisSet> basis,
                             Vector amplitudes, double truncation_error = 0.0) {
    require_basis(basis);
    if (amplitudes.size() != basis->dim())
      throw std::invalid_argument(
          "amplitude vector has dimension " +
          std::to_string(amplitudes.size()) + ", basis has dimension " +
          std::to_string(basis->dim()));
    const double norm = amplitudes.norm();
    if (norm < 1e-12)
      throw std::invalid_argument("state vector is numerically zero");
    amplitudes /= norm;
    return MultiModeState(std::move(basis), std::move(amplitudes),
                          truncation_error);
  }

  static MultiModeState density(std::shared_ptr<const BasisSet> basis,
                                Matrix rho, double truncation_error = 0.0) {
    require_basis(basis);
    if (rho.rows() != basis->dim() || rho.cols() != basis->dim())
      throw std::invalid_argument(
          "density matrix is " + std::to_string(rho.rows()) + "x" +
          std::to_string(rho.cols()) + ", basis has dimension " +
          std::to_string(basis->dim()));
    if (inf_norm(rho - rho.adjoint()) > 1e-12)
      throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-10)
      throw std::invalid_argument("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho,
                                                 Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
      throw std::invalid_argument(
          "density matrix has an eigenvalue below -1e-10");
    return MultiModeState(std::move(basis), std::move(rho), truncation_error);
  }

  // Skips the Hermiticity / trace / positivity checks.  For library
  // internals whose outputs satisfy them by construction; the property
  // tests cover those code paths.
  static MultiModeState density_unchecked(std::shared_ptr<const BasisSet> basis,
                                          Matrix rho,
                                          double truncation_error = 0.0) {
    require_basis(basis);
    return MultiModeState(std::move(basis), std::move(rho), truncation_error);
  }

  Kind kind() const { return kind_; }
  bool is_pure() const { return kind_ == Kind::Pure; }
  const BasisSet& basis() const { return *basis_; }
  std::shared_ptr<const BasisSet> basis_ptr() const { return basis_; }
  const CutoffConfig& cutoff() const { return basis_->cutoff(); }
  int mode_count() const { return basis_->mode_count(); }
  int dim() const { return basis_->dim(); }
  double truncation_error() const { return truncation_error_; }

  const Vector& amplitudes() const {
    if (!is_pure())
      throw std::invalid_argument("amplitudes() called on a mixed state");
    return amplitudes_;
  }

  const Matrix& rho() const {
    if (is_pure())
      throw std::invalid_argument(
          "rho() called on a pure state; use to_density() first");
    return rho_;
  }

 private:
  MultiModeState(std::shared_ptr<const BasisSet> basis, Vector amplitudes,
                 double truncation_error)
      : kind_(Kind::Pure),
        basis_(std::move(basis)),
        amplitudes_(std::move(amplitudes)),
        truncation_error_(truncation_error) {}

  MultiModeState(std::shared_ptr<const BasisSet> basis, Matrix rho,
                 double truncation_error)
      : kind_(Kind::Mixed),
        basis_(std::move(basis)),
        rho_(std::move(rho)),
        truncation_error_(truncation_error) {}

  static void require_basis(const std::shared_ptr<const BasisSet>& basis) {
    if (!basis) throw std::invalid_argument("null basis");
  }

  Kind kind_;
  std::shared_ptr<const BasisSet> basis_;
  Vector amplitudes_;
  Matrix rho_;
  double truncation_error_ = 0.0;
};

inline MultiModeState fock_state(const CutoffConfig& cutoff,
                                 const OccupationVector& occ) {
  auto basis = BasisSet::make(cutoff);
  Vector amp = Vector::Zero(basis->dim());
  amp[basis->index_of(occ)] = Complex(1.0, 0.0);
  return MultiModeState::pure(std::move(basis), std::move(amp));
}

// Normalized linear combination of pure states over one shared basis.
inline MultiModeState superpose(
    const std::vector<std::pair<Complex, MultiModeState>>& terms) {
  if (terms.empty()) throw std::invalid_argument("superpose: no terms");
  const MultiModeState& first = terms.front().second;
  for (const auto& [coeff, term] : terms) {
    if (!term.is_pure())
      throw std::invalid_argument("superpose: all terms must be pure");
    if (!(term.cutoff() == first.cutoff()))
      throw std::invalid_argument("superpose: terms live on different bases");
  }
  Vector amp = Vector::Zero(first.dim());
  double truncation = 0.0;
  for (const auto& [coeff, term] : terms) {
    amp += coeff * term.amplitudes();
    truncation = std::max(truncation, term.truncation_error());
  }
  if (amp.norm() < 1e-12)
    throw std::invalid_argument("superpose: terms cancel to the zero vector");
  return MultiModeState::pure(first.basis_ptr(), std::move(amp), truncation);
}

inline MultiModeState to_density(const MultiModeState& s) {
  if (!s.is_pure()) return s;
  const Vector& a = s.amplitudes();
  return MultiModeState::density_unchecked(s.basis_ptr(), a * a.adjoint(),
                                           s.truncation_error());
}

// Kronecker product of two states.  The result keeps every basis element
// reachable from the factors: n_max of the product is the *sum* of the
// factor cutoffs, so no product amplitude is dropped.
inline MultiModeState tensor(const MultiModeState& a, const MultiModeState& b) {
  const CutoffConfig joint{a.cutoff().max_total_photons +
                               b.cutoff().max_total_photons,
                           a.mode_count() + b.mode_count()};
  auto basis = BasisSet::make(joint);
  const double truncation =
      a.truncation_error() + b.truncation_error() -
      a.truncation_error() * b.truncation_error();

  // Global index in the joint basis for each (element of a, element of b).
  const int dim_a = a.dim();
  const int dim_b = b.dim();
  std::vector<int> joint_index(static_cast<std::size_t>(dim_a) *
                               static_cast<std::size_t>(dim_b));
  OccupationVector occ(static_cast<std::size_t>(joint.mode_count));
  for (int i = 0; i < dim_a; ++i) {
    const OccupationVector& occ_a = a.basis().element(i);
    std::copy(occ_a.begin(), occ_a.end(), occ.begin());
    for (int j = 0; j < dim_b; ++j) {
      const OccupationVector& occ_b = b.basis().element(j);
      std::copy(occ_b.begin(), occ_b.end(),
                occ.begin() + a.mode_count());
      joint_index[static_cast<std::size_t>(i) * dim_b + j] =
          basis->index_of(occ);
    }
  }

  if (a.is_pure() && b.is_pure()) {
    Vector amp = Vector::Zero(basis->dim());
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_b; ++j)
        amp[joint_index[static_cast<std::size_t>(i) * dim_b + j]] =
            a.amplitudes()[i] * b.amplitudes()[j];
    return MultiModeState::pure(std::move(basis), std::move(amp), truncation);
  }

  const MultiModeState da = to_density(a);
  const MultiModeState db = to_density(b);
  Matrix rho = Matrix::Zero(basis->dim(), basis->dim());
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j) {
      const int row = joint_index[static_cast<std::size_t>(i) * dim_b + j];
      for (int k = 0; k < dim_a; ++k)
        for (int l = 0; l < dim_b; ++l)
          rho(row, joint_index[static_cast<std::size_t>(k) * dim_b + l]) =
              da.rho()(i, k) * db.rho()(j, l);
    }
  return MultiModeState::density_unchecked(std::move(basis), std::move(rho),
                                           truncation);
}

// Trace out every mode not listed in `keep`.  Kept modes stay in their
// original relative order; the result keeps the same n_max (a reduced
// state can still hold up to the original photon total).
inline MultiModeState partial_trace(const MultiModeState& s,
                                    std::vector<int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int m : keep)
    if (m < 0 || m >= s.mode_count())
      throw std::invalid_argument("partial_trace: mode index " +
                                  std::to_string(m) + " out of range");
  if (static_cast<int>(keep.size()) == s.mode_count()) return to_density(s);

  std::vector<int> traced;
  for (int m = 0; m < s.mode_count(); ++m)
    if (!std::binary_search(keep.begin(), keep.end(), m)) traced.push_back(m);

  const MultiModeState d = to_density(s);
  const CutoffConfig reduced{s.cutoff().max_total_photons,
                             static_cast<int>(keep.size())};
  auto basis = BasisSet::make(reduced);

  // Bucket input basis elements by the occupation of the traced modes;
  // only pairs within a bucket contribute to the reduced matrix.
  std::map<OccupationVector, std::vector<int>> buckets;
  std::vector<int> kept_index(static_cast<std::size_t>(d.dim()));
  OccupationVector kept_occ(keep.size());
  OccupationVector traced_occ(traced.size());
  for (int i = 0; i < d.dim(); ++i) {
    const OccupationVector& occ = d.basis().element(i);
    for (std::size_t m = 0; m < keep.size(); ++m) kept_occ[m] = occ[keep[m]];
    for (std::size_t m = 0; m < traced.size(); ++m)
      traced_occ[m] = occ[traced[m]];
    kept_index[static_cast<std::size_t>(i)] = basis->index_of(kept_occ);
    buckets[traced_occ].push_back(i);
  }

  Matrix rho = Matrix::Zero(basis->dim(), basis->dim());
  for (const auto& [unused, members] : buckets)
    for (int i : members)
      for (int j : members)
        rho(kept_index[static_cast<std::size_t>(i)],
            kept_index[static_cast<std::size_t>(j)]) += d.rho()(i, j);
  return MultiModeState::density_unchecked(std::move(basis), std::move(rho),
                                           s.truncation_error());
}

inline Complex inner(const MultiModeState& a, const MultiModeState& b) {
  if (!a.is_pure() || !b.is_pure())
    throw std::invalid_argument("inner: both states must be pure");
  if (!(a.cutoff() == b.cutoff()))
    throw std::invalid_argument("inner: states live on different bases");
  return a.amplitudes().dot(b.amplitudes());  // conjugates the left factor
}

// Single-mode coherent state |alpha> truncated at n_max and renormalized.
// The dropped tail mass is recorded as the truncation error.
inline MultiModeState coherent_state(int n_max, Complex alpha) {
  if (n_max < 0) throw std::invalid_argument("coherent_state: n_max < 0");
  auto basis = BasisSet::make(CutoffConfig{n_max, 1});
  Vector amp = Vector::Zero(basis->dim());
  Complex term(1.0, 0.0);  // alpha^n / sqrt(n!)
  double kept = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
    amp[n] = term;
    kept += std::norm(term);
  }
  const double total = std::exp(std::norm(alpha));
  const double truncation = std::max(0.0, 1.0 - kept / total);
  return MultiModeState::pure(std::move(basis), std::move(amp), truncation);
}

// Zero-pad a state into a basis with a higher photon cutoff (same mode
// count).  Lower-cutoff bases are exact prefixes of higher-cutoff ones,
// so this is a head copy.
inline MultiModeState embed(const MultiModeState& s, const CutoffConfig& wider) {
  wider.validate();
  if (wider.mode_count != s.mode_count())
    throw std::invalid_argument("embed: mode count mismatch");
  if (wider.max_total_photons < s.cutoff().max_total_photons)
    throw std::invalid_argument("embed: target cutoff is smaller");
  if (wider == s.cutoff()) return s;
  auto basis = BasisSet::make(wider);
  if (s.is_pure()) {
    Vector amp = Vector::Zero(basis->dim());
    amp.head(s.dim()) = s.amplitudes();
    return MultiModeState::pure(std::move(basis), std::move(amp),
                                s.truncation_error());
  }
  Matrix rho = Matrix::Zero(basis->dim(), basis->dim());
  rho.topLeftCorner(s.dim(), s.dim()) = s.rho();
  return MultiModeState::density_unchecked(std::move(basis), std::move(rho),
                                           s.truncation_error());
}

}  // namespace swapkit
