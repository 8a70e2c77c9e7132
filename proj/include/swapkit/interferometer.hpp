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

// Passive linear interferometers on N modes and their lift to Fock space.
//
// Conventions (fixed here, relied on everywhere else):
//  * The cyclic shift on modes sends e_j -> e_{j+1 mod N} (matrix
//    V[i][j] = delta_{i, j+1 mod N}).
//  * dft_matrix(N)[j][k] = exp(-i 2pi jk / N) / sqrt(N), 0-based.
//  * phase_vector(N).theta[j] = 2pi j / N, so theta[0] = 0 and the first
//    output mode carries no phase weight.
// With these choices  Omega^dag diag(exp(-i theta_j)) Omega  equals the
// cyclic shift exactly, which is what ties photon-counting statistics
// after the interferometer to cyclic-permutation expectation values.

#include <cmath>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "swapkit/common.hpp"
#include "swapkit/fock.hpp"
#include "swapkit/permanent.hpp"

namespace swapkit {

// A validated unitary acting on mode amplitudes.
class ModeMatrix {
 public:
  explicit ModeMatrix(Matrix entries, double unitarity_tol = 1e-12)
      : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
      throw std::invalid_argument("mode matrix must be square and nonempty");
    if (!is_unitary(entries_, unitarity_tol))
      throw std::invalid_argument("mode matrix is not unitary");
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  Complex operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Mode-space cyclic shift e_j -> e_{j+1 mod n}.
inline Matrix cyclic_shift_matrix(int n) {
  if (n < 1) throw std::invalid_argument("cyclic shift: n < 1");
  Matrix v = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) v((j + 1) % n, j) = Complex(1.0, 0.0);
  return v;
}

// Discrete-Fourier-transform interferometer; the columns are the
// eigenvectors of the cyclic shift.  n = 1 would be a trivial identity
// "interferometer" and is rejected.
inline ModeMatrix dft_matrix(int n) {
  if (n < 2) throw std::invalid_argument("dft_matrix: need n >= 2");
  Matrix omega(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      omega(j, k) = scale * unit_root(static_cast<long long>(j) * k, n);
  return ModeMatrix(std::move(omega));
}

// Output-mode phases.  When the phases are rational multiples of 2pi the
// numerators/denominator are kept so downstream weights can be computed
// from exact roots of unity instead of accumulated cos/sin.
struct PhaseVector {
  std::vector<double> theta;
  std::vector<long long> numerators;  // theta[j] = 2pi numerators[j]/denominator
  long long denominator = 0;          // 0 when no rational form is attached

  bool rational() const { return denominator > 0; }
  int size() const { return static_cast<int>(theta.size()); }
};

// theta[j] = 2pi j / n: the eigenphases of the cyclic shift, ordered to
// match the rows of dft_matrix(n).
inline PhaseVector phase_vector(int n) {
  if (n < 1) throw std::invalid_argument("phase_vector: n < 1");
  PhaseVector p;
  p.theta.resize(static_cast<std::size_t>(n));
  p.numerators.resize(static_cast<std::size_t>(n));
  p.denominator = n;
  for (int j = 0; j < n; ++j) {
    p.theta[static_cast<std::size_t>(j)] =
        2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    p.numerators[static_cast<std::size_t>(j)] = j;
  }
  return p;
}

inline Complex phase_weight(const PhaseVector& p, int j) {
  if (j < 0 || j >= p.size())
    throw std::invalid_argument("phase index out of range");
  if (p.rational())
    return unit_root(p.numerators[static_cast<std::size_t>(j)], p.denominator);
  return std::polar(1.0, -p.theta[static_cast<std::size_t>(j)]);
}

// Max-abs residual of  Omega^dag diag(exp(-i theta)) Omega - cyclic_shift.
inline double verify_diagonalization(const ModeMatrix& omega,
                                     const PhaseVector& phases) {
  const int n = omega.dim();
  if (phases.size() != n)
    throw std::invalid_argument("verify_diagonalization: size mismatch");
  Matrix d = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) d(j, j) = phase_weight(phases, j);
  const Matrix recon = omega.entries().adjoint() * d * omega.entries();
  return inf_norm(recon - cyclic_shift_matrix(n));
}

// ---------------------------------------------------------------------------
// Triangular (row-by-row) decomposition of a mode unitary into two-mode
// rotations and output phases, executable as a planar mesh of beam
// splitters and phase shifters.

struct TwoModeRotation {
  int mode_a = 0;  // acts on (mode_a, mode_b), mode_a < mode_b
  int mode_b = 1;
  double mixing_angle = 0.0;  // |amplitude| mix: cos/sin of this angle
  double phase = 0.0;         // relative phase applied on the mode_b arm
};

struct SinglePhase {
  int mode = 0;
  double phase = 0.0;
};

using ReckElement = std::variant<TwoModeRotation, SinglePhase>;

struct ReckPlan {
  int dim = 0;
  // The matrix product of the elements, in listed order, reconstructs u.
  std::vector<ReckElement> elements;

  int rotation_count() const {
    int c = 0;
    for (const auto& e : elements)
      if (std::holds_alternative<TwoModeRotation>(e)) ++c;
    return c;
  }
};

namespace detail {

inline Matrix rotation_matrix(int n, const TwoModeRotation& r) {
  Matrix g = Matrix::Identity(n, n);
  const double c = std::cos(r.mixing_angle);
  const double s = std::sin(r.mixing_angle);
  const Complex ph = std::polar(1.0, r.phase);
  g(r.mode_a, r.mode_a) = Complex(c, 0.0);
  g(r.mode_a, r.mode_b) = -ph * s;
  g(r.mode_b, r.mode_a) = std::conj(ph) * s;
  g(r.mode_b, r.mode_b) = Complex(c, 0.0);
  return g;
}

}  // namespace detail

// Decompose u into at most n(n-1)/2 two-mode rotations followed by single
// mode phases.  An identity input yields an empty plan.
inline ReckPlan reck_decompose(const ModeMatrix& u) {
  const int n = u.dim();
  Matrix a = u.entries();
  std::vector<TwoModeRotation> nulling;  // applied left of a, in order

  for (int col = 0; col < n - 1; ++col) {
    for (int row = n - 1; row > col; --row) {
      const Complex hi = a(row - 1, col);
      const Complex lo = a(row, col);
      if (std::abs(lo) < 1e-14) continue;
      TwoModeRotation g;
      g.mode_a = row - 1;
      g.mode_b = row;
      if (std::abs(hi) < 1e-14) {
        g.mixing_angle = kPi / 2.0;
        g.phase = 0.0;
      } else {
        g.mixing_angle = std::atan2(std::abs(lo), std::abs(hi));
        g.phase = std::arg(hi) - std::arg(lo) - kPi;
      }
      a = detail::rotation_matrix(n, g) * a;
      nulling.push_back(g);
    }
  }

  // a is now unitary upper-triangular, i.e. diagonal with unit-modulus
  // entries.  G_k ... G_1 u = diag, so u = G_1^dag ... G_k^dag diag: the
  // inverse rotations in original nulling order, then the phases.
  ReckPlan plan;
  plan.dim = n;
  plan.elements.reserve(nulling.size() + static_cast<std::size_t>(n));
  for (const TwoModeRotation& g : nulling) {
    TwoModeRotation inv = g;
    inv.mixing_angle = -inv.mixing_angle;  // G(theta,phi)^dag = G(-theta,phi)
    plan.elements.emplace_back(inv);
  }
  for (int m = 0; m < n; ++m) {
    const double ph = std::arg(a(m, m));
    if (std::abs(ph) > 1e-15) plan.elements.emplace_back(SinglePhase{m, ph});
  }
  return plan;
}

inline ModeMatrix reck_reconstruct(const ReckPlan& plan) {
  if (plan.dim < 1) throw std::invalid_argument("reck_reconstruct: bad dim");
  Matrix m = Matrix::Identity(plan.dim, plan.dim);
  for (const auto& e : plan.elements) {
    if (const auto* rot = std::get_if<TwoModeRotation>(&e)) {
      if (rot->mode_a < 0 || rot->mode_b <= rot->mode_a ||
          rot->mode_b >= plan.dim)
        throw std::invalid_argument("reck_reconstruct: bad rotation modes");
      m = m * detail::rotation_matrix(plan.dim, *rot);
    } else {
      const auto& ph = std::get<SinglePhase>(e);
      if (ph.mode < 0 || ph.mode >= plan.dim)
        throw std::invalid_argument("reck_reconstruct: bad phase mode");
      m.col(ph.mode) *= std::polar(1.0, ph.phase);
    }
  }
  return ModeMatrix(std::move(m), 1e-9);
}

// ---------------------------------------------------------------------------
// Lift of a mode unitary to the truncated Fock space.

enum class LiftMethod {
  // Transition amplitudes via matrix permanents of the occupation-
  // substituted mode matrix (exact combinatorial formula).
  Permanent,
  // Take the mode-space generator h = i log(u), promote it with the
  // canonical one-body matrix elements, and exponentiate per sector.
  Generator,
};

namespace detail {

inline double sqrt_factorial_product(const OccupationVector& occ) {
  double p = 1.0;
  for (int n : occ) p *= factorial(n);
  return std::sqrt(p);
}

// Hermitian mode-space generator h with u = exp(-i h), via a Schur form
// (diagonal for a unitary input).
inline Matrix mode_generator(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success)
    throw numerical_error("mode generator: Schur decomposition failed");
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  const int n = static_cast<int>(u.rows());
  Matrix strict = t;
  strict.diagonal().setZero();
  if (inf_norm(strict) > 1e-10)
    throw numerical_error("mode generator: input is not normal");
  Vector h_eigs(n);
  for (int m = 0; m < n; ++m)
    h_eigs[m] = Complex(-std::arg(t(m, m)), 0.0);
  Matrix h = q * h_eigs.asDiagonal() * q.adjoint();
  return (h + Matrix(h.adjoint())) / 2.0;
}

// <target| a^dag_i a_j |source> over one sector, for the generator lift.
inline Matrix sector_one_body_lift(const Matrix& h, const SectorBasis& sector,
                                   int mode_count) {
  const int dim = sector.dim();
  Matrix out = Matrix::Zero(dim, dim);
  OccupationVector moved;
  for (int col = 0; col < dim; ++col) {
    const OccupationVector& occ = sector.elements()[static_cast<std::size_t>(col)];
    for (int j = 0; j < mode_count; ++j) {
      if (occ[j] == 0) continue;
      for (int i = 0; i < mode_count; ++i) {
        moved = occ;
        moved[j] -= 1;
        moved[i] += 1;
        const double amp =
            std::sqrt(static_cast<double>(occ[j]) *
                      static_cast<double>(moved[i]));
        out(sector.index_of(moved), col) += amp * h(i, j);
      }
    }
  }
  return out;
}

}  // namespace detail

// Block-diagonal (one block per photon-number sector) Fock representation
// of a mode unitary.
class FockLift {
 public:
  FockLift(const ModeMatrix& u, std::shared_ptr<const BasisSet> basis,
           LiftMethod method = LiftMethod::Permanent)
      : mode_matrix_(u), basis_(std::move(basis)) {
    if (!basis_) throw std::invalid_argument("FockLift: null basis");
    if (basis_->mode_count() != u.dim())
      throw std::invalid_argument(
          "FockLift: basis has " + std::to_string(basis_->mode_count()) +
          " modes, mode matrix has " + std::to_string(u.dim()));
    blocks_.reserve(static_cast<std::size_t>(basis_->sector_count()));
    for (int s = 0; s < basis_->sector_count(); ++s) {
      switch (method) {
        case LiftMethod::Permanent:
          blocks_.push_back(build_sector_permanent(s));
          break;
        case LiftMethod::Generator:
          blocks_.push_back(build_sector_generator(s));
          break;
      }
    }
  }

  const ModeMatrix& mode_matrix() const { return mode_matrix_; }
  const BasisSet& basis() const { return *basis_; }
  std::shared_ptr<const BasisSet> basis_ptr() const { return basis_; }
  const Matrix& block(int sector) const {
    return blocks_.at(static_cast<std::size_t>(sector));
  }

  Matrix dense() const {
    Matrix full = Matrix::Zero(basis_->dim(), basis_->dim());
    for (int s = 0; s < basis_->sector_count(); ++s) {
      const int off = basis_->sector_offset(s);
      const int d = basis_->sector_dim(s);
      full.block(off, off, d, d) = blocks_[static_cast<std::size_t>(s)];
    }
    return full;
  }

  MultiModeState apply(const MultiModeState& state) const {
    if (!(state.cutoff() == basis_->cutoff()))
      throw std::invalid_argument("FockLift::apply: basis mismatch");
    if (state.is_pure()) {
      Vector out(state.dim());
      for (int s = 0; s < basis_->sector_count(); ++s) {
        const int off = basis_->sector_offset(s);
        const int d = basis_->sector_dim(s);
        out.segment(off, d).noalias() =
            blocks_[static_cast<std::size_t>(s)] *
            state.amplitudes().segment(off, d);
      }
      return MultiModeState::pure(state.basis_ptr(), std::move(out),
                                  state.truncation_error());
    }
    const Matrix& rho = state.rho();
    Matrix out = Matrix::Zero(state.dim(), state.dim());
    for (int sr = 0; sr < basis_->sector_count(); ++sr) {
      const int offr = basis_->sector_offset(sr);
      const int dr = basis_->sector_dim(sr);
      for (int sc = 0; sc < basis_->sector_count(); ++sc) {
        const int offc = basis_->sector_offset(sc);
        const int dc = basis_->sector_dim(sc);
        out.block(offr, offc, dr, dc).noalias() =
            blocks_[static_cast<std::size_t>(sr)] *
            rho.block(offr, offc, dr, dc) *
            blocks_[static_cast<std::size_t>(sc)].adjoint();
      }
    }
    return MultiModeState::density_unchecked(state.basis_ptr(), std::move(out),
                                             state.truncation_error());
  }

 private:
  Matrix build_sector_permanent(int s) const {
    const SectorBasis& sector = basis_->sector(s);
    const int dim = sector.dim();
    std::vector<double> norms(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
      norms[static_cast<std::size_t>(i)] = detail::sqrt_factorial_product(
          sector.elements()[static_cast<std::size_t>(i)]);
    Matrix block(dim, dim);
    for (int col = 0; col < dim; ++col) {
      const OccupationVector& source =
          sector.elements()[static_cast<std::size_t>(col)];
      for (int row = 0; row < dim; ++row) {
        const OccupationVector& target =
            sector.elements()[static_cast<std::size_t>(row)];
        const Complex perm =
            permanent_repeated(mode_matrix_.entries(), target, source);
        block(row, col) = perm / (norms[static_cast<std::size_t>(row)] *
                                  norms[static_cast<std::size_t>(col)]);
      }
    }
    return block;
  }

  Matrix build_sector_generator(int s) const {
    const SectorBasis& sector = basis_->sector(s);
    if (sector.dim() == 1 && sector.total_photons() == 0)
      return Matrix::Identity(1, 1);
    const Matrix h = detail::mode_generator(mode_matrix_.entries());
    const Matrix h_sector =
        detail::sector_one_body_lift(h, sector, basis_->mode_count());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h_sector);
    if (solver.info() != Eigen::Success)
      throw numerical_error("generator lift: eigensolver failed");
    Vector phases(sector.dim());
    for (int m = 0; m < sector.dim(); ++m)
      phases[m] = std::polar(1.0, -solver.eigenvalues()[m]);
    return solver.eigenvectors() * phases.asDiagonal() *
           solver.eigenvectors().adjoint();
  }

  ModeMatrix mode_matrix_;
  std::shared_ptr<const BasisSet> basis_;
  std::vector<Matrix> blocks_;
};

inline FockLift lift_to_fock(const ModeMatrix& u, const CutoffConfig& cutoff,
                             LiftMethod method = LiftMethod::Permanent) {
  if (cutoff.mode_count != u.dim())
    throw std::invalid_argument("lift_to_fock: cutoff mode count mismatch");
  return FockLift(u, BasisSet::make(cutoff), method);
}

// Diagonal of the lifted k-th power of a mode phase shifter
// diag(exp(-i theta_j)): entry for occupation n is
// exp(-i k sum_j theta_j n_j).  Uses exact roots of unity whenever the
// phases carry a rational form.
inline std::vector<Complex> lift_phase_diag(const PhaseVector& phases, int k,
                                            const CutoffConfig& cutoff) {
  if (k < 1) throw std::invalid_argument("lift_phase_diag: k < 1");
  if (phases.size() != cutoff.mode_count)
    throw std::invalid_argument("lift_phase_diag: phase count mismatch");
  auto basis = BasisSet::make(cutoff);
  std::vector<Complex> diag(static_cast<std::size_t>(basis->dim()));
  for (int g = 0; g < basis->dim(); ++g) {
    const OccupationVector& occ = basis->element(g);
    if (phases.rational()) {
      long long residue = 0;
      for (int j = 0; j < cutoff.mode_count; ++j)
        residue += phases.numerators[static_cast<std::size_t>(j)] *
                   static_cast<long long>(occ[static_cast<std::size_t>(j)]);
      diag[static_cast<std::size_t>(g)] =
          unit_root(residue * k, phases.denominator);
    } else {
      double angle = 0.0;
      for (int j = 0; j < cutoff.mode_count; ++j)
        angle += phases.theta[static_cast<std::size_t>(j)] *
                 static_cast<double>(occ[static_cast<std::size_t>(j)]);
      diag[static_cast<std::size_t>(g)] = std::polar(1.0, -k * angle);
    }
  }
  return diag;
}

}  // namespace swapkit
