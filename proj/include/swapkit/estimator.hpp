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

// The measurement pipeline: send N registers through a DFT interferometer,
// count photons per output mode, and average phase weights over the counts.
// The expectation of the N-register cyclic permutation (and of its powers)
// is recovered as  <V^k> = E[ prod_j exp(-i k theta_j n_j) ]  where theta_j
// are the eigenphases of the cyclic shift and n_j the observed counts.
//
// Weight accumulation is organized by residue class of  k * sum_j j*n_j
// mod N, with the weight of each class taken from an exact root-of-unity
// table.  Two consequences the tests rely on:
//  * outcomes differing only in modes with zero phase weight (the first
//    output mode always qualifies) are merged before any weighting, so
//    marginalizing such modes out beforehand changes nothing, bit for bit;
//  * for N = 2 the weights are exactly +/-1 and the estimate is the parity
//    of the second register's count, again bit for bit.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "swapkit/common.hpp"
#include "swapkit/fock.hpp"
#include "swapkit/interferometer.hpp"

namespace swapkit {

// Probabilities (or empirical frequencies) attached to photon-count
// outcomes.  Outcomes follow basis order when produced from a state and
// ascending lexicographic order after a marginalization.
struct JointDistribution {
  std::vector<std::pair<OccupationVector, double>> outcomes;
  int mode_count = 0;
  double total_mass = 0.0;
  double truncation_error = 0.0;
};

struct EstimateResult {
  enum class Method { Exact, Sampled };
  Method method = Method::Exact;
  Complex value{0.0, 0.0};
  double std_error_re = 0.0;
  double std_error_im = 0.0;
  std::uint64_t shots = 0;  // 0 for exact evaluation
  double truncation_error = 0.0;

  bool exact() const { return method == Method::Exact; }
};

inline MultiModeState evolve(const MultiModeState& state, const FockLift& lift) {
  return lift.apply(state);
}

inline MultiModeState evolve(const MultiModeState& state, const ModeMatrix& u,
                             LiftMethod method = LiftMethod::Permanent) {
  return FockLift(u, state.basis_ptr(), method).apply(state);
}

// Photon-count distribution of a state in the Fock basis.  Diagonal
// entries of a density matrix may carry tiny negative round-off; values
// in [-1e-12, 0) are clamped to zero, anything lower is an error.
inline JointDistribution joint_distribution(const MultiModeState& state) {
  JointDistribution dist;
  dist.mode_count = state.mode_count();
  dist.truncation_error = state.truncation_error();
  dist.outcomes.reserve(static_cast<std::size_t>(state.dim()));
  for (int g = 0; g < state.dim(); ++g) {
    double p;
    if (state.is_pure()) {
      p = std::norm(state.amplitudes()[g]);
    } else {
      const Complex d = state.rho()(g, g);
      if (std::abs(d.imag()) > 1e-10)
        throw numerical_error(
            "joint_distribution: complex diagonal entry in density matrix");
      p = d.real();
      if (p < -1e-12)
        throw numerical_error(
            "joint_distribution: probability " + std::to_string(p) +
            " below the -1e-12 round-off floor at basis index " +
            std::to_string(g));
      if (p < 0.0) p = 0.0;
    }
    dist.outcomes.emplace_back(state.basis().element(g), p);
    dist.total_mass += p;
  }
  return dist;
}

// Sum out the listed modes.  Output outcomes are sorted ascending
// lexicographically in the kept modes; masses accumulate in input order.
inline JointDistribution marginalize(const JointDistribution& dist,
                                     std::vector<int> drop) {
  std::sort(drop.begin(), drop.end());
  drop.erase(std::unique(drop.begin(), drop.end()), drop.end());
  for (int m : drop)
    if (m < 0 || m >= dist.mode_count)
      throw std::invalid_argument("marginalize: mode index " +
                                  std::to_string(m) + " out of range");
  std::vector<int> keep;
  for (int m = 0; m < dist.mode_count; ++m)
    if (!std::binary_search(drop.begin(), drop.end(), m)) keep.push_back(m);

  std::map<OccupationVector, double> acc;
  OccupationVector key(keep.size());
  for (const auto& [occ, p] : dist.outcomes) {
    for (std::size_t i = 0; i < keep.size(); ++i)
      key[i] = occ[static_cast<std::size_t>(keep[i])];
    acc[key] += p;
  }

  JointDistribution out;
  out.mode_count = static_cast<int>(keep.size());
  out.truncation_error = dist.truncation_error;
  out.outcomes.reserve(acc.size());
  for (const auto& [occ, p] : acc) {
    out.outcomes.emplace_back(occ, p);
    out.total_mass += p;
  }
  return out;
}

namespace detail {

// Modes whose weight  exp(-i k theta n)  is identically 1.
inline std::vector<int> zero_weight_modes(const PhaseVector& phases, int k) {
  std::vector<int> zero;
  for (int j = 0; j < phases.size(); ++j) {
    if (phases.rational()) {
      const long long num =
          (phases.numerators[static_cast<std::size_t>(j)] * k) %
          phases.denominator;
      if (num == 0) zero.push_back(j);
    } else if (phases.theta[static_cast<std::size_t>(j)] == 0.0) {
      zero.push_back(j);
    }
  }
  return zero;
}

inline Complex outcome_weight(const PhaseVector& phases, int k,
                              const OccupationVector& occ) {
  if (phases.rational()) {
    long long residue = 0;
    for (std::size_t j = 0; j < occ.size(); ++j)
      residue += phases.numerators[j] * static_cast<long long>(occ[j]);
    return unit_root(residue * k, phases.denominator);
  }
  double angle = 0.0;
  for (std::size_t j = 0; j < occ.size(); ++j)
    angle += phases.theta[j] * static_cast<double>(occ[j]);
  return std::polar(1.0, -static_cast<double>(k) * angle);
}

}  // namespace detail

// Exact weighted average  sum_o p_o prod_j exp(-i k theta_j n_j(o)).
// Zero-weight modes are marginalized out first; with rational phases the
// remaining mass is bucketed by residue class and each bucket multiplied
// by an exact root of unity, so parity-style weights incur no trig error.
inline EstimateResult weighted_estimate(const JointDistribution& dist,
                                        const PhaseVector& phases, int k) {
  if (k < 1) throw std::invalid_argument("weighted_estimate: k < 1");
  if (phases.size() != dist.mode_count)
    throw std::invalid_argument(
        "weighted_estimate: phase count " + std::to_string(phases.size()) +
        " differs from outcome mode count " + std::to_string(dist.mode_count));

  const std::vector<int> zero = detail::zero_weight_modes(phases, k);
  if (!zero.empty()) {
    PhaseVector reduced;
    reduced.denominator = phases.denominator;
    std::size_t z = 0;
    for (int j = 0; j < phases.size(); ++j) {
      if (z < zero.size() && zero[z] == j) {
        ++z;
        continue;
      }
      reduced.theta.push_back(phases.theta[static_cast<std::size_t>(j)]);
      if (phases.rational())
        reduced.numerators.push_back(
            phases.numerators[static_cast<std::size_t>(j)]);
    }
    return weighted_estimate(marginalize(dist, zero), reduced, k);
  }

  EstimateResult result;
  result.method = EstimateResult::Method::Exact;
  result.truncation_error = dist.truncation_error;
  if (phases.rational()) {
    std::vector<double> bucket(static_cast<std::size_t>(phases.denominator),
                               0.0);
    for (const auto& [occ, p] : dist.outcomes) {
      long long residue = 0;
      for (std::size_t j = 0; j < occ.size(); ++j)
        residue += phases.numerators[j] * static_cast<long long>(occ[j]);
      residue = (residue * k) % phases.denominator;
      if (residue < 0) residue += phases.denominator;
      bucket[static_cast<std::size_t>(residue)] += p;
    }
    Complex value(0.0, 0.0);
    for (long long r = 0; r < phases.denominator; ++r)
      value += unit_root(r, phases.denominator) *
               bucket[static_cast<std::size_t>(r)];
    result.value = value;
  } else {
    Complex value(0.0, 0.0);
    for (const auto& [occ, p] : dist.outcomes)
      value += detail::outcome_weight(phases, k, occ) * p;
    result.value = value;
  }
  return result;
}

// Parity of the second register's photon count, the two-register special
// case of the weighted estimate (weights exactly +/-1).  Defined as that
// exact call so the two agree bit for bit.
inline EstimateResult parity_estimate_n2(const JointDistribution& dist) {
  if (dist.mode_count % 2 != 0)
    throw std::invalid_argument("parity_estimate_n2: odd mode count");
  const int w = dist.mode_count / 2;
  PhaseVector phases;
  phases.denominator = 2;
  phases.theta.assign(static_cast<std::size_t>(2 * w), 0.0);
  phases.numerators.assign(static_cast<std::size_t>(2 * w), 0);
  for (int m = 0; m < w; ++m) {
    phases.theta[static_cast<std::size_t>(w + m)] = kPi;
    phases.numerators[static_cast<std::size_t>(w + m)] = 1;
  }
  return weighted_estimate(dist, phases, 1);
}

namespace detail {

// Inverse-CDF sampler over the positive-mass outcomes, driven by a raw
// mt19937_64 stream (the distribution-shaping is done by hand so results
// are identical across standard libraries).
class OutcomeSampler {
 public:
  explicit OutcomeSampler(const JointDistribution& dist, std::uint64_t seed)
      : engine_(seed) {
    double running = 0.0;
    for (std::size_t i = 0; i < dist.outcomes.size(); ++i) {
      const double p = dist.outcomes[i].second;
      if (p <= 0.0) continue;
      running += p;
      support_.push_back(i);
      cumulative_.push_back(running);
    }
    if (support_.empty())
      throw numerical_error("sampling: distribution has no positive mass");
  }

  std::size_t draw() {
    const double u =
        static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
    const double x = u * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    if (it == cumulative_.end()) --it;
    return support_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  std::mt19937_64 engine_;
  std::vector<std::size_t> support_;
  std::vector<double> cumulative_;
};

}  // namespace detail

// Draw `shots` outcomes and return the empirical distribution (relative
// frequencies over the same outcome list as the input).
inline JointDistribution sample_outcomes(const JointDistribution& dist,
                                         std::uint64_t shots,
                                         std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sample_outcomes: zero shots");
  detail::OutcomeSampler sampler(dist, seed);
  std::vector<std::uint64_t> counts(dist.outcomes.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) ++counts[sampler.draw()];
  JointDistribution out;
  out.mode_count = dist.mode_count;
  out.truncation_error = dist.truncation_error;
  out.outcomes.reserve(dist.outcomes.size());
  const double inv = 1.0 / static_cast<double>(shots);
  for (std::size_t i = 0; i < dist.outcomes.size(); ++i) {
    out.outcomes.emplace_back(dist.outcomes[i].first,
                              static_cast<double>(counts[i]) * inv);
    out.total_mass += out.outcomes.back().second;
  }
  return out;
}

// KL divergence sum p log(p/q) over the support of p; infinity when p has
// mass where q does not.  Outcome lists must be aligned.
inline double kl_divergence(const JointDistribution& p,
                            const JointDistribution& q) {
  if (p.outcomes.size() != q.outcomes.size())
    throw std::invalid_argument("kl_divergence: outcome lists differ");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.outcomes.size(); ++i) {
    if (p.outcomes[i].first != q.outcomes[i].first)
      throw std::invalid_argument("kl_divergence: outcome lists differ");
    const double pi = p.outcomes[i].second;
    if (pi <= 0.0) continue;
    const double qi = q.outcomes[i].second;
    if (qi <= 0.0) return std::numeric_limits<double>::infinity();
    kl += pi * std::log(pi / qi);
  }
  return kl;
}

// DFT interferometer acting identically on each intra-register mode:
// kron(dft(oscillators), identity(slot_width)) with slot-major mode order
// (register j occupies modes j*slot_width .. (j+1)*slot_width - 1).
inline ModeMatrix slot_interferometer(int oscillators, int slot_width) {
  if (slot_width < 1) throw std::invalid_argument("slot_width < 1");
  const ModeMatrix base = dft_matrix(oscillators);
  if (slot_width == 1) return base;
  const int n = oscillators * slot_width;
  Matrix u = Matrix::Zero(n, n);
  for (int i = 0; i < oscillators; ++i)
    for (int j = 0; j < oscillators; ++j)
      for (int m = 0; m < slot_width; ++m)
        u(i * slot_width + m, j * slot_width + m) = base(i, j);
  return ModeMatrix(std::move(u));
}

// Eigenphases of the register-cycling permutation, replicated across the
// intra-register modes to match slot_interferometer's output order.
inline PhaseVector slot_phases(int oscillators, int slot_width) {
  if (slot_width < 1) throw std::invalid_argument("slot_width < 1");
  const PhaseVector base = phase_vector(oscillators);
  if (slot_width == 1) return base;
  PhaseVector out;
  out.denominator = base.denominator;
  out.theta.reserve(static_cast<std::size_t>(oscillators * slot_width));
  out.numerators.reserve(static_cast<std::size_t>(oscillators * slot_width));
  for (int j = 0; j < oscillators; ++j)
    for (int m = 0; m < slot_width; ++m) {
      out.theta.push_back(base.theta[static_cast<std::size_t>(j)]);
      out.numerators.push_back(base.numerators[static_cast<std::size_t>(j)]);
    }
  return out;
}

struct PipelineOptions {
  int oscillators = 2;
  int k = 1;
  std::optional<std::uint64_t> shots;  // nullopt: exact expectation
  std::uint64_t seed = 0;
  LiftMethod lift_method = LiftMethod::Permanent;
  // Optional prebuilt lift of slot_interferometer(oscillators, slot_width)
  // on the joint basis; built on the fly when absent.
  std::shared_ptr<const FockLift> lift;
};

struct PipelineRun {
  EstimateResult estimate;
  JointDistribution distribution;              // exact outcome distribution
  std::optional<JointDistribution> empirical;  // present for sampled runs
};

namespace detail {

inline EstimateResult sampled_estimate(const JointDistribution& dist,
                                       const PhaseVector& phases, int k,
                                       std::uint64_t shots, std::uint64_t seed,
                                       JointDistribution* empirical_out) {
  OutcomeSampler sampler(dist, seed);
  std::vector<Complex> weights(dist.outcomes.size());
  for (std::size_t i = 0; i < dist.outcomes.size(); ++i)
    weights[i] = outcome_weight(phases, k, dist.outcomes[i].first);

  std::vector<std::uint64_t> counts(dist.outcomes.size(), 0);
  double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const std::size_t idx = sampler.draw();
    ++counts[idx];
    const Complex w = weights[idx];
    sum_re += w.real();
    sum_im += w.imag();
    sq_re += w.real() * w.real();
    sq_im += w.imag() * w.imag();
  }

  const double n = static_cast<double>(shots);
  EstimateResult result;
  result.method = EstimateResult::Method::Sampled;
  result.shots = shots;
  result.truncation_error = dist.truncation_error;
  result.value = Complex(sum_re / n, sum_im / n);
  if (shots > 1) {
    const double mean_re = result.value.real();
    const double mean_im = result.value.imag();
    const double var_re =
        std::max(0.0, (sq_re - n * mean_re * mean_re) / (n - 1.0));
    const double var_im =
        std::max(0.0, (sq_im - n * mean_im * mean_im) / (n - 1.0));
    result.std_error_re = std::sqrt(var_re / n);
    result.std_error_im = std::sqrt(var_im / n);
  }

  if (empirical_out) {
    empirical_out->mode_count = dist.mode_count;
    empirical_out->truncation_error = dist.truncation_error;
    empirical_out->total_mass = 0.0;
    empirical_out->outcomes.clear();
    empirical_out->outcomes.reserve(dist.outcomes.size());
    const double inv = 1.0 / n;
    for (std::size_t i = 0; i < dist.outcomes.size(); ++i) {
      empirical_out->outcomes.emplace_back(dist.outcomes[i].first,
                                           static_cast<double>(counts[i]) *
                                               inv);
      empirical_out->total_mass += empirical_out->outcomes.back().second;
    }
  }
  return result;
}

}  // namespace detail

// Full pipeline on a prepared joint state: interfere, read out photon
// counts, weight.  The joint mode count must be a multiple of
// opts.oscillators; the ratio is the register slot width.
inline PipelineRun run_pipeline(const MultiModeState& joint,
                                const PipelineOptions& opts) {
  if (opts.oscillators < 2)
    throw std::invalid_argument("run_pipeline: need at least 2 registers");
  if (opts.k < 1) throw std::invalid_argument("run_pipeline: k < 1");
  if (joint.mode_count() % opts.oscillators != 0)
    throw std::invalid_argument(
        "run_pipeline: joint state has " + std::to_string(joint.mode_count()) +
        " modes, not divisible into " + std::to_string(opts.oscillators) +
        " registers");
  const int slot_width = joint.mode_count() / opts.oscillators;

  std::shared_ptr<const FockLift> lift = opts.lift;
  if (lift) {
    if (!(lift->basis().cutoff() == joint.cutoff()))
      throw std::invalid_argument("run_pipeline: prebuilt lift basis mismatch");
  } else {
    lift = std::make_shared<const FockLift>(
        slot_interferometer(opts.oscillators, slot_width), joint.basis_ptr(),
        opts.lift_method);
  }

  PipelineRun run;
  const MultiModeState evolved = evolve(joint, *lift);
  run.distribution = joint_distribution(evolved);
  const PhaseVector phases = slot_phases(opts.oscillators, slot_width);

  if (!opts.shots) {
    run.estimate = weighted_estimate(run.distribution, phases, opts.k);
  } else {
    if (*opts.shots == 0)
      throw std::invalid_argument("run_pipeline: zero shots");
    run.empirical.emplace();
    run.estimate =
        detail::sampled_estimate(run.distribution, phases, opts.k, *opts.shots,
                                 opts.seed, &*run.empirical);
  }
  return run;
}

// Convenience form: one state per register, tensored in order.
inline PipelineRun run_pipeline(const std::vector<MultiModeState>& registers,
                                const PipelineOptions& opts) {
  if (static_cast<int>(registers.size()) != opts.oscillators)
    throw std::invalid_argument(
        "run_pipeline: got " + std::to_string(registers.size()) +
        " register states for " + std::to_string(opts.oscillators) +
        " registers");
  const int w = registers.front().mode_count();
  for (const auto& r : registers)
    if (r.mode_count() != w)
      throw std::invalid_argument(
          "run_pipeline: register states must share one mode count");
  MultiModeState joint = registers.front();
  for (std::size_t i = 1; i < registers.size(); ++i)
    joint = tensor(joint, registers[i]);
  return run_pipeline(joint, opts);
}

inline EstimateResult estimate_pipeline(const MultiModeState& joint,
                                        const PipelineOptions& opts) {
  return run_pipeline(joint, opts).estimate;
}

inline EstimateResult estimate_pipeline(
    const std::vector<MultiModeState>& registers, const PipelineOptions& opts) {
  return run_pipeline(registers, opts).estimate;
}

}  // namespace swapkit
