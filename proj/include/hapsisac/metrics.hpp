/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hapsisac/channel.hpp"
#include "hapsisac/scenario.hpp"
#include "hapsisac/types.hpp"

namespace hapsisac {

/// Communication beamformers (one column per CU) and sensing beamformers
/// (one column per target), plus the auxiliary max-min gain eta.
template <typename Scalar>
struct BeamformerSet {
  ComplexMatrix<Scalar> comm;     ///< S x K
  ComplexMatrix<Scalar> sensing;  ///< S x J
  Scalar eta = Scalar(0);

  static BeamformerSet zero(int antennas, int users, int targets) {
    return {ComplexMatrix<Scalar>::Zero(antennas, users),
            ComplexMatrix<Scalar>::Zero(antennas, targets), Scalar(0)};
  }

  int antennas() const { return static_cast<int>(comm.rows()); }
};

/// Everything the objective and constraints need, with target steering
/// vectors precomputed.
template <typename Scalar>
struct Problem {
  ComplexMatrix<Scalar> h;        ///< S x K channels
  RealVector<Scalar> sigma2;      ///< per-CU noise power (W)
  ComplexMatrix<Scalar> targets;  ///< S x J steering vectors
  Scalar p_max = Scalar(1);       ///< W
  Scalar sinr_th_db = Scalar(10);

  int antennas() const { return static_cast<int>(h.rows() > 0 ? h.rows() : targets.rows()); }
  int users() const { return static_cast<int>(h.cols()); }
  int target_count() const { return static_cast<int>(targets.cols()); }

  /// Upper bound of every objective term: P S for the sensing objective;
  /// P for the communication fallback used when there are no targets.
  Scalar objective_scale() const {
    return target_count() > 0 ? p_max * Scalar(antennas()) : p_max;
  }
};

inline Problem<double> make_problem(const ScenarioInstance& scenario, const ChannelSet<double>& channels) {
  Problem<double> p;
  p.h = channels.h;
  p.sigma2 = scenario.sigma2_w;
  p.targets = target_steering(scenario);
  p.p_max = scenario.p_max_w;
  p.sinr_th_db = scenario.config.sinr_th_db;
  if (p.h.cols() == 0) p.h.resize(scenario.config.antennas(), 0);
  return p;
}

template <typename Scalar>
Scalar total_power(const BeamformerSet<Scalar>& bf) {
  return bf.comm.squaredNorm() + bf.sensing.squaredNorm();
}

/// SINR of CU k: |h_k^H w_k|^2 / (sum_{i != k} |h_k^H w_i|^2 + sum_j |h_k^H r_j|^2 + sigma_k^2).
template <typename Scalar>
Scalar sinr(const Problem<Scalar>& problem, const BeamformerSet<Scalar>& bf, int k) {
  if (k < 0 || k >= problem.users()) throw std::out_of_range("sinr: CU index out of range");
  const auto hk = problem.h.col(k);
  const RealVector<Scalar> to_comm = (bf.comm.adjoint() * hk).cwiseAbs2();
  const Scalar to_sensing = (bf.sensing.adjoint() * hk).squaredNorm();
  Scalar interference = to_sensing;
  for (int i = 0; i < problem.users(); ++i) {
    if (i != k) interference += to_comm[i];
  }
  return to_comm[k] / (interference + problem.sigma2[k]);
}

template <typename Scalar>
RealVector<Scalar> sinr_all(const Problem<Scalar>& problem, const BeamformerSet<Scalar>& bf) {
  const int users = problem.users();
  RealVector<Scalar> out(users);
  if (users == 0) return out;
  // gains(i, k) = |h_k^H w_i|^2; leak[k] = sum_j |h_k^H r_j|^2.
  const RealVector<Scalar> leak =
      (bf.sensing.adjoint() * problem.h).cwiseAbs2().colwise().sum().transpose();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gains =
      (bf.comm.adjoint() * problem.h).cwiseAbs2();
  for (int k = 0; k < users; ++k) {
    Scalar interference = leak[k];
    for (int i = 0; i < users; ++i) {
      if (i != k) interference += gains(i, k);
    }
    out[k] = gains(k, k) / (interference + problem.sigma2[k]);
  }
  return out;
}

/// Achievable rate log2(1 + gamma) in bits/s/Hz.
template <typename Scalar>
Scalar rate(Scalar gamma) {
  if (gamma < Scalar(0)) throw std::invalid_argument("rate: negative SINR");
  using std::log2;
  return log2(Scalar(1) + gamma);
}

/// Beampattern gain a^H (sum w w^H + sum r r^H) a, evaluated as
/// sum |a^H w_k|^2 + sum |a^H r_j|^2.
template <typename Scalar, typename Derived>
Scalar beampattern_gain(const Eigen::MatrixBase<Derived>& a, const BeamformerSet<Scalar>& bf) {
  return (bf.comm.adjoint() * a).squaredNorm() + (bf.sensing.adjoint() * a).squaredNorm();
}

/// Gain toward every column of `steering` (S x M).
template <typename Scalar, typename Derived>
RealVector<Scalar> beampattern_gains(const Eigen::MatrixBase<Derived>& steering,
                                     const BeamformerSet<Scalar>& bf) {
  if (steering.cols() == 0) return RealVector<Scalar>(0);
  return ((bf.comm.adjoint() * steering).cwiseAbs2().colwise().sum() +
          (bf.sensing.adjoint() * steering).cwiseAbs2().colwise().sum())
      .transpose();
}

/// Per-entity quantities that the auxiliary variable eta lower-bounds.
///
/// With targets these are the beampattern gains zeta_j. Without targets the
/// max-min objective moves to the CUs: term k is gamma_k sigma_k^2 / |h_k|^2,
/// the SINR expressed as an equivalent matched-filter transmit power (W),
/// which never exceeds P.
template <typename Scalar>
RealVector<Scalar> objective_terms(const Problem<Scalar>& problem, const BeamformerSet<Scalar>& bf) {
  if (problem.target_count() > 0) return beampattern_gains(problem.targets, bf);
  RealVector<Scalar> g = sinr_all(problem, bf);
  for (int k = 0; k < problem.users(); ++k) {
    g[k] *= problem.sigma2[k] / problem.h.col(k).squaredNorm();
  }
  return g;
}

/// Signed residuals; each constraint is satisfied when its residual <= 0.
template <typename Scalar>
struct ConstraintResiduals {
  Scalar power = Scalar(0);   ///< total power - P_max (W)
  RealVector<Scalar> sinr;    ///< SINR_th - SINR_k (dB); +inf for zero SINR
  RealVector<Scalar> eta;     ///< eta - objective term
};

template <typename Scalar>
ConstraintResiduals<Scalar> constraint_residuals(const Problem<Scalar>& problem,
                                                 const BeamformerSet<Scalar>& bf) {
  ConstraintResiduals<Scalar> r;
  r.power = total_power(bf) - problem.p_max;
  const RealVector<Scalar> gamma = sinr_all(problem, bf);
  r.sinr.resize(gamma.size());
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    r.sinr[k] = gamma[k] > Scalar(0)
                    ? problem.sinr_th_db - Scalar(10) * std::log10(gamma[k])
                    : std::numeric_limits<Scalar>::infinity();
  }
  r.eta = bf.eta - objective_terms(problem, bf).array();
  return r;
}

inline ConstraintResiduals<double> constraint_residuals(const ScenarioInstance& scenario,
                                                        const ChannelSet<double>& channels,
                                                        const BeamformerSet<double>& bf) {
  return constraint_residuals(make_problem(scenario, channels), bf);
}

/// Acceptance slack for declaring a residual satisfied.
struct FeasibilityTolerance {
  double power_rel = 1e-6;  ///< fraction of P_max
  double sinr_db = 1e-3;
  double eta_rel = 1e-9;    ///< fraction of the objective scale

  template <typename Scalar>
  bool power_and_sinr_ok(const Problem<Scalar>& problem, const ConstraintResiduals<Scalar>& r) const {
    if (r.power > Scalar(power_rel) * problem.p_max) return false;
    for (Eigen::Index k = 0; k < r.sinr.size(); ++k) {
      if (!(r.sinr[k] <= Scalar(sinr_db))) return false;
    }
    return true;
  }

  template <typename Scalar>
  bool feasible(const Problem<Scalar>& problem, const ConstraintResiduals<Scalar>& r) const {
    if (!power_and_sinr_ok(problem, r)) return false;
    const Scalar eta_tol = Scalar(eta_rel) * problem.objective_scale();
    return r.eta.size() == 0 || r.eta.maxCoeff() <= eta_tol;
  }
};

/// Index of the smallest entry; lowest index wins ties. -1 when empty.
template <typename Derived>
Eigen::Index argmin_first(const Eigen::DenseBase<Derived>& v) {
  if (v.size() == 0) return -1;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace hapsisac
