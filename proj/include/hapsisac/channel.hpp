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
#include <stdexcept>

#include "hapsisac/rng.hpp"
#include "hapsisac/scenario.hpp"
#include "hapsisac/types.hpp"

namespace hapsisac {

/// UPA steering vector alpha(theta, phi) kron b(theta, phi).
///
/// alpha runs along the array length (s_l entries, index p) with phase
/// slope sin(theta) cos(phi); b runs along the width (s_w entries, index q)
/// with slope sin(theta) sin(phi). Element s = p * s_w + q.
template <typename Scalar>
ComplexVector<Scalar> steering_vector(Scalar theta, Scalar phi, int s_w, int s_l,
                                      Scalar spacing = Scalar(kElementSpacingWavelengths)) {
  using std::cos;
  using std::sin;
  const Scalar two_pi = Scalar(2 * 3.14159265358979323846);
  const Scalar u = two_pi * spacing * sin(theta) * cos(phi);
  const Scalar v = two_pi * spacing * sin(theta) * sin(phi);

  ComplexVector<Scalar> alpha(s_l), b(s_w);
  for (int p = 0; p < s_l; ++p) alpha[p] = std::polar(Scalar(1), -u * Scalar(p));
  for (int q = 0; q < s_w; ++q) b[q] = std::polar(Scalar(1), -v * Scalar(q));

  // Kronecker product with row-major flattening of the (p, q) grid.
  ComplexVector<Scalar> a(s_l * s_w);
  Eigen::Map<Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      a.data(), s_l, s_w) = alpha * b.transpose();
  return a;
}

template <typename Scalar>
ComplexVector<Scalar> steering_vector(const GroundEntity& entity, int s_w, int s_l) {
  return steering_vector<Scalar>(Scalar(entity.theta), Scalar(entity.phi), s_w, s_l);
}

/// Steering vectors of every target, one per column (S x J).
ComplexMatrix<double> target_steering(const ScenarioInstance& scenario);

/// Free-space path loss (4 pi r / lambda)^2, linear.
template <typename Scalar>
Scalar fspl(Scalar range, Scalar lambda) {
  if (!(range > Scalar(0)) || !(lambda > Scalar(0))) {
    throw std::invalid_argument("fspl: range and wavelength must be positive");
  }
  const Scalar ratio = Scalar(4 * 3.14159265358979323846) * range / lambda;
  return ratio * ratio;
}

/// i.i.d. CN(0, 1) entries.
ComplexVector<double> sample_nlos(int antennas, RngStream& rng);

/// Rician channel of one ground entity:
///   h = (sqrt(K/(1+K)) h_LoS + sqrt(1/(1+K)) h_NLoS) / sqrt(FSPL).
/// Advances rng by one NLoS draw.
ComplexVector<double> rician_channel(const GroundEntity& entity, const ScenarioConfig& config,
                                     RngStream& rng);

template <typename Scalar>
struct ChannelSet {
  ComplexMatrix<Scalar> h;       ///< S x K, column k is h_k
  RealVector<Scalar> path_loss;  ///< FSPL per CU (linear)
  RealVector<Scalar> rician_k;   ///< Rician factor per CU (linear)

  int antennas() const { return static_cast<int>(h.rows()); }
  int users() const { return static_cast<int>(h.cols()); }
};

/// Channels of every CU, drawing NLoS components in CU order from `rng`.
ChannelSet<double> build_channels(const ScenarioInstance& scenario, RngStream& rng);

/// Channels of every CU from the NLoS stream of config.seed.
ChannelSet<double> build_channels(const ScenarioInstance& scenario);

}  // namespace hapsisac
