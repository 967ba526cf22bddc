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

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hapsisac/rng.hpp"

namespace hapsisac {

/// Physical parameters of one HAPS deployment. Field names follow the JSON
/// configuration keys; powers are in dBm and thresholds in dB.
struct ScenarioConfig {
  int k = 4;   ///< communication users
  int j = 4;   ///< sensing target points
  int s_w = 8; ///< array width (elements)
  int s_l = 8; ///< array length (elements)
  double p_max_dbm = 52.0;
  double noise_dbm = -110.0;
  double f_hz = 2.545e9;
  double h_haps_m = 20000.0;
  double rician_k = 10.0;
  double area_side_m = 1000.0;
  double sinr_th_db = 10.0;
  std::uint64_t seed = 1;

  int antennas() const { return s_w * s_l; }

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

struct GroundEntity {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double theta = 0.0;  ///< from nadir (rad)
  double phi = 0.0;    ///< azimuth in the ground plane (rad)
  double range = 0.0;  ///< slant range to the platform (m)
};

struct ScenarioInstance {
  ScenarioConfig config;
  Eigen::Vector3d haps_position = Eigen::Vector3d::Zero();
  std::vector<GroundEntity> cus;
  std::vector<GroundEntity> targets;
  double lambda_m = 0.0;
  Eigen::VectorXd sigma2_w;  ///< per-CU noise power (W)
  double p_max_w = 0.0;
};

/// Direction and range from the platform to a ground point. Nadir maps to
/// theta = 0, phi = 0. Throws if the platform is not above the point.
GroundEntity geometry_to_angles(const Eigen::Vector3d& haps, const Eigen::Vector3d& ground);

/// Places K CUs then J targets uniformly over the square service area
/// centred under the platform, using the placement stream of config.seed.
ScenarioInstance sample_scenario(const ScenarioConfig& config);

/// Same derived quantities as sample_scenario, for caller-chosen ground
/// positions (z = 0). Sizes must equal config.k and config.j.
ScenarioInstance make_scenario(const ScenarioConfig& config,
                               const std::vector<Eigen::Vector3d>& cu_positions,
                               const std::vector<Eigen::Vector3d>& target_positions);

}  // namespace hapsisac
