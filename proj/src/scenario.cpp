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

#include "hapsisac/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hapsisac/types.hpp"
#include "hapsisac/units.hpp"

namespace hapsisac {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(k >= 0, "k must be >= 0");
  require(j >= 0, "j must be >= 0");
  require(k + j >= 1, "at least one CU or target is required");
  require(s_w >= 1 && s_l >= 1, "array dimensions must be >= 1");
  require(std::isfinite(p_max_dbm), "p_max_dbm must be finite");
  require(std::isfinite(noise_dbm), "noise_dbm must be finite");
  require(std::isfinite(sinr_th_db), "sinr_th_db must be finite");
  require(f_hz > 0.0 && std::isfinite(f_hz), "f_hz must be > 0");
  require(h_haps_m > 0.0 && std::isfinite(h_haps_m), "h_haps_m must be > 0");
  require(rician_k >= 0.0 && std::isfinite(rician_k), "rician_k must be >= 0");
  require(area_side_m > 0.0 && std::isfinite(area_side_m), "area_side_m must be > 0");
}

GroundEntity geometry_to_angles(const Eigen::Vector3d& haps, const Eigen::Vector3d& ground) {
  if (!(haps.z() > ground.z())) {
    throw std::invalid_argument("platform must be above the ground point");
  }
  const Eigen::Vector3d offset = ground - haps;
  GroundEntity out;
  out.position = ground;
  out.range = offset.norm();
  out.theta = std::acos(std::min(1.0, (haps.z() - ground.z()) / out.range));
  out.phi = std::atan2(offset.y(), offset.x());
  return out;
}

ScenarioInstance make_scenario(const ScenarioConfig& config,
                               const std::vector<Eigen::Vector3d>& cu_positions,
                               const std::vector<Eigen::Vector3d>& target_positions) {
  config.validate();
  if (cu_positions.size() != static_cast<std::size_t>(config.k) ||
      target_positions.size() != static_cast<std::size_t>(config.j)) {
    throw std::invalid_argument("position count does not match config k/j");
  }
  ScenarioInstance inst;
  inst.config = config;
  inst.haps_position = Eigen::Vector3d(0.0, 0.0, config.h_haps_m);
  inst.lambda_m = kSpeedOfLight / config.f_hz;
  inst.p_max_w = dbm_to_watts(config.p_max_dbm);
  inst.sigma2_w = Eigen::VectorXd::Constant(config.k, dbm_to_watts(config.noise_dbm));
  inst.cus.reserve(cu_positions.size());
  for (const auto& p : cu_positions) inst.cus.push_back(geometry_to_angles(inst.haps_position, p));
  inst.targets.reserve(target_positions.size());
  for (const auto& p : target_positions) {
    inst.targets.push_back(geometry_to_angles(inst.haps_position, p));
  }
  return inst;
}

ScenarioInstance sample_scenario(const ScenarioConfig& config) {
  config.validate();
  RngStream rng = RngStream(config.seed).child(StreamId::placement);
  const double half = 0.5 * config.area_side_m;
  auto draw = [&] {
    const double x = rng.uniform(-half, half);
    const double y = rng.uniform(-half, half);
    return Eigen::Vector3d(x, y, 0.0);
  };
  std::vector<Eigen::Vector3d> cus(config.k), targets(config.j);
  for (auto& p : cus) p = draw();
  for (auto& p : targets) p = draw();
  return make_scenario(config, cus, targets);
}

}  // namespace hapsisac
