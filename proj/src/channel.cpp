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

#include "hapsisac/channel.hpp"

namespace hapsisac {

ComplexMatrix<double> target_steering(const ScenarioInstance& scenario) {
  const auto& cfg = scenario.config;
  ComplexMatrix<double> a(cfg.antennas(), static_cast<Eigen::Index>(scenario.targets.size()));
  for (std::size_t j = 0; j < scenario.targets.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)) = steering_vector<double>(scenario.targets[j], cfg.s_w, cfg.s_l);
  }
  return a;
}

ComplexVector<double> sample_nlos(int antennas, RngStream& rng) {
  ComplexVector<double> x(antennas);
  for (int i = 0; i < antennas; ++i) x[i] = rng.complex_normal();
  return x;
}

ComplexVector<double> rician_channel(const GroundEntity& entity, const ScenarioConfig& config,
                                     RngStream& rng) {
  const double lambda = kSpeedOfLight / config.f_hz;
  const double loss = fspl(entity.range, lambda);
  const double kf = config.rician_k;
  const double los_weight = std::sqrt(kf / (1.0 + kf));
  const double nlos_weight = std::sqrt(1.0 / (1.0 + kf));
  const ComplexVector<double> los = steering_vector<double>(entity, config.s_w, config.s_l);
  const ComplexVector<double> nlos = sample_nlos(config.antennas(), rng);
  return (los_weight * los + nlos_weight * nlos) / std::sqrt(loss);
}

ChannelSet<double> build_channels(const ScenarioInstance& scenario, RngStream& rng) {
  const auto& cfg = scenario.config;
  const auto users = static_cast<Eigen::Index>(scenario.cus.size());
  ChannelSet<double> out;
  out.h.resize(cfg.antennas(), users);
  out.path_loss.resize(users);
  out.rician_k = RealVector<double>::Constant(users, cfg.rician_k);
  for (Eigen::Index k = 0; k < users; ++k) {
    const auto& cu = scenario.cus[static_cast<std::size_t>(k)];
    out.h.col(k) = rician_channel(cu, cfg, rng);
    out.path_loss[k] = fspl(cu.range, scenario.lambda_m);
  }
  return out;
}

ChannelSet<double> build_channels(const ScenarioInstance& scenario) {
  RngStream rng = RngStream(scenario.config.seed).child(StreamId::nlos);
  return build_channels(scenario, rng);
}

}  // namespace hapsisac
