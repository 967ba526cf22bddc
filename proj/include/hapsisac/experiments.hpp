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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hapsisac/ga.hpp"
#include "hapsisac/scenario.hpp"

namespace hapsisac {

enum class Preset { desk, paper };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset preset);

/// Inclusive angle range in degrees.
struct AngleRange {
  double start_deg = 0.0;
  double stop_deg = 0.0;
  double step_deg = 1.0;

  std::vector<double> values() const;
  bool operator==(const AngleRange&) const = default;
};

struct ArrayShape {
  int s_w = 4;
  int s_l = 4;
  bool operator==(const ArrayShape&) const = default;
};

/// Resolved settings of one experiment. `scenario.seed` is the single seed
/// every stream (placement, NLoS, GA) is derived from; `ga.seed` is
/// overwritten per run.
struct ExperimentConfig {
  ScenarioConfig scenario;
  GaConfig ga;
  int n_seeds = 3;
  std::vector<double> powers_dbm{40.0, 46.0, 52.0};
  std::vector<ArrayShape> antenna_configs{{2, 2}, {4, 4}};
  std::vector<int> k_values{1, 2, 4};
  AngleRange theta{0.0, 60.0, 1.0};
  AngleRange phi{-180.0, 180.0, 5.0};

  /// Desk: 4x4 array, K = 2, J = 4, population 200, 300 generations.
  /// Paper: full scale, 8x8 array, K = J = 4, population 2500, 1500 generations.
  static ExperimentConfig preset(Preset preset);

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Seed of replicate `index` in multi-seed experiments.
std::uint64_t replicate_seed(std::uint64_t base, int index);

struct RunRecord {
  std::string label;
  std::uint64_t seed = 0;
  double wall_clock_s = 0.0;
  bool feasible = false;
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  std::string diagnostic;
};

/// One scenario realization solved by the GA.
struct SolvedScenario {
  ScenarioInstance scenario;
  ChannelSet<double> channels;
  Problem<double> problem;
  GaResult result;
  RunRecord run;
};

/// Samples the scenario and channels of `config.seed` and runs the GA with
/// the seed derived from it.
SolvedScenario solve_scenario(const ScenarioConfig& config, GaConfig ga, std::string label = {});

struct ConvergenceResult {
  SolvedScenario solved;
};

struct PowerSweepRow {
  double p_dbm = 0.0;
  int s_w = 0;
  int s_l = 0;
  double eta_db_mean = 0.0;
  double eta_db_std = 0.0;
};

struct BeampatternRow {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  double zeta_db = 0.0;
  bool is_target = false;
};

struct RateRow {
  int cu_id = 0;
  double sinr_db = 0.0;
  double rate_bps_hz = 0.0;
  double sinr_th_db = 0.0;
};

struct ScalingRow {
  int k = 0;
  double min_rate_mean = 0.0;
  double min_rate_std = 0.0;
  double feasible_fraction = 0.0;
};

struct PowerSweepResult {
  std::vector<PowerSweepRow> rows;
  std::vector<RunRecord> runs;
};

struct BeampatternResult {
  SolvedScenario solved;
  std::vector<BeampatternRow> rows;
};

struct RateResult {
  SolvedScenario solved;
  std::vector<RateRow> rows;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  std::vector<RunRecord> runs;
};

ConvergenceResult run_convergence(const ExperimentConfig& config);

/// One row per (power, array shape), averaging best eta (dB) over n_seeds.
/// Cells run concurrently; each owns its solver and streams.
PowerSweepResult run_power_sweep(const ExperimentConfig& config);

/// Solves once, then evaluates zeta over the theta x phi grid and at the
/// J target directions.
BeampatternResult run_beampattern_scan(const ExperimentConfig& config);

RateResult run_rate_distribution(const ExperimentConfig& config);

/// Minimum CU rate versus K, averaged over n_seeds.
ScalingResult run_user_scaling(const ExperimentConfig& config);

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_and_std(const std::vector<double>& values);

}  // namespace hapsisac
