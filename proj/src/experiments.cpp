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

#include "hapsisac/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "hapsisac/channel.hpp"
#include "hapsisac/parallel.hpp"
#include "hapsisac/units.hpp"

namespace hapsisac {

Preset parse_preset(std::string_view name) {
  if (name == "desk") return Preset::desk;
  if (name == "paper") return Preset::paper;
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

std::string_view preset_name(Preset preset) { return preset == Preset::desk ? "desk" : "paper"; }

std::vector<double> AngleRange::values() const {
  std::vector<double> out;
  const auto steps = static_cast<long>(std::floor((stop_deg - start_deg) / step_deg + 1e-9));
  out.reserve(static_cast<std::size_t>(steps + 1));
  for (long i = 0; i <= steps; ++i) out.push_back(start_deg + step_deg * double(i));
  return out;
}

ExperimentConfig ExperimentConfig::preset(Preset preset) {
  ExperimentConfig cfg;
  if (preset == Preset::desk) {
    cfg.scenario.k = 2;
    cfg.scenario.j = 4;
    cfg.scenario.s_w = 4;
    cfg.scenario.s_l = 4;
    cfg.ga.population = 200;
    cfg.ga.generations = 300;
  } else {
    cfg.scenario.k = 4;
    cfg.scenario.j = 4;
    cfg.scenario.s_w = 8;
    cfg.scenario.s_l = 8;
    cfg.ga.population = 2500;
    cfg.ga.generations = 1500;
    cfg.antenna_configs = {{2, 2}, {4, 4}, {8, 8}};
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  ga.validate();
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  if (powers_dbm.empty()) throw std::invalid_argument("powers_dbm must be nonempty");
  if (antenna_configs.empty()) throw std::invalid_argument("antenna_configs must be nonempty");
  for (const auto& a : antenna_configs) {
    if (a.s_w < 1 || a.s_l < 1) throw std::invalid_argument("antenna_configs entries must be >= 1");
  }
  if (k_values.empty()) throw std::invalid_argument("k_values must be nonempty");
  for (int k : k_values) {
    if (k < 0 || k + scenario.j < 1) throw std::invalid_argument("k_values entries must be >= 0");
  }
  for (const AngleRange* r : {&theta, &phi}) {
    if (!(r->step_deg > 0.0) || r->stop_deg < r->start_deg) {
      throw std::invalid_argument("angle range needs step > 0 and stop >= start");
    }
  }
  if (theta.start_deg < 0.0 || theta.stop_deg >= 90.0) {
    throw std::invalid_argument("theta range must lie in [0, 90) degrees");
  }
}

std::uint64_t replicate_seed(std::uint64_t base, int index) {
  return derive_seed(base, StreamId::replicate, static_cast<std::uint64_t>(index));
}

SolvedScenario solve_scenario(const ScenarioConfig& config, GaConfig ga, std::string label) {
  const auto start = std::chrono::steady_clock::now();
  SolvedScenario s;
  s.scenario = sample_scenario(config);
  s.channels = build_channels(s.scenario);
  s.problem = make_problem(s.scenario, s.channels);
  ga.seed = derive_seed(config.seed, StreamId::ga);
  s.result = run_ga(s.problem, ga);
  const auto stop = std::chrono::steady_clock::now();

  s.run.label = std::move(label);
  s.run.seed = config.seed;
  s.run.wall_clock_s = std::chrono::duration<double>(stop - start).count();
  s.run.feasible = s.result.log.feasible_found;
  s.run.generations = s.result.log.records.size();
  s.run.evaluations = s.result.log.evaluations;
  s.run.diagnostic = s.result.log.diagnostic;
  return s;
}

namespace {

// Single-solve experiments parallelize fitness evaluation; sweeps
// parallelize cells and keep each solver single-threaded.
GaConfig cell_ga(const ExperimentConfig& config) {
  GaConfig ga = config.ga;
  ga.threads = 1;
  return ga;
}

double floor_db(double linear) { return linear_to_db(std::max(linear, 1e-300)); }

double min_rate(const SolvedScenario& s) {
  const RealVector<double> gamma = sinr_all(s.problem, s.result.solution);
  if (gamma.size() == 0) return 0.0;
  return rate(gamma[argmin_first(gamma)]);
}

}  // namespace

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / double(values.size() - 1))};
}

ConvergenceResult run_convergence(const ExperimentConfig& config) {
  config.validate();
  return {solve_scenario(config.scenario, config.ga, "convergence")};
}

PowerSweepResult run_power_sweep(const ExperimentConfig& config) {
  config.validate();
  struct Cell {
    double p_dbm;
    ArrayShape shape;
    int replicate;
  };
  std::vector<Cell> cells;
  for (double p : config.powers_dbm) {
    for (const auto& shape : config.antenna_configs) {
      for (int r = 0; r < config.n_seeds; ++r) cells.push_back({p, shape, r});
    }
  }
  std::vector<double> eta_db(cells.size());
  std::vector<RunRecord> runs(cells.size());
  const GaConfig ga = cell_ga(config);
  parallel_for(cells.size(), config.ga.threads, [&](std::size_t i) {
    ScenarioConfig sc = config.scenario;
    sc.p_max_dbm = cells[i].p_dbm;
    sc.s_w = cells[i].shape.s_w;
    sc.s_l = cells[i].shape.s_l;
    sc.seed = replicate_seed(config.scenario.seed, cells[i].replicate);
    const SolvedScenario s = solve_scenario(
        sc, ga,
        fmt::format("p={}dBm,s={}x{},r={}", cells[i].p_dbm, sc.s_w, sc.s_l, cells[i].replicate));
    eta_db[i] = floor_db(s.result.solution.eta);
    runs[i] = s.run;
  });

  PowerSweepResult out;
  out.runs = std::move(runs);
  const auto per_cell = static_cast<std::size_t>(config.n_seeds);
  for (std::size_t first = 0; first < cells.size(); first += per_cell) {
    const std::vector<double> group(eta_db.begin() + long(first), eta_db.begin() + long(first + per_cell));
    const auto [mean, sd] = mean_and_std(group);
    out.rows.push_back({cells[first].p_dbm, cells[first].shape.s_w, cells[first].shape.s_l, mean, sd});
  }
  return out;
}

BeampatternResult run_beampattern_scan(const ExperimentConfig& config) {
  config.validate();
  BeampatternResult out{solve_scenario(config.scenario, config.ga, "beampattern"), {}};
  const auto& sc = config.scenario;
  const auto& bf = out.solved.result.solution;
  for (double theta : config.theta.values()) {
    for (double phi : config.phi.values()) {
      const ComplexVector<double> a =
          steering_vector<double>(deg_to_rad(theta), deg_to_rad(phi), sc.s_w, sc.s_l);
      out.rows.push_back({theta, phi, floor_db(beampattern_gain(a, bf)), false});
    }
  }
  for (const auto& target : out.solved.scenario.targets) {
    const ComplexVector<double> a = steering_vector<double>(target, sc.s_w, sc.s_l);
    out.rows.push_back(
        {rad_to_deg(target.theta), rad_to_deg(target.phi), floor_db(beampattern_gain(a, bf)), true});
  }
  return out;
}

RateResult run_rate_distribution(const ExperimentConfig& config) {
  config.validate();
  RateResult out{solve_scenario(config.scenario, config.ga, "rates"), {}};
  const RealVector<double> gamma = sinr_all(out.solved.problem, out.solved.result.solution);
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    out.rows.push_back({static_cast<int>(k), floor_db(gamma[k]), rate(gamma[k]), config.scenario.sinr_th_db});
  }
  return out;
}

ScalingResult run_user_scaling(const ExperimentConfig& config) {
  config.validate();
  struct Cell {
    int k;
    int replicate;
  };
  std::vector<Cell> cells;
  for (int k : config.k_values) {
    for (int r = 0; r < config.n_seeds; ++r) cells.push_back({k, r});
  }
  std::vector<double> rates(cells.size());
  std::vector<RunRecord> runs(cells.size());
  const GaConfig ga = cell_ga(config);
  parallel_for(cells.size(), config.ga.threads, [&](std::size_t i) {
    ScenarioConfig sc = config.scenario;
    sc.k = cells[i].k;
    sc.seed = replicate_seed(config.scenario.seed, cells[i].replicate);
    const SolvedScenario s =
        solve_scenario(sc, ga, fmt::format("k={},r={}", sc.k, cells[i].replicate));
    rates[i] = min_rate(s);
    runs[i] = s.run;
  });

  ScalingResult out;
  out.runs = std::move(runs);
  const auto per_cell = static_cast<std::size_t>(config.n_seeds);
  for (std::size_t first = 0; first < cells.size(); first += per_cell) {
    const std::vector<double> group(rates.begin() + long(first), rates.begin() + long(first + per_cell));
    const auto [mean, sd] = mean_and_std(group);
    int feasible = 0;
    for (std::size_t i = first; i < first + per_cell; ++i) feasible += out.runs[i].feasible ? 1 : 0;
    out.rows.push_back({cells[first].k, mean, sd, double(feasible) / double(per_cell)});
  }
  return out;
}

}  // namespace hapsisac
