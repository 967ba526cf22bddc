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

#include "hapsisac/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace hapsisac {

using nlohmann::json;

namespace {

std::string_view eta_mode_name(EtaMode m) { return m == EtaMode::gene ? "gene" : "derived"; }

EtaMode parse_eta_mode(const std::string& s) {
  if (s == "gene") return EtaMode::gene;
  if (s == "derived") return EtaMode::derived;
  throw ConfigError("ga.eta_mode must be \"gene\" or \"derived\"");
}

json range_json(const AngleRange& r) { return json::array({r.start_deg, r.stop_deg, r.step_deg}); }

AngleRange parse_range(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(fmt::format("experiment.{} must be [start, stop, step]", key));
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(fmt::format("unknown key \"{}\" in {}", key, where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  const auto& s = c.scenario;
  const auto& g = c.ga;
  json antennas = json::array();
  for (const auto& a : c.antenna_configs) antennas.push_back({a.s_w, a.s_l});
  return json{
      {"k", s.k},
      {"j", s.j},
      {"s_w", s.s_w},
      {"s_l", s.s_l},
      {"p_max_dbm", s.p_max_dbm},
      {"noise_dbm", s.noise_dbm},
      {"f_hz", s.f_hz},
      {"h_haps_m", s.h_haps_m},
      {"rician_k", s.rician_k},
      {"area_side_m", s.area_side_m},
      {"sinr_th_db", s.sinr_th_db},
      {"seed", s.seed},
      {"ga",
       {{"population", g.population},
        {"generations", g.generations},
        {"crossover_fraction", g.crossover_fraction},
        {"mutation_std_fraction", g.mutation_std_fraction},
        {"mutation_shrink", g.mutation_shrink},
        {"function_tolerance", g.function_tolerance},
        {"stall_generations", g.stall_generations},
        {"tournament_size", g.tournament_size},
        {"elite_count", g.elite_count},
        {"penalty_weights",
         {{"power", g.penalty_weights.power}, {"sinr", g.penalty_weights.sinr}, {"eta", g.penalty_weights.eta}}},
        {"eta_mode", eta_mode_name(g.eta_mode)},
        {"threads", g.threads}}},
      {"experiment",
       {{"n_seeds", c.n_seeds},
        {"powers_dbm", c.powers_dbm},
        {"antenna_configs", antennas},
        {"k_values", c.k_values},
        {"theta_deg", range_json(c.theta)},
        {"phi_deg", range_json(c.phi)}}},
  };
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  try {
    reject_unknown(j,
                   {"k", "j", "s_w", "s_l", "p_max_dbm", "noise_dbm", "f_hz", "h_haps_m", "rician_k",
                    "area_side_m", "sinr_th_db", "seed", "ga", "experiment"},
                   "config");
    auto& s = c.scenario;
    read(j, "k", s.k);
    read(j, "j", s.j);
    read(j, "s_w", s.s_w);
    read(j, "s_l", s.s_l);
    read(j, "p_max_dbm", s.p_max_dbm);
    read(j, "noise_dbm", s.noise_dbm);
    read(j, "f_hz", s.f_hz);
    read(j, "h_haps_m", s.h_haps_m);
    read(j, "rician_k", s.rician_k);
    read(j, "area_side_m", s.area_side_m);
    read(j, "sinr_th_db", s.sinr_th_db);
    read(j, "seed", s.seed);

    if (j.contains("ga")) {
      const json& g = j.at("ga");
      reject_unknown(g,
                     {"population", "generations", "crossover_fraction", "mutation_std_fraction",
                      "mutation_shrink", "function_tolerance", "stall_generations", "tournament_size",
                      "elite_count", "penalty_weights", "eta_mode", "threads"},
                     "ga");
      auto& ga = c.ga;
      read(g, "population", ga.population);
      read(g, "generations", ga.generations);
      read(g, "crossover_fraction", ga.crossover_fraction);
      read(g, "mutation_std_fraction", ga.mutation_std_fraction);
      read(g, "mutation_shrink", ga.mutation_shrink);
      read(g, "function_tolerance", ga.function_tolerance);
      read(g, "stall_generations", ga.stall_generations);
      read(g, "tournament_size", ga.tournament_size);
      read(g, "elite_count", ga.elite_count);
      read(g, "threads", ga.threads);
      if (g.contains("penalty_weights")) {
        const json& w = g.at("penalty_weights");
        reject_unknown(w, {"power", "sinr", "eta"}, "ga.penalty_weights");
        read(w, "power", ga.penalty_weights.power);
        read(w, "sinr", ga.penalty_weights.sinr);
        read(w, "eta", ga.penalty_weights.eta);
      }
      if (g.contains("eta_mode")) ga.eta_mode = parse_eta_mode(g.at("eta_mode").get<std::string>());
    }

    if (j.contains("experiment")) {
      const json& e = j.at("experiment");
      reject_unknown(e, {"n_seeds", "powers_dbm", "antenna_configs", "k_values", "theta_deg", "phi_deg"},
                     "experiment");
      read(e, "n_seeds", c.n_seeds);
      read(e, "powers_dbm", c.powers_dbm);
      read(e, "k_values", c.k_values);
      if (e.contains("antenna_configs")) {
        c.antenna_configs.clear();
        for (const auto& pair : e.at("antenna_configs")) {
          if (!pair.is_array() || pair.size() != 2) {
            throw ConfigError("experiment.antenna_configs entries must be [s_w, s_l]");
          }
          c.antenna_configs.push_back({pair[0].get<int>(), pair[1].get<int>()});
        }
      }
      if (e.contains("theta_deg")) c.theta = parse_range(e.at("theta_deg"), "theta_deg");
      if (e.contains("phi_deg")) c.phi = parse_range(e.at("phi_deg"), "phi_deg");
    }
    c.validate();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config type error: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw ConfigError("config parse error in " + path.string() + ": " + ex.what());
  }
  if (j.is_object() && j.contains("experiment") && j.contains("config") && j.at("config").is_object()) {
    return config_from_json(j.at("config"), std::move(base));
  }
  return config_from_json(j, std::move(base));
}

std::string generation_log_csv(const GenerationLog& log) {
  std::string out = "generation,best_fitness,mean_fitness,best_eta_dB,feasible_count\n";
  for (const auto& r : log.records) {
    out += fmt::format("{},{},{},{},{}\n", r.generation, fmt_double(r.best_fitness),
                       fmt_double(r.mean_fitness), fmt_double(10.0 * std::log10(r.best_eta)),
                       r.feasible_count);
  }
  return out;
}

std::string power_sweep_csv(const std::vector<PowerSweepRow>& rows) {
  std::string out = "p_dBm,s_w,s_l,eta_dB_mean,eta_dB_std\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", fmt_double(r.p_dbm), r.s_w, r.s_l, fmt_double(r.eta_db_mean),
                       fmt_double(r.eta_db_std));
  }
  return out;
}

std::string beampattern_csv(const std::vector<BeampatternRow>& rows) {
  std::string out = "theta_deg,phi_deg,zeta_dB,is_target\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", fmt_double(r.theta_deg), fmt_double(r.phi_deg),
                       fmt_double(r.zeta_db), r.is_target ? 1 : 0);
  }
  return out;
}

std::string rates_csv(const std::vector<RateRow>& rows) {
  std::string out = "cu_id,sinr_dB,rate_bps_hz,sinr_th_dB\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", r.cu_id, fmt_double(r.sinr_db), fmt_double(r.rate_bps_hz),
                       fmt_double(r.sinr_th_db));
  }
  return out;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::string out = "k,min_rate_mean,min_rate_std,feasible_fraction\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", r.k, fmt_double(r.min_rate_mean), fmt_double(r.min_rate_std),
                       fmt_double(r.feasible_fraction));
  }
  return out;
}

std::string channel_csv(const ChannelSet<double>& channels) {
  std::string out = "entity_id,element_index,re,im\n";
  for (Eigen::Index k = 0; k < channels.h.cols(); ++k) {
    for (Eigen::Index s = 0; s < channels.h.rows(); ++s) {
      const auto v = channels.h(s, k);
      out += fmt::format("{},{},{},{}\n", k, s, fmt_double(v.real()), fmt_double(v.imag()));
    }
  }
  return out;
}

namespace {

json beam_columns(const ComplexMatrix<double>& m) {
  json cols = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    json re = json::array(), im = json::array();
    for (Eigen::Index s = 0; s < m.rows(); ++s) {
      re.push_back(m(s, c).real());
      im.push_back(m(s, c).imag());
    }
    cols.push_back({{"re", re}, {"im", im}});
  }
  return cols;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json solution_json(const GaResult& result) {
  const auto& res = result.report.residuals;
  json sinr = json::array(), eta = json::array();
  for (Eigen::Index k = 0; k < res.sinr.size(); ++k) sinr.push_back(finite_or_null(res.sinr[k]));
  for (Eigen::Index k = 0; k < res.eta.size(); ++k) eta.push_back(finite_or_null(res.eta[k]));
  return json{
      {"eta", result.solution.eta},
      {"fitness", result.report.fitness},
      {"feasible", result.report.feasible},
      {"comm", beam_columns(result.solution.comm)},
      {"sensing", beam_columns(result.solution.sensing)},
      {"residuals", {{"power_w", res.power}, {"sinr_db", sinr}, {"eta", eta}}},
  };
}

json manifest_json(const ExperimentManifest& m) {
  json runs = json::array();
  json seeds = json::array();
  std::set<std::uint64_t> seen;
  for (const auto& r : m.runs) {
    runs.push_back({{"label", r.label},
                    {"seed", r.seed},
                    {"wall_clock_s", r.wall_clock_s},
                    {"feasible", r.feasible},
                    {"generations", r.generations},
                    {"evaluations", r.evaluations},
                    {"diagnostic", r.diagnostic}});
    if (seen.insert(r.seed).second) seeds.push_back(r.seed);
  }
  return json{{"experiment", m.experiment}, {"version", m.version}, {"command", m.command},
              {"config", config_to_json(m.config)}, {"seeds", seeds}, {"runs", runs},
              {"outputs", m.outputs}};
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no CSV column " + name);
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

}  // namespace hapsisac
