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

#include "hapsisac/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hapsisac/experiments.hpp"
#include "hapsisac/io.hpp"

namespace hapsisac {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string preset = "desk";
  std::optional<int> n_seeds;
  std::optional<unsigned> threads;
  bool dump_channels = false;
};

class OutputWriter {
 public:
  explicit OutputWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << content;
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

ExperimentConfig resolve_config(const Options& opt) {
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::preset(parse_preset(opt.preset));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  if (!opt.config_path.empty()) cfg = load_config(opt.config_path, cfg);
  if (opt.seed) cfg.scenario.seed = *opt.seed;
  if (opt.n_seeds) cfg.n_seeds = *opt.n_seeds;
  if (opt.threads) cfg.ga.threads = *opt.threads;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  return cfg;
}

// Runs one experiment and returns its run records.
std::vector<RunRecord> run_experiment(const std::string& name, const ExperimentConfig& cfg,
                                      bool dump_channels, OutputWriter& out) {
  auto dump_base_channels = [&](const ChannelSet<double>& channels) {
    if (dump_channels) out.write("channels.csv", channel_csv(channels));
  };

  if (name == "convergence") {
    const auto r = run_convergence(cfg);
    out.write("convergence.csv", generation_log_csv(r.solved.result.log));
    out.write("solution.json", dump(solution_json(r.solved.result)));
    dump_base_channels(r.solved.channels);
    return {r.solved.run};
  }
  if (name == "power-sweep") {
    const auto r = run_power_sweep(cfg);
    out.write("power_sweep.csv", power_sweep_csv(r.rows));
    if (dump_channels) dump_base_channels(build_channels(sample_scenario(cfg.scenario)));
    return r.runs;
  }
  if (name == "beampattern") {
    const auto r = run_beampattern_scan(cfg);
    out.write("beampattern.csv", beampattern_csv(r.rows));
    out.write("solution.json", dump(solution_json(r.solved.result)));
    dump_base_channels(r.solved.channels);
    return {r.solved.run};
  }
  if (name == "rates") {
    const auto r = run_rate_distribution(cfg);
    out.write("rates.csv", rates_csv(r.rows));
    out.write("solution.json", dump(solution_json(r.solved.result)));
    dump_base_channels(r.solved.channels);
    return {r.solved.run};
  }
  const auto r = run_user_scaling(cfg);
  out.write("scaling.csv", scaling_csv(r.rows));
  if (dump_channels) dump_base_channels(build_channels(sample_scenario(cfg.scenario)));
  return r.runs;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"HAPS ISAC max-min beamforming experiments"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON config file or a previous manifest.json");
  app.add_option("--seed", opt.seed, "Base seed (u64) for placement, NLoS and GA streams");
  app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  app.add_option("--preset", opt.preset, "Defaults preset: desk | paper")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  app.add_option("--n-seeds", opt.n_seeds, "Replicates per sweep cell")->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "Worker threads (0 = hardware concurrency)");
  app.add_flag("--dump-channels", opt.dump_channels, "Also write channels.csv for the base scenario");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"convergence", "Best/mean fitness per generation"},
      {"power-sweep", "Best eta versus power and array size"},
      {"beampattern", "Beampattern gain over an angle grid and at the targets"},
      {"rates", "Per-CU SINR and rate"},
      {"scaling", "Minimum CU rate versus number of CUs"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    cfg = resolve_config(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) {
    std::cerr << "config error: cannot create output directory " << opt.out_dir << ": " << ec.message() << "\n";
    return kExitConfigError;
  }

  OutputWriter out(opt.out_dir);
  std::vector<RunRecord> runs;
  try {
    runs = run_experiment(name, cfg, opt.dump_channels, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  ExperimentManifest manifest;
  manifest.experiment = name;
  manifest.config = cfg;
  manifest.command.assign(argv, argv + argc);
  manifest.runs = runs;
  manifest.outputs = out.written();
  manifest.version = kVersion;
  {
    std::ofstream mf(fs::path(opt.out_dir) / "manifest.json", std::ios::binary | std::ios::trunc);
    mf << dump(manifest_json(manifest));
  }

  bool any_feasible = false;
  for (const auto& r : runs) {
    any_feasible = any_feasible || r.feasible;
    if (!r.diagnostic.empty()) std::cerr << "diagnostic [" << r.label << "]: " << r.diagnostic << "\n";
  }
  std::cout << fmt::format("{}: {} run(s), outputs in {}\n", name, runs.size(), opt.out_dir);
  return any_feasible ? kExitOk : kExitInfeasible;
}

}  // namespace hapsisac
