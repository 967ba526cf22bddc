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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hapsisac/experiments.hpp"

namespace hapsisac {

/// Invalid, unreadable or unknown configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full resolved configuration. Scenario fields sit at the top level in
/// snake_case; "ga" and "experiment" hold solver and sweep settings.
/// Angles are in degrees and powers in dBm.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Overlays the keys present in `j` onto `base`. Unknown keys, wrong types
/// and invariant violations raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base);

/// Reads a configuration file, or the "config" object of a manifest.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);

// CSV writers: header row, LF line endings, shortest round-trip decimals.
std::string generation_log_csv(const GenerationLog& log);
std::string power_sweep_csv(const std::vector<PowerSweepRow>& rows);
std::string beampattern_csv(const std::vector<BeampatternRow>& rows);
std::string rates_csv(const std::vector<RateRow>& rows);
std::string scaling_csv(const std::vector<ScalingRow>& rows);

/// Channel dump: entity_id, element_index, re, im.
std::string channel_csv(const ChannelSet<double>& channels);

/// Best solution: (re, im) pairs per beamformer, eta and residuals.
nlohmann::json solution_json(const GaResult& result);

struct ExperimentManifest {
  std::string experiment;
  ExperimentConfig config;
  std::vector<std::string> command;
  std::vector<RunRecord> runs;
  std::vector<std::string> outputs;
  std::string version;
};

nlohmann::json manifest_json(const ExperimentManifest& manifest);

/// Parses a CSV produced by the writers above into header and rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
CsvTable parse_csv(const std::string& text);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace hapsisac
