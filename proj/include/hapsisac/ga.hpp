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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hapsisac/metrics.hpp"
#include "hapsisac/rng.hpp"

namespace hapsisac {

/// Hinge-penalty weights per unit of normalized residual.
struct PenaltyWeights {
  double power = 1e3;  ///< per unit of (power excess / P_max)
  double sinr = 1e2;   ///< per dB of SINR shortfall
  double eta = 1e3;    ///< per unit of (eta excess / objective scale)

  bool operator==(const PenaltyWeights&) const = default;
};

/// How eta enters the fitness. `gene` carries it as the last gene and
/// penalizes eta > zeta_j; `derived` sets eta = min_j zeta_j directly.
enum class EtaMode { gene, derived };

struct GaConfig {
  int population = 200;
  int generations = 300;
  double crossover_fraction = 0.81;
  double mutation_std_fraction = 0.02;
  /// Linear decay of the mutation std over the generation budget:
  /// std_g = std_0 * (1 - shrink * g / generations). 0 keeps it constant.
  double mutation_shrink = 1.0;
  double function_tolerance = 1e-6;
  int stall_generations = 50;  ///< 0 disables stall termination
  int tournament_size = 2;
  int elite_count = 2;
  PenaltyWeights penalty_weights;
  EtaMode eta_mode = EtaMode::gene;
  std::uint64_t seed = 1;
  unsigned threads = 0;  ///< fitness workers, 0 = hardware concurrency

  void validate() const;

  bool operator==(const GaConfig&) const = default;
};

/// Gene layout: interleaved (re, im) of the S x K communication block then
/// the S x J sensing block (column-major), and a final eta gene normalized
/// by the objective scale.
struct GeneLayout {
  int antennas = 0;
  int users = 0;
  int targets = 0;
  double beam_bound = 1.0;   ///< beamformer genes lie in [-beam_bound, beam_bound]
  double eta_scale = 1.0;    ///< raw eta = gene * eta_scale

  static GeneLayout of(const Problem<double>& problem);

  Eigen::Index beam_genes() const { return 2 * Eigen::Index(antennas) * (users + targets); }
  Eigen::Index size() const { return beam_genes() + 1; }
  Eigen::Index eta_index() const { return beam_genes(); }
  double lower(Eigen::Index gene) const { return gene == eta_index() ? 0.0 : -beam_bound; }
  double upper(Eigen::Index gene) const { return gene == eta_index() ? 1.0 : beam_bound; }
};

using Chromosome = Eigen::VectorXd;
/// One individual per column.
using Population = Eigen::MatrixXd;

Chromosome encode(const BeamformerSet<double>& bf, const GeneLayout& layout);
BeamformerSet<double> decode(const Eigen::Ref<const Chromosome>& genes, const GeneLayout& layout);

inline Chromosome encode(const BeamformerSet<double>& bf, const Problem<double>& problem) {
  return encode(bf, GeneLayout::of(problem));
}
inline BeamformerSet<double> decode(const Eigen::Ref<const Chromosome>& genes, const Problem<double>& problem) {
  return decode(genes, GeneLayout::of(problem));
}

/// Residuals of SINR at or above this many dB count as this many in penalties.
inline constexpr double kSinrResidualCap = 1e6;

struct FitnessReport {
  double fitness = 0.0;
  double eta = 0.0;  ///< raw eta (W gain units)
  ConstraintResiduals<double> residuals;
  bool feasible = false;
};

/// Penalized objective
///   eta - scale * (mu_p [pw]+ / P + mu_s sum [sinr_k]+ + mu_e sum [eta_j]+ / scale)
/// where scale is the objective scale (P S with targets).
FitnessReport evaluate_fitness(const Eigen::Ref<const Chromosome>& genes, const Problem<double>& problem,
                               const PenaltyWeights& weights, EtaMode mode = EtaMode::gene,
                               const FeasibilityTolerance& tol = {});

/// Beamformer genes uniform on [-c, c] with c chosen so the expected total
/// power is P_max / 2; eta gene uniform on [0, 1].
Population initialize_population(const GeneLayout& layout, const GaConfig& ga, RngStream& rng);

/// Best of `k` uniform draws with replacement; earlier draw wins ties.
std::size_t tournament_select(std::span<const double> fitness, int k, RngStream& rng);

/// Uniform (scattered) crossover.
Chromosome crossover(const Eigen::Ref<const Chromosome>& a, const Eigen::Ref<const Chromosome>& b,
                     RngStream& rng);

/// Adds N(0, (std_fraction * bound width)^2) to every gene, then clamps.
Chromosome gaussian_mutate(const Eigen::Ref<const Chromosome>& c, const GeneLayout& layout,
                           double std_fraction, RngStream& rng);

struct GenerationRecord {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double best_eta = 0.0;
  int feasible_count = 0;
};

enum class StopReason { max_generations, stall };

struct GenerationLog {
  std::vector<GenerationRecord> records;
  std::size_t evaluations = 0;
  StopReason stop = StopReason::max_generations;
  bool feasible_found = false;
  std::string diagnostic;  ///< empty unless no feasible individual was seen
};

struct GaResult {
  BeamformerSet<double> solution;  ///< eta repaired to <= min objective term
  FitnessReport report;            ///< of `solution`
  GenerationLog log;
};

/// Elitist generational GA. The returned solution is the best individual
/// ever evaluated, preferring individuals that meet the power and SINR
/// constraints; its eta is clamped to the smallest objective term.
GaResult run_ga(const Problem<double>& problem, const GaConfig& ga);

/// Called once per fitness evaluation, in population order, on the calling thread.
using EvaluationObserver = std::function<void(const Eigen::Ref<const Chromosome>&, const FitnessReport&)>;
GaResult run_ga(const Problem<double>& problem, const GaConfig& ga, const EvaluationObserver& observe);

GaResult run_ga(const ScenarioInstance& scenario, const ChannelSet<double>& channels, const GaConfig& ga);

}  // namespace hapsisac
