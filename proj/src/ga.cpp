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

#include "hapsisac/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hapsisac/parallel.hpp"

namespace hapsisac {

void GaConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(population >= 2, "ga.population must be >= 2");
  require(generations >= 1, "ga.generations must be >= 1");
  require(crossover_fraction >= 0.0 && crossover_fraction <= 1.0,
          "ga.crossover_fraction must lie in [0, 1]");
  require(mutation_std_fraction > 0.0, "ga.mutation_std_fraction must be > 0");
  require(mutation_shrink >= 0.0 && mutation_shrink <= 1.0, "ga.mutation_shrink must lie in [0, 1]");
  require(function_tolerance >= 0.0, "ga.function_tolerance must be >= 0");
  require(stall_generations >= 0, "ga.stall_generations must be >= 0");
  require(tournament_size >= 2, "ga.tournament_size must be >= 2");
  require(elite_count >= 0 && elite_count < population, "ga.elite_count must lie in [0, population)");
  require(penalty_weights.power >= 0.0 && penalty_weights.sinr >= 0.0 && penalty_weights.eta >= 0.0,
          "ga.penalty_weights must be >= 0");
}

GeneLayout GeneLayout::of(const Problem<double>& problem) {
  GeneLayout g;
  g.antennas = problem.antennas();
  g.users = problem.users();
  g.targets = problem.target_count();
  g.beam_bound = std::sqrt(problem.p_max);
  g.eta_scale = problem.objective_scale();
  return g;
}

Chromosome encode(const BeamformerSet<double>& bf, const GeneLayout& layout) {
  const Eigen::Index s = layout.antennas;
  if (bf.comm.rows() != s || bf.comm.cols() != layout.users || bf.sensing.rows() != s ||
      bf.sensing.cols() != layout.targets) {
    throw std::invalid_argument("encode: beamformer dimensions do not match layout");
  }
  Chromosome genes(layout.size());
  const Eigen::Index comm_genes = 2 * s * layout.users;
  // std::complex<double> is layout-compatible with double[2].
  Eigen::Map<ComplexMatrix<double>>(reinterpret_cast<Complex<double>*>(genes.data()), s,
                                    layout.users) = bf.comm;
  Eigen::Map<ComplexMatrix<double>>(reinterpret_cast<Complex<double>*>(genes.data() + comm_genes), s,
                                    layout.targets) = bf.sensing;
  genes[layout.eta_index()] = bf.eta / layout.eta_scale;
  return genes;
}

BeamformerSet<double> decode(const Eigen::Ref<const Chromosome>& genes, const GeneLayout& layout) {
  if (genes.size() != layout.size()) throw std::invalid_argument("decode: chromosome length mismatch");
  const Eigen::Index s = layout.antennas;
  const Eigen::Index comm_genes = 2 * s * layout.users;
  BeamformerSet<double> bf;
  bf.comm = Eigen::Map<const ComplexMatrix<double>>(
      reinterpret_cast<const Complex<double>*>(genes.data()), s, layout.users);
  bf.sensing = Eigen::Map<const ComplexMatrix<double>>(
      reinterpret_cast<const Complex<double>*>(genes.data() + comm_genes), s, layout.targets);
  bf.eta = genes[layout.eta_index()] * layout.eta_scale;
  return bf;
}

FitnessReport evaluate_fitness(const Eigen::Ref<const Chromosome>& genes, const Problem<double>& problem,
                               const PenaltyWeights& weights, EtaMode mode,
                               const FeasibilityTolerance& tol) {
  const GeneLayout layout = GeneLayout::of(problem);
  BeamformerSet<double> bf = decode(genes, layout);
  if (mode == EtaMode::derived) {
    const RealVector<double> terms = objective_terms(problem, bf);
    bf.eta = terms.size() > 0 ? terms.minCoeff() : 0.0;
  }

  FitnessReport rep;
  rep.eta = bf.eta;
  rep.residuals = constraint_residuals(problem, bf);
  const double scale = problem.objective_scale();

  double sinr_excess = 0.0;
  for (Eigen::Index k = 0; k < rep.residuals.sinr.size(); ++k) {
    sinr_excess += std::clamp(rep.residuals.sinr[k], 0.0, kSinrResidualCap);
  }
  double eta_excess = 0.0;
  if (mode == EtaMode::gene) eta_excess = rep.residuals.eta.cwiseMax(0.0).sum();

  const double penalty = weights.power * std::max(0.0, rep.residuals.power) / problem.p_max +
                         weights.sinr * sinr_excess + weights.eta * eta_excess / scale;
  rep.fitness = bf.eta - scale * penalty;
  rep.feasible = tol.feasible(problem, rep.residuals);
  return rep;
}

Population initialize_population(const GeneLayout& layout, const GaConfig& ga, RngStream& rng) {
  const Eigen::Index beam = layout.beam_genes();
  // Uniform on [-c, c] has E[x^2] = c^2 / 3; beam * c^2 / 3 = P / 2.
  const double p_max = layout.beam_bound * layout.beam_bound;
  const double half_width =
      beam > 0 ? std::min(layout.beam_bound, std::sqrt(1.5 * p_max / double(beam))) : 0.0;
  Population pop(layout.size(), ga.population);
  for (Eigen::Index c = 0; c < pop.cols(); ++c) {
    for (Eigen::Index g = 0; g < beam; ++g) pop(g, c) = rng.uniform(-half_width, half_width);
    pop(layout.eta_index(), c) = rng.uniform();
  }
  return pop;
}

std::size_t tournament_select(std::span<const double> fitness, int k, RngStream& rng) {
  std::size_t best = rng.index(fitness.size());
  for (int i = 1; i < k; ++i) {
    const std::size_t challenger = rng.index(fitness.size());
    if (fitness[challenger] > fitness[best]) best = challenger;
  }
  return best;
}

Chromosome crossover(const Eigen::Ref<const Chromosome>& a, const Eigen::Ref<const Chromosome>& b,
                     RngStream& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover: parent length mismatch");
  Chromosome child(a.size());
  std::uint64_t bits = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (i % 64 == 0) bits = rng.next_u64();
    child[i] = (bits & 1u) ? b[i] : a[i];
    bits >>= 1;
  }
  return child;
}

Chromosome gaussian_mutate(const Eigen::Ref<const Chromosome>& c, const GeneLayout& layout,
                           double std_fraction, RngStream& rng) {
  if (!(std_fraction > 0.0)) throw std::invalid_argument("gaussian_mutate: std_fraction must be > 0");
  Chromosome out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double lo = layout.lower(i);
    const double hi = layout.upper(i);
    out[i] = std::clamp(c[i] + std_fraction * (hi - lo) * rng.normal(), lo, hi);
  }
  return out;
}

namespace {

struct Scored {
  std::vector<FitnessReport> reports;
  std::vector<double> fitness;
};

void evaluate_columns(const Population& pop, Eigen::Index first, const Problem<double>& problem,
                      const GaConfig& ga, Scored& scored, const EvaluationObserver& observe) {
  const auto n = static_cast<std::size_t>(pop.cols() - first);
  parallel_for(n, ga.threads, [&](std::size_t i) {
    const auto col = first + static_cast<Eigen::Index>(i);
    scored.reports[static_cast<std::size_t>(col)] =
        evaluate_fitness(pop.col(col), problem, ga.penalty_weights, ga.eta_mode);
  });
  for (std::size_t i = static_cast<std::size_t>(first); i < scored.reports.size(); ++i) {
    scored.fitness[i] = scored.reports[i].fitness;
    if (observe) observe(pop.col(static_cast<Eigen::Index>(i)), scored.reports[i]);
  }
}

// Incumbent ordering: meeting power and SINR first, then fitness.
bool better_incumbent(bool ok_a, double fit_a, bool ok_b, double fit_b) {
  if (ok_a != ok_b) return ok_a;
  return fit_a > fit_b;
}

}  // namespace

GaResult run_ga(const Problem<double>& problem, const GaConfig& ga) { return run_ga(problem, ga, {}); }

GaResult run_ga(const Problem<double>& problem, const GaConfig& ga, const EvaluationObserver& observe) {
  ga.validate();
  const GeneLayout layout = GeneLayout::of(problem);
  const FeasibilityTolerance tol;
  RngStream rng(ga.seed);

  const auto n = static_cast<std::size_t>(ga.population);
  const auto elites = static_cast<std::size_t>(ga.elite_count);
  const std::size_t children = n - elites;
  const auto crossovers =
      static_cast<std::size_t>(std::lround(ga.crossover_fraction * static_cast<double>(children)));

  Population pop = initialize_population(layout, ga, rng);
  Scored scored{std::vector<FitnessReport>(n), std::vector<double>(n)};
  evaluate_columns(pop, 0, problem, ga, scored, observe);

  GaResult result;
  GenerationLog& log = result.log;
  log.evaluations = n;

  Chromosome incumbent = pop.col(0);
  bool incumbent_ok = false;
  double incumbent_fitness = -std::numeric_limits<double>::infinity();
  bool have_incumbent = false;

  std::vector<std::size_t> order(n);
  for (int gen = 0;; ++gen) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scored.fitness[a] > scored.fitness[b]; });

    GenerationRecord rec;
    rec.generation = gen;
    rec.best_fitness = scored.fitness[order[0]];
    rec.best_eta = scored.reports[order[0]].eta;
    rec.mean_fitness = std::accumulate(scored.fitness.begin(), scored.fitness.end(), 0.0) / double(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rep = scored.reports[i];
      rec.feasible_count += rep.feasible ? 1 : 0;
      const bool ok = tol.power_and_sinr_ok(problem, rep.residuals);
      if (!have_incumbent || better_incumbent(ok, rep.fitness, incumbent_ok, incumbent_fitness)) {
        incumbent = pop.col(static_cast<Eigen::Index>(i));
        incumbent_ok = ok;
        incumbent_fitness = rep.fitness;
        have_incumbent = true;
      }
    }
    log.records.push_back(rec);

    if (gen + 1 >= ga.generations) {
      log.stop = StopReason::max_generations;
      break;
    }
    if (ga.stall_generations > 0 && gen >= ga.stall_generations) {
      const double window_gain =
          rec.best_fitness - log.records[static_cast<std::size_t>(gen - ga.stall_generations)].best_fitness;
      if (window_gain < ga.function_tolerance) {
        log.stop = StopReason::stall;
        break;
      }
    }

    // Next generation: elites, crossover children, mutation children.
    Population next(pop.rows(), pop.cols());
    Scored next_scored{std::vector<FitnessReport>(n), std::vector<double>(n)};
    for (std::size_t e = 0; e < elites; ++e) {
      next.col(static_cast<Eigen::Index>(e)) = pop.col(static_cast<Eigen::Index>(order[e]));
      next_scored.reports[e] = scored.reports[order[e]];
      next_scored.fitness[e] = scored.fitness[order[e]];
    }
    const std::span<const double> fit(scored.fitness);
    const double mutation_std =
        ga.mutation_std_fraction *
        std::max(0.0, 1.0 - ga.mutation_shrink * double(gen + 1) / double(ga.generations));
    for (std::size_t c = 0; c < children; ++c) {
      const auto slot = static_cast<Eigen::Index>(elites + c);
      if (c < crossovers) {
        const auto a = static_cast<Eigen::Index>(tournament_select(fit, ga.tournament_size, rng));
        const auto b = static_cast<Eigen::Index>(tournament_select(fit, ga.tournament_size, rng));
        next.col(slot) = crossover(pop.col(a), pop.col(b), rng);
      } else {
        const auto p = static_cast<Eigen::Index>(tournament_select(fit, ga.tournament_size, rng));
        next.col(slot) = gaussian_mutate(pop.col(p), layout, std::max(mutation_std, 1e-300), rng);
      }
    }
    pop = std::move(next);
    scored = std::move(next_scored);
    evaluate_columns(pop, static_cast<Eigen::Index>(elites), problem, ga, scored, observe);
    log.evaluations += children;
  }

  log.feasible_found = incumbent_ok;
  if (!incumbent_ok) {
    log.diagnostic = "no individual met the power and SINR constraints; returning best penalized";
  }

  result.solution = decode(incumbent, layout);
  const RealVector<double> terms = objective_terms(problem, result.solution);
  if (ga.eta_mode == EtaMode::derived) {
    result.solution.eta = terms.size() > 0 ? terms.minCoeff() : 0.0;
  } else if (terms.size() > 0) {
    result.solution.eta = std::min(result.solution.eta, terms.minCoeff());
  }
  result.report = evaluate_fitness(encode(result.solution, layout), problem, ga.penalty_weights,
                                   EtaMode::gene, tol);
  return result;
}

GaResult run_ga(const ScenarioInstance& scenario, const ChannelSet<double>& channels, const GaConfig& ga) {
  return run_ga(make_problem(scenario, channels), ga);
}

}  // namespace hapsisac
