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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "hapsisac/ga.hpp"

using namespace hapsisac;
using doctest::Approx;
using cd = std::complex<double>;

namespace {

ComplexMatrix<double> random_matrix(int rows, int cols, RngStream& rng, double scale) {
  ComplexMatrix<double> m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = scale * rng.complex_normal();
  }
  return m;
}

// Sensing-only problem toward one direction: optimum zeta* = P S.
Problem<double> single_target(int s_w, int s_l, double p_max, double theta = 0.01, double phi = 0.3) {
  Problem<double> p;
  p.h.resize(s_w * s_l, 0);
  p.sigma2.resize(0);
  p.targets = steering_vector(theta, phi, s_w, s_l);
  p.p_max = p_max;
  return p;
}

Problem<double> sampled(int k, int j, int s, std::uint64_t seed, double sinr_th_db = 10.0) {
  ScenarioConfig cfg;
  cfg.k = k;
  cfg.j = j;
  cfg.s_w = s;
  cfg.s_l = s;
  cfg.seed = seed;
  cfg.sinr_th_db = sinr_th_db;
  const auto sc = sample_scenario(cfg);
  return make_problem(sc, build_channels(sc));
}

GaConfig small_ga(std::uint64_t seed, int population = 60, int generations = 40) {
  GaConfig ga;
  ga.population = population;
  ga.generations = generations;
  ga.seed = seed;
  ga.threads = 1;
  return ga;
}

}  // namespace

TEST_CASE("chromosome layout") {
  const auto p = sampled(1, 1, 2, 1);
  const GeneLayout layout = GeneLayout::of(p);
  CHECK(layout.size() == 2 * 4 * 2 + 1);

  const auto zero = encode(BeamformerSet<double>::zero(4, 1, 1), layout);
  CHECK(zero.size() == 17);
  CHECK(zero.isZero(0.0));

  BeamformerSet<double> bf = BeamformerSet<double>::zero(4, 1, 1);
  bf.comm(2, 0) = cd(1.5, -2.5);
  bf.sensing(1, 0) = cd(0.25, 0.75);
  bf.eta = 0.5 * layout.eta_scale;
  const auto g = encode(bf, layout);
  CHECK(g[4] == 1.5);
  CHECK(g[5] == -2.5);
  CHECK(g[8 + 2] == 0.25);
  CHECK(g[8 + 3] == 0.75);
  CHECK(g[16] == 0.5);

  CHECK_THROWS_AS(decode(Chromosome::Zero(16), layout), std::invalid_argument);
  CHECK_THROWS_AS(encode(BeamformerSet<double>::zero(4, 2, 1), layout), std::invalid_argument);
}

TEST_CASE("encode/decode round trip") {
  RngStream rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int s = 1 + int(rng.index(8));
    const int k = int(rng.index(4));
    const int j = 1 + int(rng.index(3));
    const auto p = sampled(k, j, 1, 1 + trial);
    Problem<double> q = p;
    q.h = random_matrix(s, k, rng, 1.0);
    q.targets = random_matrix(s, j, rng, 1.0);
    const GeneLayout layout = GeneLayout::of(q);
    BeamformerSet<double> bf{random_matrix(s, k, rng, 3.0), random_matrix(s, j, rng, 3.0),
                             rng.uniform() * layout.eta_scale};
    const auto back = decode(encode(bf, layout), layout);
    CHECK((back.comm - bf.comm).cwiseAbs().sum() <= 1e-12);
    CHECK((back.sensing - bf.sensing).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(back.eta - bf.eta) <= 1e-12 * layout.eta_scale);
  }
}

TEST_CASE("fitness of a feasible chromosome equals eta") {
  const auto p = single_target(2, 2, 2.0);
  BeamformerSet<double> bf = BeamformerSet<double>::zero(4, 0, 1);
  bf.sensing.col(0) = 0.9 * std::sqrt(p.p_max / 4) * p.targets.col(0);
  bf.eta = 0.5 * beampattern_gain(p.targets.col(0), bf);
  const auto rep = evaluate_fitness(encode(bf, p), p, PenaltyWeights{});
  CHECK(rep.feasible);
  CHECK(rep.fitness == rep.eta);
  CHECK(rep.eta == Approx(bf.eta).epsilon(1e-14));

  // With a CU and a reachable threshold as well.
  Problem<double> q = single_target(2, 2, 2.0);
  q.h = q.targets;
  q.sigma2 = RealVector<double>::Constant(1, 1e-3);
  q.sinr_th_db = 0.0;
  BeamformerSet<double> b2 = BeamformerSet<double>::zero(4, 1, 1);
  b2.comm.col(0) = 0.5 * q.targets.col(0);
  b2.sensing.col(0) = 0.05 * q.targets.col(0);
  b2.eta = 0.25 * beampattern_gain(q.targets.col(0), b2);
  const auto r2 = evaluate_fitness(encode(b2, q), q, PenaltyWeights{});
  CHECK(r2.feasible);
  CHECK(r2.fitness == r2.eta);
}

TEST_CASE("fitness of zero beamformers with maximal eta") {
  const auto p = single_target(2, 2, 1.0);
  Chromosome g = Chromosome::Zero(GeneLayout::of(p).size());
  g[g.size() - 1] = 1.0;
  const auto rep = evaluate_fitness(g, p, PenaltyWeights{});
  // eta = scale, eta residual = scale: scale - scale * 1000.
  const double scale = p.objective_scale();
  CHECK(rep.fitness == Approx(scale - 1e3 * scale));
  CHECK(rep.fitness < 0);
  CHECK_FALSE(rep.feasible);

  const auto q = sampled(2, 2, 2, 3);
  Chromosome h = Chromosome::Zero(GeneLayout::of(q).size());
  h[h.size() - 1] = 1.0;
  const auto r2 = evaluate_fitness(h, q, PenaltyWeights{});
  const double s2 = q.objective_scale();
  CHECK(std::isfinite(r2.fitness));
  CHECK(r2.fitness == Approx(s2 - s2 * (2 * 1e2 * kSinrResidualCap + 1e3 * 2 * s2 / s2)));
}

TEST_CASE("one percent power violation costs mu_power * 0.01 * P S") {
  const auto p = single_target(2, 2, 3.0);
  BeamformerSet<double> at_limit = BeamformerSet<double>::zero(4, 0, 1);
  at_limit.sensing.col(0) = p.targets.col(0).normalized() * std::sqrt(p.p_max);
  BeamformerSet<double> over = at_limit;
  over.sensing *= std::sqrt(1.01);
  const PenaltyWeights w;
  const auto a = evaluate_fitness(encode(at_limit, p), p, w);
  const auto b = evaluate_fitness(encode(over, p), p, w);
  CHECK(a.fitness - b.fitness == Approx(w.power * 0.01 * p.p_max * 4).epsilon(1e-9));
}

TEST_CASE("fitness over the eta gene peaks at min zeta") {
  RngStream rng(4);
  const auto p = sampled(1, 3, 2, 9, -50.0);
  const GeneLayout layout = GeneLayout::of(p);
  BeamformerSet<double> bf{random_matrix(4, 1, rng, 0.1 * layout.beam_bound),
                           random_matrix(4, 3, rng, 0.1 * layout.beam_bound), 0.0};
  const double min_zeta = beampattern_gains(p.targets, bf).minCoeff();
  Chromosome g = encode(bf, layout);
  const double peak_gene = min_zeta / layout.eta_scale;
  g[layout.eta_index()] = peak_gene;
  const double peak = evaluate_fitness(g, p, PenaltyWeights{}).fitness;
  CHECK(peak == Approx(min_zeta));
  for (int i = 0; i <= 1000; ++i) {
    g[layout.eta_index()] = i / 1000.0;
    CHECK(evaluate_fitness(g, p, PenaltyWeights{}).fitness <= peak + 1e-12 * layout.eta_scale);
  }
}

TEST_CASE("derived eta mode") {
  RngStream rng(5);
  const auto p = sampled(0, 3, 2, 2);
  const GeneLayout layout = GeneLayout::of(p);
  BeamformerSet<double> bf{ComplexMatrix<double>(4, 0), random_matrix(4, 3, rng, 0.2 * layout.beam_bound), 0.9 * layout.eta_scale};
  const auto rep = evaluate_fitness(encode(bf, layout), p, PenaltyWeights{}, EtaMode::derived);
  CHECK(rep.eta == Approx(beampattern_gains(p.targets, bf).minCoeff()));
  CHECK(rep.fitness == rep.eta);
}

TEST_CASE("initial population") {
  const auto p = sampled(2, 2, 2, 1);
  const GeneLayout layout = GeneLayout::of(p);
  GaConfig ga;
  RngStream r1(10), r2(10);
  const Population a = initialize_population(layout, ga, r1);
  const Population b = initialize_population(layout, ga, r2);
  CHECK(a == b);
  CHECK(a.cols() == ga.population);
  CHECK(GaConfig{}.population == 200);
  double mean_power = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index g = 0; g < a.rows(); ++g) {
      CHECK(a(g, c) >= layout.lower(g));
      CHECK(a(g, c) <= layout.upper(g));
    }
    mean_power += total_power(decode(a.col(c), layout));
  }
  mean_power /= double(a.cols());
  CHECK(mean_power == Approx(0.5 * p.p_max).epsilon(0.05));
}

TEST_CASE("tournament selection") {
  SUBCASE("population-sized tournament") {
    const std::vector<double> fit{0.3, -1.0, 2.5, 0.7, 2.4};
    RngStream rng(1);
    // Draws are with replacement: P(best drawn) = 1 - (4/5)^5.
    const int trials = 100000;
    int best = 0;
    for (int i = 0; i < trials; ++i) best += tournament_select(fit, 5, rng) == 2 ? 1 : 0;
    CHECK(std::abs(double(best) / trials - (1 - std::pow(0.8, 5))) < 0.006);
    for (int i = 0; i < 100; ++i) CHECK(tournament_select(fit, 400, rng) == 2);
  }
  SUBCASE("binary tournament picks the better of two with probability 3/4") {
    const std::vector<double> fit{1.0, 0.0};
    RngStream rng(2);
    const int trials = 100000;
    int wins = 0;
    for (int i = 0; i < trials; ++i) wins += tournament_select(fit, 2, rng) == 0 ? 1 : 0;
    CHECK(std::abs(double(wins) / trials - 0.75) < 0.005);
  }
  SUBCASE("deterministic per stream state") {
    const std::vector<double> fit{0.1, 0.5, 0.2, 0.9, 0.4, 0.3};
    RngStream a(3), b(3);
    for (int i = 0; i < 100; ++i) CHECK(tournament_select(fit, 2, a) == tournament_select(fit, 2, b));
  }
}

TEST_CASE("uniform crossover") {
  RngStream rng(4);
  const Chromosome a = Chromosome::LinSpaced(33, 0.0, 1.0);
  const Chromosome b = Chromosome::LinSpaced(33, 2.0, 3.0);
  CHECK(crossover(a, a, rng) == a);

  std::vector<int> from_a(33, 0);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const Chromosome c = crossover(a, b, rng);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const bool is_a = c[i] == a[i];
      CHECK((is_a || c[i] == b[i]));
      from_a[static_cast<std::size_t>(i)] += is_a ? 1 : 0;
    }
  }
  for (int n : from_a) CHECK(std::abs(double(n) / trials - 0.5) < 0.02);
  CHECK_THROWS_AS(crossover(a, Chromosome::Zero(3), rng), std::invalid_argument);
}

TEST_CASE("gaussian mutation") {
  const auto p = single_target(2, 2, 4.0);
  const GeneLayout layout = GeneLayout::of(p);
  RngStream rng(5);
  const Chromosome interior = Chromosome::Constant(layout.size(), 0.1);

  const Chromosome same = gaussian_mutate(interior, layout, 1e-15, rng);
  CHECK((same - interior).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(gaussian_mutate(interior, layout, 0.0, rng), std::invalid_argument);

  const int trials = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(layout.size()), sum2 = sum;
  const Chromosome edge = Chromosome::Constant(layout.size(), layout.beam_bound);
  for (int t = 0; t < trials; ++t) {
    const Chromosome m = gaussian_mutate(interior, layout, 0.02, rng);
    sum += m - interior;
    sum2 += (m - interior).cwiseAbs2();
    const Chromosome e = gaussian_mutate(edge, layout, 0.5, rng);
    for (Eigen::Index g = 0; g < e.size(); ++g) {
      CHECK(e[g] >= layout.lower(g));
      CHECK(e[g] <= layout.upper(g));
    }
  }
  for (Eigen::Index g = 0; g < layout.size(); ++g) {
    const double width = layout.upper(g) - layout.lower(g);
    const double sd = std::sqrt(sum2[g] / trials - std::pow(sum[g] / trials, 2));
    CHECK(sd == Approx(0.02 * width).epsilon(0.02));
  }
}

TEST_CASE("run_ga reaches the single-target optimum") {
  const auto p = single_target(2, 2, 1.0);
  GaConfig ga;  // population 200, 300 generations
  ga.seed = 17;
  ga.threads = 1;
  const auto r = run_ga(p, ga);
  const double zeta = beampattern_gain(p.targets.col(0), r.solution);
  CHECK(r.log.records.size() <= 300);
  CHECK(zeta >= 0.95 * 4.0);
  CHECK(zeta <= 4.0 * (1 + 1e-6));
  CHECK(r.log.feasible_found);
  CHECK(r.report.residuals.power <= 1e-6 * p.p_max);
  CHECK(r.solution.eta <= zeta);

  // Random search over the power ball never beats P S.
  RngStream rng(3);
  double best = 0;
  for (int i = 0; i < 1000000; ++i) {
    Eigen::Vector4cd x;
    for (int s = 0; s < 4; ++s) x[s] = rng.complex_normal();
    x *= std::sqrt(rng.uniform()) / x.norm();
    best = std::max(best, std::norm(p.targets.col(0).dot(x)));
  }
  CHECK(best <= 4.0);
  CHECK(best > 3.8);
}

TEST_CASE("run_ga invariants") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p = sampled(2, 3, 2, seed);
    GaConfig ga = small_ga(seed);
    const auto r = run_ga(p, ga);
    const auto& rec = r.log.records;
    for (std::size_t g = 1; g < rec.size(); ++g) CHECK(rec[g].best_fitness >= rec[g - 1].best_fitness);
    const RealVector<double> zeta = beampattern_gains(p.targets, r.solution);
    CHECK(r.solution.eta <= zeta.minCoeff());
    CHECK(r.solution.eta <= p.objective_scale());
    if (r.log.feasible_found) {
      CHECK(r.report.residuals.power <= 1e-6 * p.p_max);
      CHECK(r.log.diagnostic.empty());
    }
    CHECK(r.log.evaluations ==
          std::size_t(ga.population) + (rec.size() - 1) * std::size_t(ga.population - ga.elite_count));
  }
}

TEST_CASE("run_ga is deterministic across thread counts") {
  const auto p = sampled(2, 2, 2, 5);
  GaConfig ga = small_ga(8, 50, 25);
  const auto a = run_ga(p, ga);
  ga.threads = 3;
  const auto b = run_ga(p, ga);
  REQUIRE(a.log.records.size() == b.log.records.size());
  for (std::size_t i = 0; i < a.log.records.size(); ++i) {
    CHECK(a.log.records[i].best_fitness == b.log.records[i].best_fitness);
    CHECK(a.log.records[i].mean_fitness == b.log.records[i].mean_fitness);
    CHECK(a.log.records[i].best_eta == b.log.records[i].best_eta);
    CHECK(a.log.records[i].feasible_count == b.log.records[i].feasible_count);
  }
  CHECK(a.solution.comm == b.solution.comm);
  CHECK(a.solution.sensing == b.solution.sensing);
}

TEST_CASE("stall termination") {
  const auto p = single_target(2, 2, 1.0);
  GaConfig ga = small_ga(4, 100, 3000);
  ga.stall_generations = 50;
  const auto r = run_ga(p, ga);
  REQUIRE(r.log.stop == StopReason::stall);
  const auto& rec = r.log.records;
  CHECK(rec.size() < 3000);
  CHECK(rec.back().best_fitness - rec[rec.size() - 51].best_fitness < ga.function_tolerance);

  ga.stall_generations = 0;
  ga.generations = 40;
  CHECK(run_ga(p, ga).log.records.size() == 40);
}

TEST_CASE("unreachable SINR target surfaces a diagnostic") {
  const auto p = sampled(2, 1, 2, 6, 200.0);
  const auto r = run_ga(p, small_ga(6, 30, 10));
  CHECK_FALSE(r.log.feasible_found);
  CHECK_FALSE(r.log.diagnostic.empty());
  CHECK_FALSE(r.report.feasible);
}

TEST_CASE("evaluation count scales with population") {
  const auto p = sampled(1, 1, 2, 7);
  GaConfig ga = small_ga(1, 40, 20);
  ga.stall_generations = 0;
  const auto a = run_ga(p, ga).log.evaluations;
  ga.population = 80;
  const auto b = run_ga(p, ga).log.evaluations;
  CHECK(a == 40 + 19 * 38);
  CHECK(b == 80 + 19 * 78);
  CHECK(double(b) / double(a) == Approx(2.0).epsilon(0.05));
}

TEST_CASE("GaConfig validation") {
  auto with = [](auto mutate) {
    GaConfig g;
    mutate(g);
    return g;
  };
  CHECK_NOTHROW(GaConfig{}.validate());
  CHECK_THROWS_AS(with([](auto& g) { g.population = 1; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with([](auto& g) { g.elite_count = 200; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with([](auto& g) { g.crossover_fraction = 1.2; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with([](auto& g) { g.tournament_size = 1; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with([](auto& g) { g.mutation_std_fraction = 0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(with([](auto& g) { g.generations = 0; }).validate(), std::invalid_argument);
}

TEST_CASE("evaluation observer sees every evaluation") {
  const auto p = sampled(1, 2, 2, 9);
  const GaConfig ga = small_ga(2, 30, 15);
  std::size_t seen = 0;
  bool consistent = true;
  const auto r = run_ga(p, ga, [&](const Eigen::Ref<const Chromosome>& g, const FitnessReport& rep) {
    ++seen;
    consistent = consistent && evaluate_fitness(g, p, ga.penalty_weights).fitness == rep.fitness;
  });
  CHECK(seen == r.log.evaluations);
  CHECK(consistent);
  CHECK(run_ga(p, ga).log.records.back().best_fitness == r.log.records.back().best_fitness);
}
