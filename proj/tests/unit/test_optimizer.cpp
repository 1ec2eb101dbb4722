#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "enes/benchmarks.hpp"
#include "enes/errors.hpp"
#include "enes/optimizer.hpp"

namespace enes {
namespace {

Objective sphere_at(const Eigen::VectorXd& centre) {
  return {static_cast<int>(centre.size()),
          [centre](const Eigen::VectorXd& z) { return -(z - centre).squaredNorm(); }};
}

RunConfig config_at(const Eigen::VectorXd& mean, int n, std::uint64_t seed) {
  RunConfig config;
  config.initial_mean = mean;
  config.population_size = n;
  config.seed = seed;
  return config;
}

TEST(Initialize, DefaultsToIdentityFactor) {
  auto calls = std::make_shared<int>(0);
  Objective obj{3, [calls](const Eigen::VectorXd& z) {
                  ++*calls;
                  return -z.squaredNorm();
                }};
  RunState state(config_at(Eigen::VectorXd::Zero(3), 50, 1), obj);
  EXPECT_EQ(state.distribution().chol(), Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(state.evaluations(), 50u);
  EXPECT_EQ(*calls, 50);
  EXPECT_EQ(state.generation(), 0);
  EXPECT_EQ(state.population().size(), 50u);
  ASSERT_EQ(state.log().size(), 1u);
  EXPECT_EQ(state.log()[0].fresh, 50u);
}

TEST(Initialize, SameSeedSamePopulation) {
  const auto cfg = config_at(Eigen::VectorXd::Constant(4, 2.0), 20, 77);
  RunState a(cfg, sphere_at(Eigen::VectorXd::Zero(4)));
  RunState b(cfg, sphere_at(Eigen::VectorXd::Zero(4)));
  EXPECT_EQ(a.population().samples, b.population().samples);
  EXPECT_EQ(a.population().fitness, b.population().fitness);
}

TEST(Initialize, RejectsInvalidConfig) {
  auto cfg = config_at(Eigen::VectorXd::Zero(2), 10, 0);
  cfg.initial_chol = Eigen::MatrixXd::Identity(2, 2);
  cfg.initial_chol(1, 1) = 0.0;
  EXPECT_THROW(RunState(cfg, sphere_at(Eigen::VectorXd::Zero(2))), ConfigError);

  EXPECT_THROW(RunState(config_at(Eigen::VectorXd::Zero(2), 10, 0), sphere_at(Eigen::VectorXd::Zero(3))),
               ConfigError);
  EXPECT_THROW(RunState(config_at(Eigen::VectorXd::Zero(2), 1, 0), sphere_at(Eigen::VectorXd::Zero(2))),
               ConfigError);
  auto bad_eta = config_at(Eigen::VectorXd::Zero(2), 10, 0);
  bad_eta.learning_rate = 0.0;
  EXPECT_THROW(RunState(bad_eta, sphere_at(Eigen::VectorXd::Zero(2))), ConfigError);
  auto bad_alpha = config_at(Eigen::VectorXd::Zero(2), 10, 0);
  bad_alpha.refresh_rate = 1.5;
  EXPECT_THROW(RunState(bad_alpha, sphere_at(Eigen::VectorXd::Zero(2))), ConfigError);
}

TEST(Step, ConstantObjectiveLeavesDistributionUnchanged) {
  auto cfg = config_at(Eigen::VectorXd::Constant(3, 0.5), 10, 3);
  RunState state(cfg, Objective{3, [](const Eigen::VectorXd&) { return 0.0; }});
  const SearchDistribution start = state.distribution();
  for (int g = 0; g < 20; ++g) state.step();
  EXPECT_TRUE(state.distribution() == start);
}

TEST(Step, EvaluationAccounting) {
  auto calls = std::make_shared<std::uint64_t>(0);
  Objective obj{4, [calls](const Eigen::VectorXd& z) {
                  ++*calls;
                  return -z.squaredNorm();
                }};
  auto cfg = config_at(Eigen::VectorXd::Constant(4, 3.0), 30, 5);
  cfg.max_evaluations = 5000;
  const RunResult result = run(cfg, obj);
  EXPECT_EQ(result.evaluations, *calls);
  std::uint64_t total = 0;
  for (std::size_t g = 0; g < result.log.size(); ++g) {
    total += result.log[g].fresh;
    EXPECT_EQ(result.log[g].evaluations, total);
  }
  EXPECT_EQ(total, *calls);
  // Generation 1 reuses the initial population untouched.
  ASSERT_GT(result.log.size(), 2u);
  EXPECT_EQ(result.log[1].fresh, 0u);
}

TEST(Step, NanFitnessIsAttributed) {
  Objective nan_first{2, [](const Eigen::VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); }};
  try {
    RunState(config_at(Eigen::VectorXd::Zero(2), 5, 0), nan_first);
    FAIL() << "expected InvalidFitness";
  } catch (const InvalidFitness& e) {
    EXPECT_EQ(e.index(), 0u);
  }

  auto calls = std::make_shared<int>(0);
  Objective nan_later{2, [calls](const Eigen::VectorXd& z) {
                        return ++*calls > 12 ? std::numeric_limits<double>::quiet_NaN()
                                             : -z.squaredNorm();
                      }};
  auto cfg = config_at(Eigen::VectorXd::Zero(2), 10, 0);
  cfg.refresh_rate = 1.0;
  RunState state(cfg, nan_later);
  state.step();
  EXPECT_THROW(state.step(), InvalidFitness);
}

TEST(Run, TargetMetByInitialSample) {
  auto cfg = config_at(Eigen::VectorXd::Zero(2), 10, 0);
  cfg.target_fitness = -1e300;
  const RunResult result = run(cfg, sphere_at(Eigen::VectorXd::Ones(2)));
  EXPECT_EQ(result.termination, Termination::target_reached);
  EXPECT_EQ(result.log.size(), 1u);
  EXPECT_EQ(result.log.back().generation, 0);
  EXPECT_EQ(result.evaluations_to_target, std::optional<std::uint64_t>(1));
}

TEST(Run, BudgetOfOneGeneration) {
  auto cfg = config_at(Eigen::VectorXd::Zero(3), 12, 0);
  cfg.max_evaluations = 12;
  const RunResult result = run(cfg, sphere_at(Eigen::VectorXd::Ones(3)));
  EXPECT_EQ(result.termination, Termination::evaluation_budget);
  EXPECT_EQ(result.evaluations, 12u);
  EXPECT_EQ(result.log.size(), 1u);
}

TEST(Run, Deterministic) {
  auto cfg = config_at(Eigen::VectorXd::Constant(3, 1.5), 20, 99);
  cfg.max_evaluations = 3000;
  const RunResult a = run(cfg, sphere_at(Eigen::VectorXd::Zero(3)));
  const RunResult b = run(cfg, sphere_at(Eigen::VectorXd::Zero(3)));
  EXPECT_TRUE(a.distribution == b.distribution);
  EXPECT_EQ(a.best_individual, b.best_individual);
  EXPECT_EQ(a.best_fitness, b.best_fitness);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t g = 0; g < a.log.size(); ++g) {
    EXPECT_EQ(a.log[g].best_fitness, b.log[g].best_fitness);
    EXPECT_EQ(a.log[g].mean, b.log[g].mean);
    EXPECT_EQ(a.log[g].baselines, b.log[g].baselines);
  }
}

TEST(Run, BestFitnessNonDecreasing) {
  int monotone = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cfg = config_at(Eigen::VectorXd::Constant(2, 3.0), 50, seed);
    RunState state(cfg, sphere_at(Eigen::VectorXd::Zero(2)));
    bool ok = true;
    double prev = state.best_fitness();
    for (int g = 0; g < 50; ++g) {
      const double best = state.step().best_fitness;
      ok &= best >= prev;
      prev = best;
    }
    monotone += ok;
  }
  EXPECT_GE(monotone, 19);
}

TEST(Run, SphereConverges) {
  int reached = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto problem = make_problem(FunctionId::Sphere, 5, seed);
    auto cfg = config_at(initial_guess(problem, 1.0, derive_seed(seed, 2)), 50, seed);
    cfg.target_fitness = -1e-10;
    cfg.max_evaluations = 100000;
    const RunResult result = run(cfg, make_objective(problem));
    if (result.termination == Termination::target_reached) {
      ++reached;
      EXPECT_GE(result.best_fitness, cfg.target_fitness);
      EXPECT_LE(*result.evaluations_to_target, result.evaluations);
    }
  }
  EXPECT_GE(reached, 19);
}

TEST(Run, TranslationEquivarianceIsBitExact) {
  // Mean, optimum and samples stay in [1024, 2048) so shifting by 256 is exact.
  const Eigen::VectorXd centre = Eigen::VectorXd::Constant(2, 1300.0);
  const Eigen::VectorXd shift = Eigen::VectorXd::Constant(2, 256.0);
  auto base = config_at(Eigen::VectorXd::Constant(2, 1297.0), 20, 4);
  auto moved = base;
  moved.initial_mean = base.initial_mean + shift;
  Objective f = sphere_at(centre);
  Objective g{2, [f, shift](const Eigen::VectorXd& z) { return f(z - shift); }};
  RunState a(base, f);
  RunState b(moved, g);
  for (int gen = 0; gen < 40; ++gen) {
    a.step();
    b.step();
    ASSERT_EQ(a.best_fitness(), b.best_fitness()) << gen;
    ASSERT_EQ(a.population().fitness, b.population().fitness) << gen;
    ASSERT_EQ(a.distribution().mean() + shift, b.distribution().mean()) << gen;
    ASSERT_EQ(a.distribution().chol(), b.distribution().chol()) << gen;
  }
}

TEST(Run, MonotoneTransformLeavesSamplesUnchanged) {
  const Eigen::VectorXd centre = Eigen::VectorXd::Constant(3, 1.0);
  Objective f = sphere_at(centre);
  Objective g{3, [f](const Eigen::VectorXd& z) {
                const double v = f(z);
                return v * v * v + v;
              }};
  const auto cfg = config_at(Eigen::VectorXd::Zero(3), 15, 8);
  RunState a(cfg, f);
  RunState b(cfg, g);
  for (int gen = 0; gen < 60; ++gen) {
    a.step();
    b.step();
    ASSERT_EQ(a.population().samples, b.population().samples) << gen;
    ASSERT_TRUE(a.distribution() == b.distribution()) << gen;
  }
}

TEST(Run, TerminationConsistentWithLog) {
  auto cfg = config_at(Eigen::VectorXd::Constant(2, 2.0), 20, 12);
  cfg.target_fitness = -1e-6;
  const RunResult result = run(cfg, sphere_at(Eigen::VectorXd::Zero(2)));
  ASSERT_EQ(result.termination, Termination::target_reached);
  EXPECT_GE(result.log.back().best_fitness, cfg.target_fitness);
  EXPECT_GE(result.best_fitness, cfg.target_fitness);
}

TEST(Run, StagnationStopsFlatObjective) {
  auto cfg = config_at(Eigen::VectorXd::Zero(2), 10, 2);
  cfg.max_evaluations = 1000000;
  const RunResult result = run(cfg, Objective{2, [](const Eigen::VectorXd&) { return 1.0; }});
  EXPECT_EQ(result.termination, Termination::stagnation);
  EXPECT_EQ(result.log.back().generation, kStagnationGenerations);
}

TEST(Run, StepNormalizationParse) {
  EXPECT_EQ(parse_step_normalization("population"), StepNormalization::population);
  EXPECT_EQ(parse_step_normalization("utility"), StepNormalization::utility);
  EXPECT_THROW(parse_step_normalization("sum"), ConfigError);
}

}  // namespace
}  // namespace enes
