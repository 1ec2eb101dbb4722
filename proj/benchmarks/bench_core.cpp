#include <string>
#include <vector>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "enes/benchmarks.hpp"
#include "enes/distribution.hpp"
#include "enes/fim.hpp"
#include "enes/gradient.hpp"
#include "enes/mixing.hpp"
#include "enes/optimizer.hpp"
#include "enes/rng.hpp"

namespace {

// Well-conditioned upper-triangular factor with positive diagonal.
Eigen::MatrixXd random_factor(enes::Rng& rng, int d) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int r = 0; r < d; ++r) {
    a(r, r) = 0.5 + rng.uniform();
    for (int c = r + 1; c < d; ++c) a(r, c) = 0.3 * (2.0 * rng.uniform() - 1.0);
  }
  return a;
}

void BM_FimSweep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  enes::Rng rng(1);
  const Eigen::MatrixXd a = random_factor(rng, d);
  const Eigen::MatrixXd cinv = enes::precision_matrix(a);
  for (auto _ : state) {
    enes::FimInverseSweep sweep(a, cinv);
    while (!sweep.done()) benchmark::DoNotOptimize(sweep.next().data());
  }
  state.SetComplexityN(d);
}
BENCHMARK(BM_FimSweep)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_NaturalGradient(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto path = static_cast<enes::FimPath>(state.range(1));
  const int n = 4 + 3 * d;
  enes::Rng rng(2);
  const enes::SearchDistribution dist(Eigen::VectorXd::Zero(d), random_factor(rng, d));
  const enes::ThetaLayout layout(d);
  std::vector<Eigen::VectorXd> samples;
  std::vector<double> fitness;
  for (int i = 0; i < n; ++i) {
    samples.push_back(dist.sample(rng.standard_normal(d)));
    fitness.push_back(-samples.back().squaredNorm());
  }
  const enes::ShapedFitness shaped = enes::shape_fitness(fitness);
  const Eigen::MatrixXd cinv = enes::precision_matrix(dist.chol());
  for (auto _ : state) {
    auto step = enes::natural_gradient_step(dist, cinv, samples, shaped,
                                            enes::BaselineMode::block, layout, path);
    benchmark::DoNotOptimize(step.delta.data());
  }
  state.SetLabel(std::string(enes::to_string(path)));
}
BENCHMARK(BM_NaturalGradient)
    ->ArgsProduct({{5, 10, 20, 40},
                   {static_cast<int>(enes::FimPath::recurrence),
                    static_cast<int>(enes::FimPath::factored)}});

void BM_ImportanceMix(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = 50;
  enes::Rng rng(3);
  const enes::SearchDistribution old_dist(Eigen::VectorXd::Zero(d), random_factor(rng, d));
  Eigen::VectorXd shifted = Eigen::VectorXd::Constant(d, 0.05);
  const enes::SearchDistribution new_dist(shifted, old_dist.chol());
  enes::Population prev;
  for (int i = 0; i < n; ++i) prev.push_back(old_dist.sample(rng.standard_normal(d)), 0.0, false);
  for (auto _ : state) {
    auto mix = enes::importance_mix(prev, old_dist, new_dist, 0.01, rng);
    benchmark::DoNotOptimize(mix.n_a);
  }
}
BENCHMARK(BM_ImportanceMix)->Arg(5)->Arg(20);

void BM_OptimizerStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto problem = enes::make_problem(enes::FunctionId::Sphere, d, 4);
  enes::RunConfig config;
  config.initial_mean = enes::initial_guess(problem, 1.0, 5);
  config.population_size = 4 + 3 * d;
  config.seed = 6;
  enes::RunState run(config, enes::make_objective(problem));
  for (auto _ : state) benchmark::DoNotOptimize(run.step().best_fitness);
}
BENCHMARK(BM_OptimizerStep)->Arg(10)->Arg(20)->Arg(40);

}  // namespace
