#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "enes/distribution.hpp"
#include "enes/gradient.hpp"
#include "enes/mixing.hpp"
#include "enes/population.hpp"
#include "enes/rng.hpp"

namespace enes {

/// Fitness function to be maximized.
struct Objective {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> fn;

  double operator()(const Eigen::VectorXd& z) const { return fn(z); }
};

/// Generations without an improvement larger than kStagnationTolerance
/// before a run stops with Termination::stagnation.
inline constexpr int kStagnationGenerations = 200;
inline constexpr double kStagnationTolerance = 1e-12;

/// Scale applied to natural_gradient_step's δθ (which averages over n).
///
/// population: δθ as is.
/// utility:    δθ · n / Σf̂, i.e. the sum over samples is divided by the total
///             shaped utility. Falls back to population when Σf̂ <= 0.
enum class StepNormalization { population, utility };

std::string_view to_string(StepNormalization mode);
StepNormalization parse_step_normalization(std::string_view name);

struct RunConfig {
  int population_size = 50;
  double learning_rate = 1.0;
  double refresh_rate = kDefaultRefreshRate;
  BaselineMode baseline_mode = BaselineMode::block;
  StepNormalization step_normalization = StepNormalization::population;
  /// FimPath::recurrence turns a FIM breakdown into Termination::numerical_breakdown.
  FimPath fim_path = FimPath::automatic;
  /// Stop once the best raw fitness is >= this value.
  double target_fitness = std::numeric_limits<double>::infinity();
  std::uint64_t max_evaluations = 100000;
  std::uint64_t seed = 0;
  Eigen::VectorXd initial_mean;
  /// Defaults to the identity when empty.
  Eigen::MatrixXd initial_chol;
  /// Defaults to shape_fitness when empty.
  ShapingFunction shaping;

  int dim() const { return static_cast<int>(initial_mean.size()); }
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

enum class Termination { running, target_reached, evaluation_budget, stagnation, numerical_breakdown };

std::string_view to_string(Termination reason);

struct GenerationLog {
  int generation = 0;
  std::uint64_t evaluations = 0;  // cumulative
  double best_fitness = -std::numeric_limits<double>::infinity();  // best ever
  double generation_best = -std::numeric_limits<double>::infinity();
  std::size_t fresh = 0;  // n - n_a
  Eigen::VectorXd baselines;
  Eigen::VectorXd mean;
  Eigen::VectorXd chol_diagonal;
  bool conformance_warning = false;
  bool clamped = false;
  bool degenerate = false;
  FimPath fim_path = FimPath::recurrence;
};

/// One optimizer run. Owned and stepped by a single thread.
class RunState {
 public:
  /// Samples and evaluates the initial population (generation 0).
  /// Throws ConfigError on invalid config or an objective of another dimension.
  RunState(RunConfig config, Objective objective);

  /// One generation: precision matrix, importance mixing, evaluation of the
  /// fresh individuals, shaping, natural gradient, parameter update.
  /// With FimPath::recurrence a FIM breakdown ends the run with
  /// Termination::numerical_breakdown. If every raw fitness in the population
  /// is equal, θ is left unchanged.
  /// Throws InvalidFitness if the objective returns NaN.
  const GenerationLog& step();

  /// Termination::running unless a stopping rule applies.
  Termination check_termination();

  const RunConfig& config() const { return config_; }
  const SearchDistribution& distribution() const { return dist_; }
  const Population& population() const { return population_; }
  const std::vector<GenerationLog>& log() const { return log_; }
  int generation() const { return generation_; }
  std::uint64_t evaluations() const { return evaluations_; }
  double best_fitness() const { return best_fitness_; }
  const Eigen::VectorXd& best_individual() const { return best_z_; }
  /// Cumulative evaluations when the target was first reached.
  std::optional<std::uint64_t> evaluations_to_target() const { return evaluations_to_target_; }
  Termination termination() const { return termination_; }

 private:
  double evaluate(const Eigen::VectorXd& z, std::size_t index);
  void record(std::size_t fresh, const NaturalGradient* grad, bool warning, bool clamped);

  RunConfig config_;
  Objective objective_;
  ThetaLayout layout_;
  Rng rng_;
  SearchDistribution dist_;
  SearchDistribution population_dist_;
  bool population_current_ = true;
  Population population_;

  int generation_ = 0;
  std::uint64_t evaluations_ = 0;
  double best_fitness_ = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z_;
  double stagnation_reference_ = -std::numeric_limits<double>::infinity();
  int stagnant_generations_ = 0;
  std::optional<std::uint64_t> evaluations_to_target_;
  Termination termination_ = Termination::running;
  std::vector<GenerationLog> log_;
};

struct RunResult {
  Termination termination = Termination::running;
  SearchDistribution distribution;
  Eigen::VectorXd best_individual;
  double best_fitness = -std::numeric_limits<double>::infinity();
  std::uint64_t evaluations = 0;
  std::optional<std::uint64_t> evaluations_to_target;
  std::vector<GenerationLog> log;
};

RunState initialize(const RunConfig& config, Objective objective);
const GenerationLog& step(RunState& state);

/// Steps until the target is reached, the evaluation budget is spent, the
/// best fitness stagnates or the FIM inverse breaks down.
RunResult run(const RunConfig& config, Objective objective);

}  // namespace enes
