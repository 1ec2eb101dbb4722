#include "enes/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "enes/errors.hpp"
#include "enes/fim.hpp"

namespace enes {

void RunConfig::validate() const {
  if (initial_mean.size() < 1) throw ConfigError("initial_mean must be non-empty");
  if (!initial_mean.allFinite()) throw ConfigError("initial_mean must be finite");
  if (population_size < 2) throw ConfigError("population_size must be at least 2");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive and finite");
  }
  if (!(refresh_rate >= 0.0 && refresh_rate <= 1.0)) {
    throw ConfigError("refresh_rate must lie in [0, 1]");
  }
  if (max_evaluations == 0) throw ConfigError("max_evaluations must be positive");
  if (initial_chol.size() != 0) {
    try {
      SearchDistribution check(initial_mean, initial_chol);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("initial_chol: ") + e.what());
    }
  }
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::running: return "running";
    case Termination::target_reached: return "target_reached";
    case Termination::evaluation_budget: return "evaluation_budget";
    case Termination::stagnation: return "stagnation";
    case Termination::numerical_breakdown: return "numerical_breakdown";
  }
  return "running";
}

std::string_view to_string(StepNormalization mode) {
  return mode == StepNormalization::population ? "population" : "utility";
}

StepNormalization parse_step_normalization(std::string_view name) {
  if (name == "population") return StepNormalization::population;
  if (name == "utility") return StepNormalization::utility;
  throw ConfigError("unknown step normalization '" + std::string(name) + "'");
}

namespace {

SearchDistribution initial_distribution(const RunConfig& config) {
  config.validate();
  if (config.initial_chol.size() == 0) return SearchDistribution::isotropic(config.initial_mean);
  return SearchDistribution(config.initial_mean, config.initial_chol);
}

}  // namespace

RunState::RunState(RunConfig config, Objective objective)
    : config_(std::move(config)),
      objective_(std::move(objective)),
      layout_(std::max(1, config_.dim())),
      rng_(config_.seed),
      dist_(initial_distribution(config_)),
      population_dist_(dist_) {
  if (objective_.dim != config_.dim()) {
    throw ConfigError("objective dimension " + std::to_string(objective_.dim) +
                      " does not match initial_mean dimension " +
                      std::to_string(config_.dim()));
  }
  if (!objective_.fn) throw ConfigError("objective has no function");
  if (!config_.shaping) config_.shaping = shape_fitness;

  const auto n = static_cast<std::size_t>(config_.population_size);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd z = dist_.sample(rng_.standard_normal(dist_.dim()));
    const double f = evaluate(z, i);
    population_.push_back(std::move(z), f, false);
  }
  stagnation_reference_ = best_fitness_;
  record(n, nullptr, false, false);
}

double RunState::evaluate(const Eigen::VectorXd& z, std::size_t index) {
  const double f = objective_(z);
  if (std::isnan(f)) {
    throw InvalidFitness(index, "objective returned NaN for individual " + std::to_string(index) +
                                    " in generation " + std::to_string(generation_));
  }
  ++evaluations_;
  if (f > best_fitness_ || best_z_.size() == 0) {
    best_fitness_ = f;
    best_z_ = z;
  }
  if (!evaluations_to_target_ && f >= config_.target_fitness) {
    evaluations_to_target_ = evaluations_;
  }
  return f;
}

void RunState::record(std::size_t fresh, const NaturalGradient* grad, bool warning, bool clamped) {
  GenerationLog entry;
  entry.generation = generation_;
  entry.evaluations = evaluations_;
  entry.best_fitness = best_fitness_;
  for (double f : population_.fitness) entry.generation_best = std::max(entry.generation_best, f);
  entry.fresh = fresh;
  if (grad != nullptr) {
    entry.baselines = grad->baselines;
    entry.degenerate = grad->degenerate;
    entry.fim_path = grad->path_used;
  }
  entry.mean = dist_.mean();
  entry.chol_diagonal = dist_.chol().diagonal();
  entry.conformance_warning = warning;
  entry.clamped = clamped;
  log_.push_back(std::move(entry));
}

const GenerationLog& RunState::step() {
  if (termination_ == Termination::numerical_breakdown) {
    throw InvalidArgument("step: the run has broken down");
  }

  Eigen::MatrixXd cinv;
  if (config_.fim_path != FimPath::factored) {
    try {
      cinv = precision_matrix(dist_.chol());
    } catch (const SingularFactor&) {
      if (config_.fim_path == FimPath::recurrence) {
        termination_ = Termination::numerical_breakdown;
        ++generation_;
        record(0, nullptr, false, false);
        return log_.back();
      }
    }
  }
  const FimPath path = cinv.size() == 0 ? FimPath::factored : config_.fim_path;

  std::size_t fresh_count = 0;
  bool warning = false;
  if (!population_current_) {
    MixingResult mixed =
        importance_mix(population_, population_dist_, dist_, config_.refresh_rate, rng_);
    warning = mixed.conformance_warning;
    fresh_count = mixed.fresh.size();
    Population next = std::move(mixed.retained);
    for (auto& z : mixed.fresh) {
      const double f = evaluate(z, next.size());
      next.push_back(std::move(z), f, false);
    }
    population_ = std::move(next);
    population_dist_ = dist_;
    population_current_ = true;
  }

  // All raw fitnesses equal: no update.
  const auto& raw = population_.fitness;
  if (std::adjacent_find(raw.begin(), raw.end(), std::not_equal_to<>()) == raw.end()) {
    NaturalGradient null_step;
    null_step.delta = Eigen::VectorXd::Zero(layout_.size());
    null_step.path_used = path;
    population_current_ = false;
    ++generation_;
    ++stagnant_generations_;
    record(fresh_count, &null_step, warning, false);
    return log_.back();
  }

  const ShapedFitness shaped = config_.shaping(population_.fitness);

  NaturalGradient grad;
  try {
    grad = natural_gradient_step(dist_, cinv, population_.samples, shaped, config_.baseline_mode,
                                 layout_, path);
  } catch (const NumericalBreakdown&) {
    termination_ = Termination::numerical_breakdown;
    ++generation_;
    record(fresh_count, nullptr, warning, false);
    return log_.back();
  }

  double scale = config_.learning_rate;
  if (config_.step_normalization == StepNormalization::utility) {
    const double total = shaped.values.sum();
    if (total > 0.0) scale *= static_cast<double>(shaped.values.size()) / total;
  }
  ThetaUpdate update = theta_apply_update(dist_, scale * grad.delta, layout_);
  dist_ = std::move(update.dist);
  population_current_ = false;
  ++generation_;

  if (best_fitness_ > stagnation_reference_ + kStagnationTolerance) {
    stagnation_reference_ = best_fitness_;
    stagnant_generations_ = 0;
  } else {
    ++stagnant_generations_;
  }

  record(fresh_count, &grad, warning, update.clamped);
  return log_.back();
}

Termination RunState::check_termination() {
  if (termination_ != Termination::running) return termination_;
  if (best_fitness_ >= config_.target_fitness) {
    termination_ = Termination::target_reached;
  } else if (evaluations_ >= config_.max_evaluations) {
    termination_ = Termination::evaluation_budget;
  } else if (stagnant_generations_ >= kStagnationGenerations) {
    termination_ = Termination::stagnation;
  }
  return termination_;
}

RunState initialize(const RunConfig& config, Objective objective) {
  return RunState(config, std::move(objective));
}

const GenerationLog& step(RunState& state) { return state.step(); }

RunResult run(const RunConfig& config, Objective objective) {
  RunState state(config, std::move(objective));
  while (state.check_termination() == Termination::running) state.step();
  return RunResult{state.termination(), state.distribution(), state.best_individual(),
                   state.best_fitness(), state.evaluations(), state.evaluations_to_target(),
                   state.log()};
}

}  // namespace enes
