#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "enes/optimizer.hpp"

namespace enes {

/// Standard test functions, all in minimization form f(y) with f(0) = 0 for
/// the bounded ones:
///
///   Sphere       Σ yᵢ²
///   Schwefel     Σᵢ (Σ_{j<=i} yⱼ)²                     (double sum, 1.2)
///   Tablet       10⁶ y₁² + Σ_{i>=2} yᵢ²
///   Cigar        y₁² + 10⁶ Σ_{i>=2} yᵢ²
///   Ellipsoid    Σ 10^{6(i-1)/(d-1)} yᵢ²
///   DiffPow      Σ |yᵢ|^{2 + 10(i-1)/(d-1)}
///   SharpR       -y₁ + 100 ‖y_{2:d}‖                    (unbounded below)
///   ParabR       -y₁ + 100 ‖y_{2:d}‖²                   (unbounded below)
///   Rosenbrock   Σ 100(x_{i+1} - xᵢ²)² + (1 - xᵢ)², x = y + 1
///   Rastrigin    10d + Σ (yᵢ² - 10 cos 2πyᵢ)
///   Ackley       20 - 20 exp(-0.2 √(‖y‖²/d)) + e - exp(Σ cos(2πyᵢ)/d)
///   Griewank     Σ yᵢ²/4000 - Π cos(yᵢ/√i) + 1
///   Weierstrass  Σᵢ Σₖ aᵏ cos(2πbᵏ(yᵢ + ½)) - d Σₖ aᵏ cos(πbᵏ),  a = 0.5, b = 3, k = 0..20
///
/// Indices are 1-based in the formulas; for d = 1 the (i-1)/(d-1) exponents are 0.
enum class FunctionId {
  Sphere,
  Schwefel,
  Tablet,
  Cigar,
  Ellipsoid,
  DiffPow,
  SharpR,
  ParabR,
  Rosenbrock,
  Rastrigin,
  Ackley,
  Griewank,
  Weierstrass,
};

std::string_view to_string(FunctionId id);
/// Case-insensitive; throws ConfigError for unknown names.
FunctionId parse_function_id(std::string_view name);

std::span<const FunctionId> unimodal_functions();
std::span<const FunctionId> multimodal_functions();
bool is_unimodal(FunctionId id);
/// SharpR and ParabR have no finite optimum.
bool is_ridge(FunctionId id);

/// Ridge functions count as solved once the (maximized) fitness reaches this.
inline constexpr double kRidgeFitnessThreshold = 1e10;

/// Everything needed to rebuild a problem bit-exactly.
struct ProblemSpec {
  FunctionId function = FunctionId::Sphere;
  int dim = 2;
  std::uint64_t seed = 0;
};

/// A base function behind a fixed rotation R and translation t:
/// fitness(z) = -f(R(z - t)). The optimum of the bounded functions sits at t.
struct BenchmarkProblem {
  FunctionId function = FunctionId::Sphere;
  int dim = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd rotation;
  Eigen::VectorXd translation;

  ProblemSpec spec() const { return {function, dim, seed}; }
};

/// R is the Q factor (with positive-diagonal R convention) of a seeded
/// Gaussian matrix; t is uniform in [-1, 1]^d.
BenchmarkProblem make_problem(FunctionId id, int dim, std::uint64_t seed);
BenchmarkProblem make_problem(const ProblemSpec& spec);

/// Identity rotation; used to check rotation handling.
BenchmarkProblem make_unrotated_problem(FunctionId id, Eigen::VectorXd translation);

/// Minimization form f(y), without rotation or translation.
double base_value(FunctionId id, const Eigen::VectorXd& y);

/// -f(R(z - t)); throws InvalidArgument for wrong length or non-finite input.
double evaluate(const BenchmarkProblem& problem, const Eigen::VectorXd& z);

/// t + r·u with u a seeded uniform direction, so the guess is exactly r away
/// from the optimum. Throws InvalidArgument unless r > 0.
Eigen::VectorXd initial_guess(const BenchmarkProblem& problem, double r, std::uint64_t seed);

Objective make_objective(const BenchmarkProblem& problem);

/// Best attainable fitness (0), or kRidgeFitnessThreshold for ridges.
double reference_fitness(FunctionId id);

/// reference_fitness - best, floored at 0.
double fitness_gap(FunctionId id, double best_fitness);

/// Fitness a run must reach to be within `precision` of the optimum. For
/// ridge functions the precision is ignored and the threshold is returned.
double target_fitness(FunctionId id, double precision);

}  // namespace enes
