#include "enes/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "enes/errors.hpp"
#include "enes/rng.hpp"

namespace enes {

namespace {

constexpr std::array kUnimodal = {
    FunctionId::Sphere,  FunctionId::Schwefel, FunctionId::Tablet,
    FunctionId::Cigar,   FunctionId::Ellipsoid, FunctionId::DiffPow,
    FunctionId::SharpR,  FunctionId::ParabR,   FunctionId::Rosenbrock,
};

constexpr std::array kMultimodal = {
    FunctionId::Rastrigin, FunctionId::Ackley, FunctionId::Griewank, FunctionId::Weierstrass,
};

constexpr std::array<std::pair<FunctionId, std::string_view>, 13> kNames = {{
    {FunctionId::Sphere, "Sphere"},
    {FunctionId::Schwefel, "Schwefel"},
    {FunctionId::Tablet, "Tablet"},
    {FunctionId::Cigar, "Cigar"},
    {FunctionId::Ellipsoid, "Ellipsoid"},
    {FunctionId::DiffPow, "DiffPow"},
    {FunctionId::SharpR, "SharpR"},
    {FunctionId::ParabR, "ParabR"},
    {FunctionId::Rosenbrock, "Rosenbrock"},
    {FunctionId::Rastrigin, "Rastrigin"},
    {FunctionId::Ackley, "Ackley"},
    {FunctionId::Griewank, "Griewank"},
    {FunctionId::Weierstrass, "Weierstrass"},
}};

// (i - 1) / (d - 1) for 0-based i, 0 when d == 1.
double spread(Eigen::Index i, Eigen::Index d) {
  return d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
}

double weierstrass(const Eigen::VectorXd& y) {
  constexpr double a = 0.5;
  constexpr double b = 3.0;
  constexpr int k_max = 20;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double total = 0.0;
  double offset = 0.0;
  double ak = 1.0;
  double bk = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    for (Eigen::Index i = 0; i < y.size(); ++i) total += ak * std::cos(two_pi * bk * (y[i] + 0.5));
    offset += ak * std::cos(two_pi * bk * 0.5);
    ak *= a;
    bk *= b;
  }
  return total - static_cast<double>(y.size()) * offset;
}

}  // namespace

std::string_view to_string(FunctionId id) {
  for (const auto& [fid, name] : kNames) {
    if (fid == id) return name;
  }
  return "unknown";
}

FunctionId parse_function_id(std::string_view name) {
  for (const auto& [fid, known] : kNames) {
    const bool same = std::equal(known.begin(), known.end(), name.begin(), name.end(),
                                 [](char a, char b) {
                                   return std::tolower(static_cast<unsigned char>(a)) ==
                                          std::tolower(static_cast<unsigned char>(b));
                                 });
    if (same) return fid;
  }
  throw ConfigError("unknown benchmark function '" + std::string(name) + "'");
}

std::span<const FunctionId> unimodal_functions() { return kUnimodal; }
std::span<const FunctionId> multimodal_functions() { return kMultimodal; }

bool is_unimodal(FunctionId id) {
  return std::find(kUnimodal.begin(), kUnimodal.end(), id) != kUnimodal.end();
}

bool is_ridge(FunctionId id) { return id == FunctionId::SharpR || id == FunctionId::ParabR; }

double base_value(FunctionId id, const Eigen::VectorXd& y) {
  const Eigen::Index d = y.size();
  switch (id) {
    case FunctionId::Sphere:
      return y.squaredNorm();
    case FunctionId::Schwefel: {
      double partial = 0.0;
      double total = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        partial += y[i];
        total += partial * partial;
      }
      return total;
    }
    case FunctionId::Tablet:
      return 1e6 * y[0] * y[0] + y.tail(d - 1).squaredNorm();
    case FunctionId::Cigar:
      return y[0] * y[0] + 1e6 * y.tail(d - 1).squaredNorm();
    case FunctionId::Ellipsoid: {
      double total = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) total += std::pow(10.0, 6.0 * spread(i, d)) * y[i] * y[i];
      return total;
    }
    case FunctionId::DiffPow: {
      double total = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) total += std::pow(std::abs(y[i]), 2.0 + 10.0 * spread(i, d));
      return total;
    }
    case FunctionId::SharpR:
      return -y[0] + 100.0 * y.tail(d - 1).norm();
    case FunctionId::ParabR:
      return -y[0] + 100.0 * y.tail(d - 1).squaredNorm();
    case FunctionId::Rosenbrock: {
      double total = 0.0;
      for (Eigen::Index i = 0; i + 1 < d; ++i) {
        const double xi = y[i] + 1.0;
        const double xn = y[i + 1] + 1.0;
        total += 100.0 * (xn - xi * xi) * (xn - xi * xi) + (1.0 - xi) * (1.0 - xi);
      }
      return total;
    }
    case FunctionId::Rastrigin: {
      double total = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        total += y[i] * y[i] + 10.0 * (1.0 - std::cos(2.0 * std::numbers::pi * y[i]));
      }
      return total;
    }
    case FunctionId::Ackley: {
      const double dd = static_cast<double>(d);
      double cos_sum = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) cos_sum += std::cos(2.0 * std::numbers::pi * y[i]);
      return 20.0 - 20.0 * std::exp(-0.2 * std::sqrt(y.squaredNorm() / dd)) + std::numbers::e -
             std::exp(cos_sum / dd);
    }
    case FunctionId::Griewank: {
      double prod = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) prod *= std::cos(y[i] / std::sqrt(static_cast<double>(i + 1)));
      return y.squaredNorm() / 4000.0 - prod + 1.0;
    }
    case FunctionId::Weierstrass:
      return weierstrass(y);
  }
  throw ConfigError("unknown benchmark function");
}

BenchmarkProblem make_problem(FunctionId id, int dim, std::uint64_t seed) {
  if (dim < 1) throw ConfigError("benchmark dimension must be positive");
  BenchmarkProblem p;
  p.function = id;
  p.dim = dim;
  p.seed = seed;

  Rng rot_rng(derive_seed(seed, 0));
  Eigen::MatrixXd gauss(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) gauss(i, j) = rot_rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  p.rotation = std::move(q);

  Rng shift_rng(derive_seed(seed, 1));
  p.translation.resize(dim);
  for (int i = 0; i < dim; ++i) p.translation[i] = 2.0 * shift_rng.uniform() - 1.0;
  return p;
}

BenchmarkProblem make_problem(const ProblemSpec& spec) {
  return make_problem(spec.function, spec.dim, spec.seed);
}

BenchmarkProblem make_unrotated_problem(FunctionId id, Eigen::VectorXd translation) {
  BenchmarkProblem p;
  p.function = id;
  p.dim = static_cast<int>(translation.size());
  p.rotation = Eigen::MatrixXd::Identity(p.dim, p.dim);
  p.translation = std::move(translation);
  return p;
}

double evaluate(const BenchmarkProblem& problem, const Eigen::VectorXd& z) {
  if (z.size() != problem.dim) {
    throw InvalidArgument("evaluate: expected a point of dimension " + std::to_string(problem.dim));
  }
  if (!z.allFinite()) throw InvalidArgument("evaluate: non-finite input");
  const Eigen::VectorXd y = problem.rotation * (z - problem.translation);
  return -base_value(problem.function, y);
}

Eigen::VectorXd initial_guess(const BenchmarkProblem& problem, double r, std::uint64_t seed) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("initial_guess: distance must be positive");
  Rng rng(seed);
  Eigen::VectorXd u;
  do {
    u = rng.standard_normal(problem.dim);
  } while (u.norm() == 0.0);
  u /= u.norm();
  return problem.translation + r * u;
}

Objective make_objective(const BenchmarkProblem& problem) {
  return Objective{problem.dim, [problem](const Eigen::VectorXd& z) { return evaluate(problem, z); }};
}

double reference_fitness(FunctionId id) { return is_ridge(id) ? kRidgeFitnessThreshold : 0.0; }

double fitness_gap(FunctionId id, double best_fitness) {
  return std::max(0.0, reference_fitness(id) - best_fitness);
}

double target_fitness(FunctionId id, double precision) {
  return is_ridge(id) ? kRidgeFitnessThreshold : -precision;
}

}  // namespace enes
