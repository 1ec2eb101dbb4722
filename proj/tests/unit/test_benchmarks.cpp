#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "enes/benchmarks.hpp"
#include "enes/errors.hpp"
#include "enes/rng.hpp"

namespace enes {
namespace {

constexpr FunctionId kAll[] = {
    FunctionId::Sphere,     FunctionId::Schwefel,  FunctionId::Tablet,  FunctionId::Cigar,
    FunctionId::Ellipsoid,  FunctionId::DiffPow,   FunctionId::SharpR,  FunctionId::ParabR,
    FunctionId::Rosenbrock, FunctionId::Rastrigin, FunctionId::Ackley,  FunctionId::Griewank,
    FunctionId::Weierstrass,
};

Eigen::VectorXd e1(int d) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  v[0] = 1.0;
  return v;
}

TEST(Suite, Membership) {
  EXPECT_EQ(unimodal_functions().size(), 9u);
  EXPECT_EQ(multimodal_functions().size(), 4u);
  for (FunctionId id : unimodal_functions()) EXPECT_TRUE(is_unimodal(id));
  for (FunctionId id : multimodal_functions()) EXPECT_FALSE(is_unimodal(id));
  EXPECT_TRUE(is_ridge(FunctionId::SharpR));
  EXPECT_TRUE(is_ridge(FunctionId::ParabR));
  EXPECT_FALSE(is_ridge(FunctionId::Rosenbrock));
}

TEST(Suite, NamesRoundTrip) {
  for (FunctionId id : kAll) EXPECT_EQ(parse_function_id(to_string(id)), id);
  EXPECT_EQ(parse_function_id("rastrigin"), FunctionId::Rastrigin);
  EXPECT_EQ(parse_function_id("SPHERE"), FunctionId::Sphere);
  EXPECT_THROW(parse_function_id("Himmelblau"), ConfigError);
}

TEST(MakeProblem, SameSeedIsBitIdentical) {
  const auto a = make_problem(FunctionId::Ackley, 6, 42);
  const auto b = make_problem(ProblemSpec{FunctionId::Ackley, 6, 42});
  EXPECT_EQ(a.rotation, b.rotation);
  EXPECT_EQ(a.translation, b.translation);
  const auto c = make_problem(FunctionId::Ackley, 6, 43);
  EXPECT_NE(a.translation, c.translation);
}

TEST(MakeProblem, RotationIsOrthogonal) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 1 + static_cast<int>(seed % 12);
    const auto p = make_problem(FunctionId::Sphere, d, seed);
    EXPECT_LT((p.rotation.transpose() * p.rotation - Eigen::MatrixXd::Identity(d, d))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
    EXPECT_LE(p.translation.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(MakeProblem, RejectsBadDimension) {
  EXPECT_THROW(make_problem(FunctionId::Sphere, 0, 1), ConfigError);
}

TEST(Evaluate, OptimumValueIsZero) {
  for (FunctionId id : kAll) {
    if (is_ridge(id)) continue;
    for (int d : {1, 2, 5, 10}) {
      const auto p = make_problem(id, d, 7);
      EXPECT_LE(std::abs(evaluate(p, p.translation)), 1e-12) << to_string(id) << " d=" << d;
    }
  }
}

TEST(Evaluate, SphereAtDistanceOne) {
  const auto p = make_problem(FunctionId::Sphere, 4, 3);
  EXPECT_NEAR(evaluate(p, initial_guess(p, 1.0, 5)), -1.0, 1e-12);
}

TEST(Evaluate, BaseValues) {
  EXPECT_NEAR(base_value(FunctionId::Rastrigin, e1(3)), 1.0, 1e-12);
  EXPECT_EQ(base_value(FunctionId::Griewank, Eigen::VectorXd::Zero(4)), 0.0);
  EXPECT_NEAR(base_value(FunctionId::Ackley, Eigen::VectorXd::Zero(4)), 0.0, 1e-15);
  EXPECT_EQ(base_value(FunctionId::Weierstrass, Eigen::VectorXd::Zero(3)), 0.0);
  EXPECT_EQ(base_value(FunctionId::Rosenbrock, Eigen::VectorXd::Zero(5)), 0.0);

  Eigen::VectorXd y(3);
  y << 1.0, 2.0, -1.0;
  EXPECT_DOUBLE_EQ(base_value(FunctionId::Sphere, y), 6.0);
  EXPECT_DOUBLE_EQ(base_value(FunctionId::Schwefel, y), 1.0 + 9.0 + 4.0);
  EXPECT_DOUBLE_EQ(base_value(FunctionId::Tablet, y), 1e6 + 5.0);
  EXPECT_DOUBLE_EQ(base_value(FunctionId::Cigar, y), 1.0 + 5e6);
  EXPECT_DOUBLE_EQ(base_value(FunctionId::Ellipsoid, y), 1.0 + 1e3 * 4.0 + 1e6);
  EXPECT_DOUBLE_EQ(base_value(FunctionId::DiffPow, y), 1.0 + std::pow(2.0, 7.0) + 1.0);
  EXPECT_DOUBLE_EQ(base_value(FunctionId::SharpR, y), -1.0 + 100.0 * std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(base_value(FunctionId::ParabR, y), -1.0 + 500.0);
  // x = y + 1 = (2, 3, 0)
  EXPECT_DOUBLE_EQ(base_value(FunctionId::Rosenbrock, y),
                   100.0 * 1.0 + 1.0 + 100.0 * 81.0 + 4.0);
  EXPECT_DOUBLE_EQ(base_value(FunctionId::Sphere, Eigen::VectorXd::Constant(1, 3.0)), 9.0);
}

TEST(Evaluate, RastriginAlongRotatedAxis) {
  const auto p = make_problem(FunctionId::Rastrigin, 3, 11);
  // z with R(z - t) = e1.
  const Eigen::VectorXd z = p.translation + p.rotation.transpose() * e1(3);
  EXPECT_NEAR(evaluate(p, z), -1.0, 1e-12);
}

TEST(Evaluate, RejectsBadPoints) {
  const auto p = make_problem(FunctionId::Sphere, 3, 1);
  EXPECT_THROW(evaluate(p, Eigen::VectorXd::Zero(2)), InvalidArgument);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  z[1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(evaluate(p, z), InvalidArgument);
  z[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(evaluate(p, z), InvalidArgument);
}

TEST(Evaluate, RidgesAreUnboundedAbove) {
  for (FunctionId id : {FunctionId::SharpR, FunctionId::ParabR}) {
    const auto p = make_problem(id, 4, 2);
    const Eigen::VectorXd far = p.translation + p.rotation.transpose() * (1e12 * e1(4));
    EXPECT_GE(evaluate(p, far), kRidgeFitnessThreshold);
  }
}

TEST(Evaluate, UnimodalOptimumIsLocalMaximum) {
  Rng rng(61);
  for (FunctionId id : unimodal_functions()) {
    if (is_ridge(id)) continue;
    const auto p = make_problem(id, 5, 13);
    for (int i = 0; i < 1000; ++i) {
      Eigen::VectorXd u = rng.standard_normal(5);
      u *= 1e-3 / u.norm();
      EXPECT_LE(evaluate(p, p.translation + u), 0.0) << to_string(id);
    }
  }
}

TEST(Evaluate, RotationMatchesUnrotatedHarness) {
  Rng rng(62);
  for (FunctionId id : kAll) {
    const auto p = make_problem(id, 4, 21);
    const auto flat = make_unrotated_problem(id, p.translation);
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd z = p.translation + rng.standard_normal(4);
      const Eigen::VectorXd mapped = p.rotation * (z - p.translation) + p.translation;
      const double want = evaluate(p, z);
      EXPECT_NEAR(evaluate(flat, mapped), want, 1e-9 * std::max(1.0, std::abs(want)))
          << to_string(id);
    }
  }
}

TEST(InitialGuess, ExactRadius) {
  const auto p = make_problem(FunctionId::Rastrigin, 2, 5);
  for (double r : {0.1, 1.0, 10.0, 1000.0}) {
    EXPECT_NEAR((initial_guess(p, r, 9) - p.translation).norm(), r, 1e-12 * r);
  }
  const Eigen::VectorXd a = initial_guess(p, 1.0, 1);
  const Eigen::VectorXd b = initial_guess(p, 1.0, 2);
  EXPECT_NE(a, b);
  EXPECT_NEAR((a - p.translation).norm(), (b - p.translation).norm(), 1e-12);
  EXPECT_THROW(initial_guess(p, 0.0, 1), InvalidArgument);
  EXPECT_THROW(initial_guess(p, -1.0, 1), InvalidArgument);
}

TEST(InitialGuess, Isotropic) {
  const int d = 3;
  const auto p = make_problem(FunctionId::Sphere, d, 8);
  const int n = 10000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int s = 0; s < n; ++s) mean += initial_guess(p, 1.0, static_cast<std::uint64_t>(s));
  mean /= n;
  const double se = std::sqrt(1.0 / d / n);
  EXPECT_LT((mean - p.translation).cwiseAbs().maxCoeff(), 5.0 * se);
}

TEST(Targets, GapAndThreshold) {
  EXPECT_EQ(target_fitness(FunctionId::Sphere, 1e-10), -1e-10);
  EXPECT_EQ(target_fitness(FunctionId::SharpR, 1e-10), kRidgeFitnessThreshold);
  EXPECT_EQ(fitness_gap(FunctionId::Sphere, -0.25), 0.25);
  EXPECT_EQ(fitness_gap(FunctionId::Sphere, 0.0), 0.0);
  EXPECT_EQ(fitness_gap(FunctionId::ParabR, 2e10), 0.0);
  EXPECT_EQ(fitness_gap(FunctionId::ParabR, 0.0), kRidgeFitnessThreshold);
}

}  // namespace
}  // namespace enes
