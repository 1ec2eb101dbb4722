#pragma once

// Independent reference computations used only by tests. Nothing here calls
// the recurrence, the streaming gradient or importance mixing.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "enes/distribution.hpp"
#include "enes/gradient.hpp"
#include "enes/rng.hpp"

namespace enes::oracle {

/// Upper-triangular factor with diagonal in [diag_lo, diag_hi] and
/// off-diagonal entries in [-off, off].
Eigen::MatrixXd random_factor(Rng& rng, int d, double diag_lo = 0.5, double diag_hi = 2.0,
                              double off = 0.5);

SearchDistribution random_distribution(Rng& rng, int d);

/// Fisher matrix from the block form: mean block C⁻, and for row r of A the
/// block (C⁻)_{r:, r:} + a_rr⁻² e₁e₁ᵀ. C⁻ comes from a dense LU inverse.
Eigen::MatrixXd fisher_closed_form(const Eigen::MatrixXd& chol);

/// Dense inverse of each diagonal block of F, in group order 0..d.
std::vector<Eigen::MatrixXd> dense_block_inverses(const Eigen::MatrixXd& fisher, int d);

/// Central differences of dense_log_density with respect to the flat θ.
Eigen::VectorXd finite_difference_gradient(const SearchDistribution& dist,
                                           const Eigen::VectorXd& z, double h);

/// log N(z; x, AᵀA) through a dense covariance and its LDLT.
double dense_log_density(const SearchDistribution& dist, const Eigen::VectorXd& z);

/// Materializes G, forms each F_k⁻Gᵏ densely and applies the baseline
/// formula of `mode`, dividing by n.
NaturalGradient naive_natural_gradient(const SearchDistribution& dist,
                                       std::span<const Eigen::VectorXd> samples,
                                       const Eigen::VectorXd& shaped, BaselineMode mode);

/// Standard normal CDF.
double normal_cdf(double x);

/// One-sample Kolmogorov–Smirnov statistic D_n against `cdf`.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value for D_n with n samples (Stephens' correction).
double ks_pvalue(double statistic, std::size_t n);

/// f̂ = 2i − 1 for i > 1/2, else 0, with i = rank/(n − 1) found by counting
/// smaller entries (ties broken by index).
Eigen::VectorXd shaped_by_counting(std::span<const double> raw);

}  // namespace enes::oracle
