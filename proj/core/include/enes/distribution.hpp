#pragma once

#include <utility>

#include <Eigen/Core>

namespace enes {

/// Diagonal entries of the Cholesky factor are never allowed below this value.
inline constexpr double kDiagFloor = 1e-30;

/// Gaussian mutation distribution N(mean, AᵀA) parameterized by its mean and the
/// upper-triangular Cholesky factor A (positive diagonal).
class SearchDistribution {
 public:
  /// Throws InvalidArgument if shapes disagree, anything is non-finite, the
  /// strict lower triangle is not exactly zero, or a diagonal entry is <= 0.
  SearchDistribution(Eigen::VectorXd mean, Eigen::MatrixXd chol);

  /// N(mean, I).
  static SearchDistribution isotropic(Eigen::VectorXd mean);

  int dim() const { return static_cast<int>(mean_.size()); }
  /// d + d(d+1)/2
  int num_params() const { return dim() + dim() * (dim() + 1) / 2; }

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  Eigen::MatrixXd covariance() const;

  /// z = x + Aᵀs for a standard-normal vector s.
  Eigen::VectorXd sample(const Eigen::VectorXd& s) const;

  /// A⁻ᵀ(z - x), by forward substitution.
  Eigen::VectorXd whiten(const Eigen::VectorXd& z) const;

  double log_density(const Eigen::VectorXd& z) const;

  friend bool operator==(const SearchDistribution& a, const SearchDistribution& b) {
    return a.mean_ == b.mean_ && a.chol_ == b.chol_;
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_;
};

/// Position of each parameter group inside the flat θ vector.
///
/// Group 0 is the mean (length d). Group k, 1 <= k <= d, holds row k of A from
/// the diagonal rightwards, i.e. [a_kk ... a_kd], length d + 1 - k. Rows and
/// columns of A are 0-based in the API, so group k is matrix row k - 1.
class ThetaLayout {
 public:
  explicit ThetaLayout(int dim);

  int dim() const { return dim_; }
  int size() const { return dim_ + dim_ * (dim_ + 1) / 2; }
  int num_groups() const { return dim_ + 1; }

  int offset(int group) const;
  int length(int group) const;

  /// Flat position of A(row, col), row <= col.
  int index_of(int row, int col) const;
  /// Inverse of index_of, for flat positions >= d.
  std::pair<int, int> entry_at(int flat) const;

  Eigen::VectorXd flatten(const SearchDistribution& dist) const;
  /// Throws like the SearchDistribution constructor if the result is invalid.
  SearchDistribution unflatten(const Eigen::VectorXd& theta) const;

 private:
  int dim_;
};

/// g(z|θ) = ∇θ ln p(z|θ) in layout order.
Eigen::VectorXd log_density_gradient(const SearchDistribution& dist,
                                     const Eigen::VectorXd& z,
                                     const ThetaLayout& layout);

struct ThetaUpdate {
  SearchDistribution dist;
  /// True if at least one diagonal entry of A was clamped to kDiagFloor.
  bool clamped = false;
};

/// θ + delta. The caller scales delta by the learning rate.
ThetaUpdate theta_apply_update(const SearchDistribution& dist,
                               const Eigen::VectorXd& delta,
                               const ThetaLayout& layout);

}  // namespace enes
