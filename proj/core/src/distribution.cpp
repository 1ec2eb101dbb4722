#include "enes/distribution.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "enes/errors.hpp"

namespace enes {

namespace {

void require_length(const Eigen::VectorXd& v, int d, const char* what) {
  if (v.size() != d) {
    throw InvalidArgument(std::string(what) + ": expected length " + std::to_string(d) +
                          ", got " + std::to_string(v.size()));
  }
}

}  // namespace

SearchDistribution::SearchDistribution(Eigen::VectorXd mean, Eigen::MatrixXd chol)
    : mean_(std::move(mean)), chol_(std::move(chol)) {
  const Eigen::Index d = mean_.size();
  if (d < 1) throw InvalidArgument("SearchDistribution: dimension must be positive");
  if (chol_.rows() != d || chol_.cols() != d) {
    throw InvalidArgument("SearchDistribution: Cholesky factor must be " + std::to_string(d) +
                          "x" + std::to_string(d));
  }
  if (!mean_.allFinite() || !chol_.allFinite()) {
    throw InvalidArgument("SearchDistribution: non-finite parameter");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j + 1; i < d; ++i) {
      if (chol_(i, j) != 0.0) {
        throw InvalidArgument("SearchDistribution: Cholesky factor is not upper triangular");
      }
    }
    if (!(chol_(j, j) > 0.0)) {
      throw InvalidArgument("SearchDistribution: diagonal entry " + std::to_string(j) +
                            " of the Cholesky factor is not positive");
    }
  }
}

SearchDistribution SearchDistribution::isotropic(Eigen::VectorXd mean) {
  const auto d = mean.size();
  return SearchDistribution(std::move(mean), Eigen::MatrixXd::Identity(d, d));
}

Eigen::MatrixXd SearchDistribution::covariance() const {
  return chol_.transpose() * chol_.triangularView<Eigen::Upper>();
}

Eigen::VectorXd SearchDistribution::sample(const Eigen::VectorXd& s) const {
  require_length(s, dim(), "sample");
  Eigen::VectorXd offset = chol_.triangularView<Eigen::Upper>().transpose() * s;
  return mean_ + offset;
}

Eigen::VectorXd SearchDistribution::whiten(const Eigen::VectorXd& z) const {
  require_length(z, dim(), "whiten");
  return chol_.triangularView<Eigen::Upper>().transpose().solve(z - mean_);
}

double SearchDistribution::log_density(const Eigen::VectorXd& z) const {
  require_length(z, dim(), "log_density");
  const Eigen::VectorXd y = whiten(z);
  const double log_det = chol_.diagonal().array().log().sum();
  return -0.5 * dim() * std::log(2.0 * std::numbers::pi) - log_det - 0.5 * y.squaredNorm();
}

ThetaLayout::ThetaLayout(int dim) : dim_(dim) {
  if (dim < 1) throw InvalidArgument("ThetaLayout: dimension must be positive");
}

int ThetaLayout::offset(int group) const {
  if (group < 0 || group > dim_) throw InvalidArgument("ThetaLayout: group out of range");
  if (group == 0) return 0;
  const int before = group - 1;
  return dim_ + before * (dim_ + 1) - before * (before + 1) / 2;
}

int ThetaLayout::length(int group) const {
  if (group < 0 || group > dim_) throw InvalidArgument("ThetaLayout: group out of range");
  return group == 0 ? dim_ : dim_ + 1 - group;
}

int ThetaLayout::index_of(int row, int col) const {
  if (row < 0 || col < row || col >= dim_) {
    throw InvalidArgument("ThetaLayout: (row, col) is not an upper-triangular entry");
  }
  return offset(row + 1) + (col - row);
}

std::pair<int, int> ThetaLayout::entry_at(int flat) const {
  if (flat < dim_ || flat >= size()) throw InvalidArgument("ThetaLayout: not a factor entry");
  int row = 0;
  while (flat >= offset(row + 1) + (dim_ - row)) ++row;
  return {row, row + (flat - offset(row + 1))};
}

Eigen::VectorXd ThetaLayout::flatten(const SearchDistribution& dist) const {
  if (dist.dim() != dim_) throw InvalidArgument("ThetaLayout::flatten: dimension mismatch");
  Eigen::VectorXd theta(size());
  theta.head(dim_) = dist.mean();
  for (int row = 0; row < dim_; ++row) {
    theta.segment(offset(row + 1), dim_ - row) = dist.chol().row(row).tail(dim_ - row).transpose();
  }
  return theta;
}

SearchDistribution ThetaLayout::unflatten(const Eigen::VectorXd& theta) const {
  require_length(theta, size(), "ThetaLayout::unflatten");
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int row = 0; row < dim_; ++row) {
    chol.row(row).tail(dim_ - row) = theta.segment(offset(row + 1), dim_ - row).transpose();
  }
  return SearchDistribution(theta.head(dim_), std::move(chol));
}

Eigen::VectorXd log_density_gradient(const SearchDistribution& dist,
                                     const Eigen::VectorXd& z,
                                     const ThetaLayout& layout) {
  const int d = dist.dim();
  if (layout.dim() != d) throw InvalidArgument("log_density_gradient: layout dimension mismatch");
  require_length(z, d, "log_density_gradient");

  const auto upper = dist.chol().triangularView<Eigen::Upper>();
  // y = A⁻ᵀ(z - x) and w = A⁻y = C⁻(z - x); R = y wᵀ is never formed.
  const Eigen::VectorXd y = upper.transpose().solve(z - dist.mean());
  const Eigen::VectorXd w = upper.solve(y);

  Eigen::VectorXd g(layout.size());
  g.head(d) = w;
  for (int row = 0; row < d; ++row) {
    const int off = layout.offset(row + 1);
    for (int col = row; col < d; ++col) g[off + col - row] = y[row] * w[col];
    g[off] -= 1.0 / dist.chol()(row, row);
  }
  return g;
}

ThetaUpdate theta_apply_update(const SearchDistribution& dist,
                               const Eigen::VectorXd& delta,
                               const ThetaLayout& layout) {
  const int d = dist.dim();
  if (layout.dim() != d) throw InvalidArgument("theta_apply_update: layout dimension mismatch");
  require_length(delta, layout.size(), "theta_apply_update");

  Eigen::VectorXd mean = dist.mean() + delta.head(d);
  Eigen::MatrixXd chol = dist.chol();
  bool clamped = false;
  for (int row = 0; row < d; ++row) {
    const int off = layout.offset(row + 1);
    for (int col = row; col < d; ++col) chol(row, col) += delta[off + col - row];
    if (!(chol(row, row) > kDiagFloor)) {
      chol(row, row) = kDiagFloor;
      clamped = true;
    }
  }
  return {SearchDistribution(std::move(mean), std::move(chol)), clamped};
}

}  // namespace enes
