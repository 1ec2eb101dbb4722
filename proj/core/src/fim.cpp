#include "enes/fim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "enes/distribution.hpp"
#include "enes/errors.hpp"

namespace enes {

namespace {

void require_factor(const Eigen::MatrixXd& chol) {
  if (chol.rows() != chol.cols() || chol.rows() < 1) {
    throw InvalidArgument("Cholesky factor must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < chol.rows(); ++i) {
    if (!(chol(i, i) > 0.0)) {
      throw SingularFactor("Cholesky factor has non-positive diagonal entry at " +
                           std::to_string(i));
    }
  }
}

}  // namespace

Eigen::MatrixXd precision_matrix(const Eigen::MatrixXd& chol) {
  require_factor(chol);
  const Eigen::Index d = chol.rows();
  const Eigen::MatrixXd inv =
      chol.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd cinv = inv.triangularView<Eigen::Upper>() * inv.transpose();
  return 0.5 * (cinv + cinv.transpose());
}

Eigen::MatrixXd assemble_fim_dense(const Eigen::MatrixXd& chol) {
  require_factor(chol);
  const int d = static_cast<int>(chol.rows());
  const ThetaLayout layout(d);
  const Eigen::MatrixXd cinv = precision_matrix(chol);

  Eigen::MatrixXd fim = Eigen::MatrixXd::Zero(layout.size(), layout.size());
  fim.topLeftCorner(d, d) = cinv;
  for (int m = d; m < layout.size(); ++m) {
    const auto [im, jm] = layout.entry_at(m);
    for (int n = d; n < layout.size(); ++n) {
      const auto [in, jn] = layout.entry_at(n);
      double value = 0.0;
      if (in == im) value += cinv(jn, jm);
      if (im == in && in == jm && jm == jn) value += 1.0 / (chol(im, im) * chol(im, im));
      fim(m, n) = value;
    }
  }
  return fim;
}

FimInverseSweep::FimInverseSweep(const Eigen::MatrixXd& chol, const Eigen::MatrixXd& cinv)
    : chol_(chol), cinv_(cinv), d_(static_cast<int>(chol.rows())), k_(d_) {
  require_factor(chol);
  if (cinv.rows() != d_ || cinv.cols() != d_) {
    throw InvalidArgument("FimInverseSweep: precision matrix shape does not match the factor");
  }
  work_.resize(d_, d_);
  u_.resize(d_);
}

const Eigen::MatrixXd& FimInverseSweep::next() {
  if (done()) throw InvalidArgument("FimInverseSweep::next called after the last block");

  const int r = k_ - 1;  // 0-based row of A belonging to group k
  const double a = chol_(r, r);
  const double a_inv_sq = 1.0 / (a * a);
  mults_ += 1;

  if (k_ == d_) {
    const double w = cinv_(r, r);
    if (!(w > 0.0)) throw NumericalBreakdown(k_, "FIM inverse: (C⁻)_dd is not positive");
    work_(r, r) = 1.0 / w;
    schur_residual_ = std::max(schur_residual_, std::abs(work_(r, r) * a_inv_sq - 1.0));
    block_.resize(1, 1);
    block_(0, 0) = 1.0 / (w + a_inv_sq);
    --k_;
    return block_;
  }

  // D_{k+1}⁻ occupies work_ rows/cols [k_, d_), which is size m.
  const int m = d_ - k_;
  const int lo = k_;
  const double w = cinv_(r, r);

  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += work_(lo + i, lo + j) * cinv_(lo + j, r);
    u_[i] = acc;
    s += cinv_(lo + i, r) * acc;
  }
  mults_ += static_cast<std::uint64_t>(m) * m + m;

  const double w_f = w + a_inv_sq;
  if (!(w - s > 0.0) || !(w_f - s > 0.0)) {
    throw NumericalBreakdown(k_, "FIM inverse: non-positive Schur complement at group " +
                                     std::to_string(k_));
  }
  const double q = 1.0 / (w - s);
  const double q_f = 1.0 / (w_f - s);
  const double c = -(1.0 + q * s) / w;
  const double c_f = -(1.0 + q_f * s) / w_f;
  mults_ += 2;

  block_.resize(m + 1, m + 1);
  block_(0, 0) = q_f;
  for (int i = 0; i < m; ++i) {
    block_(0, i + 1) = block_(i + 1, 0) = c_f * u_[i];
    for (int j = 0; j < m; ++j) {
      block_(i + 1, j + 1) = work_(lo + i, lo + j) + q_f * u_[i] * u_[j];
    }
  }
  mults_ += static_cast<std::uint64_t>(2) * m * m + m;

  // D_k⁻ in place: the corner grows by one row/column at r = lo - 1.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) work_(lo + i, lo + j) += q * u_[i] * u_[j];
    work_(r, lo + i) = work_(lo + i, r) = c * u_[i];
  }
  work_(r, r) = q;
  schur_residual_ = std::max(schur_residual_, std::abs(q * a_inv_sq - 1.0));
  mults_ += static_cast<std::uint64_t>(2) * m * m + m;

  --k_;
  return block_;
}

FimInverseBlocks fim_inverse_blocks(const Eigen::MatrixXd& chol, const Eigen::MatrixXd& cinv) {
  FimInverseSweep sweep(chol, cinv);
  const int d = static_cast<int>(chol.rows());
  FimInverseBlocks out;
  out.blocks.resize(d);
  while (!sweep.done()) {
    const int k = sweep.group();
    out.blocks[k - 1] = sweep.next();
  }
  out.block0 = chol.transpose() * chol.triangularView<Eigen::Upper>();
  return out;
}

}  // namespace enes
