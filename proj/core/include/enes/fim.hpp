#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace enes {

/// C⁻ = A⁻A⁻ᵀ for an upper-triangular factor A. The result is symmetrized.
/// Throws SingularFactor if a diagonal entry of A is not positive.
Eigen::MatrixXd precision_matrix(const Eigen::MatrixXd& chol);

/// The full d_s x d_s Fisher information matrix of N(x, AᵀA) w.r.t. θ = (x, A),
/// built entrywise. O(d⁴) memory; meant for d <= 12 (testing and diagnostics).
Eigen::MatrixXd assemble_fim_dense(const Eigen::MatrixXd& chol);

/// Inverted diagonal blocks of the exact FIM. block(0) = C = AᵀA; block(k) for
/// 1 <= k <= d is square of size d + 1 - k.
struct FimInverseBlocks {
  Eigen::MatrixXd block0;
  std::vector<Eigen::MatrixXd> blocks;  // blocks[k - 1] holds F_k⁻

  const Eigen::MatrixXd& block(int k) const { return k == 0 ? block0 : blocks.at(k - 1); }
  int dim() const { return static_cast<int>(block0.rows()); }
};

/// Streams F_k⁻ for k = d, d-1, ..., 1 using the rank-one block-inverse
/// recurrence over D_k⁻ (the inverse of the lower-right (d+1-k) submatrix of C⁻).
///
/// O(d²) time per call, one d x d work matrix overall. Each returned block
/// stays valid until the next call to next(). `chol` and `cinv` must outlive
/// the sweep.
class FimInverseSweep {
 public:
  FimInverseSweep(const Eigen::MatrixXd& chol, const Eigen::MatrixXd& cinv);

  bool done() const { return k_ == 0; }
  /// Group index of the block the next call to next() returns.
  int group() const { return k_; }

  /// Throws NumericalBreakdown if a Schur complement is not positive.
  const Eigen::MatrixXd& next();

  /// Floating-point multiplications performed so far.
  std::uint64_t multiplications() const { return mults_; }

  /// max_k |a_kk⁻² (w - s)⁻¹ - 1| over the blocks produced so far. The Schur
  /// value (w - s)⁻¹ equals a_kk² exactly, so this measures how much precision
  /// the recurrence has lost (it grows with the condition number of C).
  double schur_residual() const { return schur_residual_; }

 private:
  const Eigen::MatrixXd& chol_;
  const Eigen::MatrixXd& cinv_;
  int d_;
  int k_;
  Eigen::MatrixXd work_;  // D_{k+1}⁻ lives in the lower-right corner
  Eigen::VectorXd u_;
  Eigen::MatrixXd block_;
  std::uint64_t mults_ = 0;
  double schur_residual_ = 0.0;
};

/// All blocks at once; block0 is formed as AᵀA rather than by inverting C⁻.
FimInverseBlocks fim_inverse_blocks(const Eigen::MatrixXd& chol, const Eigen::MatrixXd& cinv);

}  // namespace enes
