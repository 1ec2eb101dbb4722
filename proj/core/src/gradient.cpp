#include "enes/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "enes/errors.hpp"
#include "enes/fim.hpp"

namespace enes {

ShapedFitness shape_fitness(std::span<const double> raw) {
  const std::size_t n = raw.size();
  if (n == 0) throw InvalidArgument("shape_fitness: empty population");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(raw[i])) {
      throw InvalidFitness(i, "shape_fitness: NaN fitness at index " + std::to_string(i));
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return raw[a] < raw[b]; });

  ShapedFitness out;
  out.values.resize(static_cast<Eigen::Index>(n));
  out.ranks.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const int idx = order[pos];
    out.ranks[idx] = static_cast<int>(pos);
    const double rel = n == 1 ? 1.0 : static_cast<double>(pos) / static_cast<double>(n - 1);
    out.values[idx] = rel > 0.5 ? 2.0 * rel - 1.0 : 0.0;
  }
  return out;
}

std::string_view to_string(BaselineMode mode) {
  switch (mode) {
    case BaselineMode::uniform: return "uniform";
    case BaselineMode::parameter_specific: return "parameter_specific";
    case BaselineMode::block: return "block";
  }
  return "block";
}

std::string_view to_string(FimPath path) {
  switch (path) {
    case FimPath::recurrence: return "recurrence";
    case FimPath::factored: return "factored";
    case FimPath::automatic: return "automatic";
  }
  return "automatic";
}

FimPath parse_fim_path(std::string_view name) {
  if (name == "recurrence") return FimPath::recurrence;
  if (name == "factored") return FimPath::factored;
  if (name == "automatic") return FimPath::automatic;
  throw ConfigError("unknown FIM path '" + std::string(name) + "'");
}

BaselineMode parse_baseline_mode(std::string_view name) {
  if (name == "uniform") return BaselineMode::uniform;
  if (name == "parameter_specific" || name == "parameter-specific") {
    return BaselineMode::parameter_specific;
  }
  if (name == "block") return BaselineMode::block;
  throw ConfigError("unknown baseline mode '" + std::string(name) + "'");
}

Eigen::VectorXd vanilla_gradient(const SearchDistribution& dist,
                                 std::span<const Eigen::VectorXd> samples,
                                 std::span<const double> fitness,
                                 const ThetaLayout& layout) {
  if (samples.empty()) throw InvalidArgument("vanilla_gradient: empty population");
  if (fitness.size() != samples.size()) {
    throw InvalidArgument("vanilla_gradient: fitness and population sizes differ");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    grad += fitness[i] * log_density_gradient(dist, samples[i], layout);
  }
  return grad / static_cast<double>(samples.size());
}

namespace {

/// Calls visit(k, Q) for k = d, ..., 1, 0 where column i of Q is F_k⁻ g^k(z_i).
/// Returns the sweep's Schur residual, or 0 on the factored path.
template <typename Visit>
double for_each_block(const SearchDistribution& dist, const Eigen::MatrixXd& cinv,
                      const Eigen::MatrixXd& diffs, const Eigen::MatrixXd& whitened,
                      FimPath path, Visit&& visit) {
  const int d = dist.dim();
  const Eigen::MatrixXd& chol = dist.chol();
  Eigen::MatrixXd grad_block;
  Eigen::MatrixXd q;

  double residual = 0.0;
  if (path == FimPath::factored) {
    // F_k⁻ g^k = Ã_kᵀ h with h = (½(y_r² - 1), y_r y_{r+1}, ..., y_r y_{d-1}).
    for (int k = d; k >= 1; --k) {
      const int row = k - 1;
      const int m = d - row;
      grad_block = whitened.middleRows(row, m);
      grad_block.array().rowwise() *= whitened.row(row).array();
      grad_block.row(0) = 0.5 * (whitened.row(row).array().square() - 1.0).matrix();
      q.noalias() =
          chol.block(row, row, m, m).transpose().triangularView<Eigen::Lower>() * grad_block;
      visit(k, q);
    }
    visit(0, diffs);
    return residual;
  }

  FimInverseSweep sweep(chol, cinv);
  while (!sweep.done()) {
    const int k = sweep.group();
    const int row = k - 1;
    const int m = d - row;
    const Eigen::MatrixXd& finv = sweep.next();
    // g^k(z) = y_row * (C⁻)_{row:d} (z - x) - e₁ / a_row,row, with y = A⁻ᵀ(z - x).
    grad_block.noalias() = cinv.middleRows(row, m) * diffs;
    grad_block.array().rowwise() *= whitened.row(row).array();
    grad_block.row(0).array() -= 1.0 / chol(row, row);
    q.noalias() = finv * grad_block;
    visit(k, q);
  }
  residual = sweep.schur_residual();

  const Eigen::MatrixXd cov = chol.transpose() * chol.triangularView<Eigen::Upper>();
  grad_block.noalias() = cinv * diffs;
  q.noalias() = cov * grad_block;
  visit(0, q);
  return residual;
}

NaturalGradient assemble(const SearchDistribution& dist, const Eigen::MatrixXd& cinv,
                         const Eigen::MatrixXd& diffs, const Eigen::MatrixXd& whitened,
                         const Eigen::VectorXd& fhat, BaselineMode mode,
                         const ThetaLayout& layout, FimPath path) {
  const int d = dist.dim();
  const double inv_n = 1.0 / static_cast<double>(diffs.cols());

  NaturalGradient out;
  out.delta = Eigen::VectorXd::Zero(layout.size());
  out.path_used = path;

  switch (mode) {
    case BaselineMode::block: {
      out.baselines = Eigen::VectorXd::Zero(d + 1);
      out.schur_residual =
          for_each_block(dist, cinv, diffs, whitened, path, [&](int k, const Eigen::MatrixXd& q) {
            const Eigen::RowVectorXd norms = q.colwise().squaredNorm();
            const double s1 = norms.dot(fhat.transpose());
            const double s2 = norms.sum();
            if (s2 == 0.0) {
              out.degenerate = true;
              return;
            }
            const double b = s1 / s2;
            out.baselines[k] = b;
            const Eigen::VectorXd u = q * fhat;
            const Eigen::VectorXd v = q.rowwise().sum();
            out.delta.segment(layout.offset(k), layout.length(k)) = (u - b * v) * inv_n;
          });
      break;
    }
    case BaselineMode::uniform: {
      double s1 = 0.0;
      double s2 = 0.0;
      out.schur_residual =
          for_each_block(dist, cinv, diffs, whitened, path, [&](int, const Eigen::MatrixXd& q) {
            const Eigen::RowVectorXd norms = q.colwise().squaredNorm();
            s1 += norms.dot(fhat.transpose());
            s2 += norms.sum();
          });
      out.baselines = Eigen::VectorXd::Zero(1);
      if (s2 == 0.0) {
        out.degenerate = true;
        break;
      }
      const double b = s1 / s2;
      out.baselines[0] = b;
      for_each_block(dist, cinv, diffs, whitened, path, [&](int k, const Eigen::MatrixXd& q) {
        const Eigen::VectorXd u = q * fhat;
        const Eigen::VectorXd v = q.rowwise().sum();
        out.delta.segment(layout.offset(k), layout.length(k)) = (u - b * v) * inv_n;
      });
      break;
    }
    case BaselineMode::parameter_specific: {
      out.baselines = Eigen::VectorXd::Zero(layout.size());
      out.schur_residual =
          for_each_block(dist, cinv, diffs, whitened, path, [&](int k, const Eigen::MatrixXd& q) {
            const int off = layout.offset(k);
            const Eigen::MatrixXd sq = q.array().square().matrix();
            const Eigen::VectorXd s1 = sq * fhat;
            const Eigen::VectorXd s2 = sq.rowwise().sum();
            const Eigen::VectorXd u = q * fhat;
            const Eigen::VectorXd v = q.rowwise().sum();
            for (Eigen::Index j = 0; j < q.rows(); ++j) {
              if (s2[j] == 0.0) {
                out.degenerate = true;
                continue;
              }
              const double b = s1[j] / s2[j];
              out.baselines[off + j] = b;
              out.delta[off + j] = (u[j] - b * v[j]) * inv_n;
            }
          });
      break;
    }
  }
  return out;
}

}  // namespace

NaturalGradient natural_gradient_step(const SearchDistribution& dist,
                                      const Eigen::MatrixXd& cinv,
                                      std::span<const Eigen::VectorXd> samples,
                                      const ShapedFitness& shaped,
                                      BaselineMode mode,
                                      const ThetaLayout& layout,
                                      FimPath path) {
  const int d = dist.dim();
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (layout.dim() != d) throw InvalidArgument("natural_gradient_step: layout mismatch");
  if (n < 2) throw InvalidArgument("natural_gradient_step: population size must be >= 2");
  if (shaped.values.size() != n) {
    throw InvalidArgument("natural_gradient_step: shaped fitness size differs from population");
  }
  if (path != FimPath::factored && (cinv.rows() != d || cinv.cols() != d)) {
    throw InvalidArgument("natural_gradient_step: precision matrix shape mismatch");
  }

  Eigen::MatrixXd diffs(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (samples[i].size() != d) throw InvalidArgument("natural_gradient_step: sample dimension");
    diffs.col(i) = samples[i] - dist.mean();
  }
  const Eigen::MatrixXd whitened =
      dist.chol().triangularView<Eigen::Upper>().transpose().solve(diffs);

  if (path != FimPath::automatic) {
    return assemble(dist, cinv, diffs, whitened, shaped.values, mode, layout, path);
  }
  double residual = 0.0;
  try {
    NaturalGradient out = assemble(dist, cinv, diffs, whitened, shaped.values, mode, layout,
                                   FimPath::recurrence);
    if (out.schur_residual <= kRecurrenceTolerance) return out;
    residual = out.schur_residual;
  } catch (const NumericalBreakdown&) {
    residual = std::numeric_limits<double>::infinity();
  }
  NaturalGradient out =
      assemble(dist, cinv, diffs, whitened, shaped.values, mode, layout, FimPath::factored);
  out.schur_residual = residual;
  return out;
}

NaturalGradient natural_gradient_step(const SearchDistribution& dist,
                                      std::span<const Eigen::VectorXd> samples,
                                      const ShapedFitness& shaped,
                                      BaselineMode mode,
                                      const ThetaLayout& layout,
                                      FimPath path) {
  Eigen::MatrixXd cinv;
  if (path == FimPath::factored) {
    return natural_gradient_step(dist, cinv, samples, shaped, mode, layout, path);
  }
  try {
    cinv = precision_matrix(dist.chol());
  } catch (const SingularFactor&) {
    if (path == FimPath::recurrence) throw;
    return natural_gradient_step(dist, cinv, samples, shaped, mode, layout, FimPath::factored);
  }
  return natural_gradient_step(dist, cinv, samples, shaped, mode, layout, path);
}

}  // namespace enes
