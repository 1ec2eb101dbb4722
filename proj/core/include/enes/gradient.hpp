#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "enes/distribution.hpp"

namespace enes {

/// Rank-based utilities: values[i] is the shaped fitness of individual i and
/// ranks[i] its rank (0 = worst, n - 1 = best).
struct ShapedFitness {
  Eigen::VectorXd values;
  std::vector<int> ranks;
};

/// Maps raw fitnesses (higher is better) to utilities in [0, 1]: with relative
/// rank i = rank / (n - 1), the utility is 2i - 1 above the median and 0 at or
/// below it. Ties are ranked by input index. Throws InvalidFitness on NaN.
ShapedFitness shape_fitness(std::span<const double> raw);

/// User-replaceable shaping hook; must be monotone in the raw fitness.
using ShapingFunction = std::function<ShapedFitness(std::span<const double>)>;

enum class BaselineMode { uniform, parameter_specific, block };

/// How F_k⁻ g^k is applied.
///
/// recurrence: stream F_k⁻ from FimInverseSweep (built from C⁻) and multiply.
/// factored:   use F_k⁻ = Ã_kᵀ diag(½, 1, ..., 1) Ã_k, Ã_k the trailing block of A
///             from row k, applied to whitened samples; never forms C⁻.
/// automatic:  recurrence, redone with factored when the recurrence breaks
///             down or its Schur residual exceeds kRecurrenceTolerance.
///
/// Both give the same result in exact arithmetic. The recurrence loses
/// precision roughly in proportion to cond(C).
enum class FimPath { recurrence, factored, automatic };

inline constexpr double kRecurrenceTolerance = 1e-6;

std::string_view to_string(BaselineMode mode);
std::string_view to_string(FimPath path);
FimPath parse_fim_path(std::string_view name);
/// Accepts "uniform", "parameter_specific" (or "parameter-specific"), "block".
BaselineMode parse_baseline_mode(std::string_view name);

/// (1/n) Σ f_i g(z_i|θ).
Eigen::VectorXd vanilla_gradient(const SearchDistribution& dist,
                                 std::span<const Eigen::VectorXd> samples,
                                 std::span<const double> fitness,
                                 const ThetaLayout& layout);

struct NaturalGradient {
  /// F⁻ ∇J with the chosen baseline, normalized by 1/n; length d_s.
  Eigen::VectorXd delta;
  /// block: d + 1 entries indexed by group; uniform: 1 entry;
  /// parameter_specific: d_s entries in layout order.
  Eigen::VectorXd baselines;
  /// Set when some Σ‖q‖² vanished, i.e. every sample sits at the mean.
  bool degenerate = false;
  /// recurrence or factored; never automatic.
  FimPath path_used = FimPath::recurrence;
  /// FimInverseSweep::schur_residual of the recurrence pass, 0 if none ran.
  double schur_residual = 0.0;
};

/// Natural-gradient estimate from a population, computed block by block with
/// the exact FIM inverse streamed from FimInverseSweep. The full gradient
/// matrix G is never stored; per block only F_k⁻G^k (size (d+1-k) x n) is.
///
/// `cinv` must be precision_matrix(dist.chol()); the overload without it
/// computes it. With FimPath::recurrence a breakdown propagates as
/// NumericalBreakdown.
NaturalGradient natural_gradient_step(const SearchDistribution& dist,
                                      const Eigen::MatrixXd& cinv,
                                      std::span<const Eigen::VectorXd> samples,
                                      const ShapedFitness& shaped,
                                      BaselineMode mode,
                                      const ThetaLayout& layout,
                                      FimPath path = FimPath::recurrence);

NaturalGradient natural_gradient_step(const SearchDistribution& dist,
                                      std::span<const Eigen::VectorXd> samples,
                                      const ShapedFitness& shaped,
                                      BaselineMode mode,
                                      const ThetaLayout& layout,
                                      FimPath path = FimPath::recurrence);

}  // namespace enes
