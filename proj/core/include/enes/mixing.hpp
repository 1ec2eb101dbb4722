#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "enes/distribution.hpp"
#include "enes/population.hpp"
#include "enes/rng.hpp"

namespace enes {

inline constexpr double kDefaultRefreshRate = 0.01;

struct MixingResult {
  /// Individuals kept from the previous generation, fitness carried as-is.
  Population retained;
  /// Index of each retained individual in the previous population.
  std::vector<std::size_t> retained_from;
  /// Newly accepted samples from the new distribution, not yet evaluated.
  std::vector<Eigen::VectorXd> fresh;
  std::size_t n_a = 0;
  /// Candidates drawn in step two (accepted or not).
  std::size_t attempts = 0;
  /// Step two hit its attempt cap and the remaining slots were filled with
  /// unconditional draws, so the population no longer exactly follows new_dist.
  bool conformance_warning = false;
};

/// Step-two attempt cap: ceil(n / max(alpha, 1e-3)) + n.
std::size_t mixing_attempt_cap(std::size_t n, double alpha);

/// Reuses individuals of `prev` (drawn from old_dist) so that retained + fresh
/// is a sample of new_dist of the same size, with an expected fraction of at
/// least `alpha` fresh individuals.
///
/// Step one keeps each previous individual with probability
/// min{1, (1 - alpha) p_new(z) / p_old(z)}; step two draws from new_dist and
/// accepts with probability max{alpha, 1 - p_old(z) / p_new(z)} until the
/// population is full. RNG use: one uniform per previous individual, in order;
/// then per candidate d normals followed by one uniform.
MixingResult importance_mix(const Population& prev,
                            const SearchDistribution& old_dist,
                            const SearchDistribution& new_dist,
                            double alpha,
                            Rng& rng);

}  // namespace enes
