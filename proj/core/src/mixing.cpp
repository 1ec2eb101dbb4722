#include "enes/mixing.hpp"

#include <algorithm>
#include <cmath>

#include "enes/errors.hpp"

namespace enes {

std::size_t mixing_attempt_cap(std::size_t n, double alpha) {
  const double a = std::max(alpha, 1e-3);
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n) / a)) + n;
}

MixingResult importance_mix(const Population& prev,
                            const SearchDistribution& old_dist,
                            const SearchDistribution& new_dist,
                            double alpha,
                            Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("importance_mix: refresh rate must lie in [0, 1]");
  }
  if (old_dist.dim() != new_dist.dim()) {
    throw InvalidArgument("importance_mix: distributions differ in dimension");
  }
  if (prev.fitness.size() != prev.size() || prev.inherited.size() != prev.size()) {
    throw InvalidArgument("importance_mix: population arrays differ in length");
  }
  const std::size_t n = prev.size();
  const int d = new_dist.dim();

  MixingResult out;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& z = prev.samples[i];
    const double log_ratio = new_dist.log_density(z) - old_dist.log_density(z);
    const double accept = std::min(1.0, (1.0 - alpha) * std::exp(log_ratio));
    if (rng.uniform() < accept) {
      out.retained.push_back(z, prev.fitness[i], true);
      out.retained_from.push_back(i);
    }
  }
  out.n_a = out.retained.size();

  const std::size_t needed = n - out.n_a;
  const std::size_t cap = mixing_attempt_cap(n, alpha);
  out.fresh.reserve(needed);
  while (out.fresh.size() < needed && out.attempts < cap) {
    Eigen::VectorXd z = new_dist.sample(rng.standard_normal(d));
    ++out.attempts;
    const double log_ratio = old_dist.log_density(z) - new_dist.log_density(z);
    const double accept = std::max(alpha, 1.0 - std::exp(log_ratio));
    if (rng.uniform() < accept) out.fresh.push_back(std::move(z));
  }
  if (out.fresh.size() < needed) {
    out.conformance_warning = true;
    while (out.fresh.size() < needed) out.fresh.push_back(new_dist.sample(rng.standard_normal(d)));
  }
  return out;
}

}  // namespace enes
