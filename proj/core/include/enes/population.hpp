#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace enes {

/// Evaluated individuals stored column-wise: samples[i] has raw fitness
/// fitness[i]; inherited[i] marks individuals carried over by importance mixing.
struct Population {
  std::vector<Eigen::VectorXd> samples;
  std::vector<double> fitness;
  std::vector<bool> inherited;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  void push_back(Eigen::VectorXd z, double f, bool from_previous) {
    samples.push_back(std::move(z));
    fitness.push_back(f);
    inherited.push_back(from_previous);
  }
};

}  // namespace enes
