#ifndef SEASTATE_DECOMPOSITION_HPP
#define SEASTATE_DECOMPOSITION_HPP

#include <string>
#include <vector>

#include "seastate/components.hpp"
#include "seastate/state_space.hpp"
#include "seastate/timeseries.hpp"

namespace seastate {

struct ComponentSeries {
  std::string name;
  std::vector<double> values;  // H_block(n) x_{n|N}, n = 1..N
};

struct DecompositionResult {
  std::vector<ComponentSeries> components;  // in block order
  /// y_n - H(n) x_{n|N} at observed n, NaN where missing.
  std::vector<double> noise;
  std::vector<double> smoothed_signal;  // H(n) x_{n|N}
  double log_likelihood = 0.0;
  bool used_pseudo_inverse = false;

  const ComponentSeries* find(const std::string& name) const;
};

/// Filters and smooths `ts` under `composed`, then splits the smoothed signal
/// into per-block contributions.
DecompositionResult decompose(const ComposedModel& composed, const TimeSeries& ts);

}  // namespace seastate

#endif  // SEASTATE_DECOMPOSITION_HPP
