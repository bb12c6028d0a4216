#ifndef SEASTATE_OPTIMIZER_HPP
#define SEASTATE_OPTIMIZER_HPP

#include <functional>
#include <span>
#include <vector>

namespace seastate {

enum class OptimizerMethod { kNelderMead, kQuasiNewton };

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::kNelderMead;
  int max_evaluations = 2000;
  /// Nelder-Mead: stop when max f - min f over the simplex falls below this.
  /// Quasi-Newton: stop when the objective decrease per iteration does.
  double tolerance = 1e-8;
  int max_restarts = 3;
  double initial_step = 1.0;
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `f` from `start`. Deterministic: no randomness anywhere.
/// Non-finite objective values are treated as +infinity.
OptimizerResult minimize(const Objective& f, std::vector<double> start,
                         const OptimizerConfig& config = {});

}  // namespace seastate

#endif  // SEASTATE_OPTIMIZER_HPP
