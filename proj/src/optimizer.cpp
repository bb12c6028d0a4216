#include "seastate/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace seastate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CountedObjective {
 public:
  CountedObjective(const Objective& f, int budget) : f_(f), budget_(budget) {}

  double operator()(const std::vector<double>& x) {
    ++evaluations_;
    const double v = f_(x);
    return std::isfinite(v) ? v : kInf;
  }
  bool exhausted() const { return evaluations_ >= budget_; }
  int evaluations() const { return evaluations_; }

 private:
  const Objective& f_;
  int budget_;
  int evaluations_ = 0;
};

struct NmOutcome {
  std::vector<double> x;
  double value;
  bool converged;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
NmOutcome nelder_mead(CountedObjective& f, const std::vector<double>& start, double fstart,
                      double step, double tol) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1, fstart);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += step;
    values[i + 1] = f(simplex[i + 1]);
  }
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  auto point = [&](double t, const std::vector<double>& worst, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
    const bool flat = std::isfinite(values[worst]) && values[worst] - values[best] < tol;
    if (flat || diameter < 1e-10) return {simplex[best], values[best], true};
    if (f.exhausted()) return {simplex[best], values[best], false};

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    point(-1.0, simplex[worst], trial);
    const double fr = f(trial);
    if (fr < values[best]) {
      point(-2.0, simplex[worst], trial2);
      const double fe = f(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    point(outside ? -0.5 : 0.5, simplex[worst], trial2);
    const double fc = f(trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k)
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      values[i] = f(simplex[i]);
    }
  }
}

OptimizerResult quasi_newton(CountedObjective& f, std::vector<double> x, double fx,
                             const OptimizerConfig& config) {
  const auto n = static_cast<Eigen::Index>(x.size());
  auto gradient = [&](const std::vector<double>& at, double fat) {
    Eigen::VectorXd g(n);
    std::vector<double> probe = at;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(at[i]));
      probe[i] = at[i] + h;
      const double fp = f(probe);
      probe[i] = at[i] - h;
      const double fm = f(probe);
      probe[i] = at[i];
      g(i) = std::isfinite(fp) && std::isfinite(fm) ? (fp - fm) / (2 * h)
                                                    : (std::isfinite(fp) ? (fp - fat) / h : 0.0);
    }
    return g;
  };
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = gradient(x, fx);
  bool converged = false;
  while (!f.exhausted()) {
    Eigen::VectorXd dir = -Hinv * g;
    if (dir.dot(g) >= 0) {
      Hinv.setIdentity();
      dir = -g;
    }
    double t = std::min(1.0, config.initial_step / std::max(1e-12, dir.cwiseAbs().maxCoeff()));
    std::vector<double> xn(x.size());
    double fn = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 40 && !f.exhausted(); ++ls) {
      for (Eigen::Index i = 0; i < n; ++i) xn[i] = x[i] + t * dir(i);
      fn = f(xn);
      if (fn <= fx + 1e-4 * t * g.dot(dir)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      converged = g.norm() < 1e-4 || t < 1e-12;
      break;
    }
    const double decrease = fx - fn;
    const Eigen::VectorXd gn = gradient(xn, fn);
    Eigen::VectorXd s(n), yv = gn - g;
    for (Eigen::Index i = 0; i < n; ++i) s(i) = xn[i] - x[i];
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      Hinv = (I - rho * s * yv.transpose()) * Hinv * (I - rho * yv * s.transpose()) +
             rho * s * s.transpose();
    }
    x = xn;
    fx = fn;
    g = gn;
    if (decrease < config.tolerance) {
      converged = true;
      break;
    }
  }
  return {x, fx, f.evaluations(), converged};
}

}  // namespace

OptimizerResult minimize(const Objective& objective, std::vector<double> start,
                         const OptimizerConfig& config) {
  CountedObjective f(objective, config.max_evaluations);
  double fstart = f(start);
  if (start.empty()) return {start, fstart, f.evaluations(), true};

  if (config.method == OptimizerMethod::kQuasiNewton)
    return quasi_newton(f, std::move(start), fstart, config);

  NmOutcome best{start, fstart, false};
  double step = config.initial_step;
  for (int attempt = 0; attempt <= config.max_restarts; ++attempt) {
    const double before = best.value;
    NmOutcome run = nelder_mead(f, best.x, best.value, step, config.tolerance);
    const bool improved = run.value < best.value;
    if (run.value <= best.value) best = run;
    best.converged = run.converged;
    if (!run.converged || f.exhausted()) break;
    // A restart that no longer moves the optimum confirms convergence.
    if (attempt > 0 && !(before - run.value > config.tolerance)) break;
    if (!improved && attempt > 0) break;
    step = std::max(0.1, step * 0.5);
  }
  return {best.x, best.value, f.evaluations(), best.converged};
}

}  // namespace seastate
