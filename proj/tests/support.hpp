#ifndef SEASTATE_TESTS_SUPPORT_HPP
#define SEASTATE_TESTS_SUPPORT_HPP

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "seastate/state_space.hpp"
#include "seastate/timeseries.hpp"

namespace support {

/// Small random model with a proper prior and well-scaled noises.
inline seastate::StateSpaceModel<double> random_model(std::mt19937_64& rng, long d, long k) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  seastate::StateSpaceModel<double> m;
  m.F = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return g(rng); });
  const double radius = m.F.eigenvalues().cwiseAbs().maxCoeff();
  m.F *= std::uniform_real_distribution<double>(0.3, 1.1)(rng) / std::max(radius, 1e-9);
  m.G = Eigen::MatrixXd::NullaryExpr(d, k, [&] { return g(rng); });
  m.q = Eigen::VectorXd::NullaryExpr(k, [&] { return u(rng); });
  m.r = u(rng);
  m.x0 = Eigen::VectorXd::NullaryExpr(d, [&] { return g(rng); });
  const Eigen::MatrixXd L = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return g(rng); });
  m.V0 = L * L.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd H0 = Eigen::MatrixXd::NullaryExpr(3, d, [&] { return g(rng); });
  m.H = [H0](long n, Eigen::Ref<Eigen::RowVectorXd> out) { out = H0.row(n % 3); };
  return m;
}

/// Simulates y from the model and masks up to `max_missing` of the points.
inline seastate::TimeSeries simulate(const seastate::StateSpaceModel<double>& m, std::size_t N,
                                     double max_missing, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::LLT<Eigen::MatrixXd> v0(m.V0);
  Eigen::VectorXd x = m.x0 + v0.matrixL() * Eigen::VectorXd::NullaryExpr(m.dim(), [&] { return g(rng); });
  std::vector<double> y(N);
  std::vector<bool> mask(N, true);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double frac = u(rng) * max_missing;
  for (std::size_t i = 0; i < N; ++i) {
    const Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(m.noise_dim(), [&] { return g(rng); });
    x = m.F * x + m.G * (m.q.cwiseSqrt().asDiagonal() * v);
    y[i] = m.row(static_cast<long>(i) + 1).dot(x) + std::sqrt(m.r) * g(rng);
    if (u(rng) < frac) mask[i] = false;
  }
  mask[0] = true;
  return seastate::TimeSeries(y, mask);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace support

#endif  // SEASTATE_TESTS_SUPPORT_HPP
