#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "seastate/optimizer.hpp"
#include "seastate/parameters.hpp"

using namespace seastate;

namespace {

/// Largest modulus among roots of z^m - a_1 z^{m-1} - ... - a_m, from the
/// eigenvalues of the companion matrix.
double max_root_modulus(const std::vector<double>& a) {
  const auto m = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) C(0, j) = a[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < m; ++i) C(i, i - 1) = 1.0;
  return C.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("PARCOR mapping by hand") {
  // Order 2: a_2 = phi_2, a_1 = phi_1 (1 - phi_2).
  const auto a = parcor_to_ar(std::vector<double>{0.5, -0.4});
  REQUIRE(a.size() == 2);
  CHECK(a[0] == doctest::Approx(0.5 * 1.4));
  CHECK(a[1] == doctest::Approx(-0.4));
  CHECK(parcor_to_ar(std::vector<double>{0.8}) == std::vector<double>{0.8});
  CHECK(parcor_to_ar(std::vector<double>{}).empty());
}

TEST_CASE("stationarity check") {
  CHECK(is_stationary(std::vector<double>{0.5}));
  CHECK_FALSE(is_stationary(std::vector<double>{1.2}));
  CHECK_FALSE(is_stationary(std::vector<double>{1.0}));
  CHECK(is_stationary(std::vector<double>{1.2, -0.5}));
  CHECK_FALSE(is_stationary(std::vector<double>{0.5, 0.6}));
}

TEST_CASE("property: mapped AR polynomials are stationary") {
  std::mt19937_64 rng(101);
  // Companion eigenvalues lose accuracy for tight root clusters, which wide
  // raw spreads produce; this spread keeps the oracle itself reliable.
  std::normal_distribution<double> g(0.0, 1.5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 1 + rng() % 15;
    std::vector<double> raw(m);
    for (auto& r : raw) r = g(rng);
    const ParamTransform t(0, m);
    const auto a = t.to_model(raw).ar;
    CHECK(max_root_modulus(a) <= 1.0 - 1e-8);
    CHECK(is_stationary(a));
  }
}

TEST_CASE("mapped coefficients are the Levinson output damped by r^j") {
  // Saturated partials put an undamped root within ~1e-61 of the circle.
  const std::vector<double> raw(15, 100.0);
  const auto a = ParamTransform(0, 15).to_model(raw).ar;
  const auto plain = parcor_to_ar(std::vector<double>(15, std::tanh(ParamTransform::kMaxParcorRaw)));
  double scale = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    scale *= ParamTransform::kRootRadius;
    CHECK(a[j] == doctest::Approx(plain[j] * scale).epsilon(1e-15));
  }
}

TEST_CASE("property: raw to model to raw round trip") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> var_raw(-20.0, 10.0);
  // The backward recursion amplifies rounding by about 1 / (1 - phi^2) per
  // stage, so near-unit partials at high order cannot round-trip to 1e-9.
  std::uniform_real_distribution<double> ar_raw(-1.5, 1.5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t nv = rng() % 5, m = rng() % 8;
    std::vector<double> raw(nv + m);
    for (std::size_t i = 0; i < nv; ++i) raw[i] = var_raw(rng);
    for (std::size_t i = nv; i < nv + m; ++i) raw[i] = ar_raw(rng);
    const ParamTransform t(nv, m);
    const auto back = t.to_raw(t.to_model(raw));
    REQUIRE(back.size() == raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) CHECK(std::abs(back[i] - raw[i]) < 1e-9);
  }
}

TEST_CASE("property: AR to PARCOR inverts PARCOR to AR") {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> phi(1 + rng() % 12);
    for (auto& p : phi) p = u(rng);
    const auto back = ar_to_parcor(parcor_to_ar(phi));
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(std::abs(back[i] - phi[i]) < 1e-9);
  }
}

TEST_CASE("raw values are clamped") {
  const ParamTransform t(1, 1);
  const auto v = t.to_model(std::vector<double>{100.0, 100.0});
  CHECK(v.variance_ratios[0] == doctest::Approx(std::exp(ParamTransform::kMaxLogRatio)));
  CHECK(std::abs(v.ar[0]) < 1.0);
  CHECK_THROWS(t.to_model(std::vector<double>{0.0}));
}

TEST_CASE("optimizer minimizes a shifted quadratic") {
  for (auto method : {OptimizerMethod::kNelderMead, OptimizerMethod::kQuasiNewton}) {
    OptimizerConfig cfg;
    cfg.method = method;
    cfg.max_evaluations = 5000;
    cfg.tolerance = 1e-14;
    const auto res = minimize(
        [](std::span<const double> x) {
          return (x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 2.0) * (x[1] + 2.0) + 0.5;
        },
        {0.0, 0.0}, cfg);
    CHECK(res.value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res.x[1] == doctest::Approx(-2.0).epsilon(1e-3));
  }
}

TEST_CASE("optimizer is deterministic and treats NaN as infinity") {
  auto f = [](std::span<const double> x) {
    if (x[0] < -1.0) return std::nan("");
    return std::pow(x[0] - 2.0, 4) + std::cosh(x[1]);
  };
  const auto a = minimize(f, {0.0, 0.5});
  const auto b = minimize(f, {0.0, 0.5});
  CHECK(a.x == b.x);
  CHECK(a.value == b.value);
  CHECK(a.evaluations == b.evaluations);
  CHECK(std::isfinite(a.value));
}

TEST_CASE("optimizer reports non-convergence without throwing") {
  OptimizerConfig cfg;
  cfg.max_evaluations = 10;
  cfg.max_restarts = 0;
  const auto res = minimize([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; },
                            {5.0, 5.0}, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.evaluations <= 12);
}
