#include "seastate/trig_regression.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <numbers>

namespace seastate {

namespace {

constexpr double kRankTol = 1e-10;
constexpr int kMaxSubsetOrder = 20;

void check_harmonics(double period, const std::vector<int>& harmonics) {
  const int limit = static_cast<int>(std::floor(period / 2.0 + 1e-9));
  for (int j : harmonics)
    if (j < 1 || j > limit)
      throw std::invalid_argument("trig regression: harmonic " + std::to_string(j) +
                                  " outside 1.." + std::to_string(limit));
}

double basis(const TrigTerm& t, double omega, long n) {
  const double arg = omega * t.harmonic * static_cast<double>(n);
  return t.sine ? std::sin(arg) : std::cos(arg);
}

}  // namespace

std::vector<TrigTerm> design_terms(double period, const std::vector<int>& harmonics) {
  std::vector<TrigTerm> terms;
  for (int j : harmonics) {
    terms.push_back({j, false});
    if (!sine_vanishes(period, j)) terms.push_back({j, true});
  }
  return terms;
}

namespace {

std::vector<TrigTerm> all_terms(double period) {
  std::vector<int> all;
  for (int j = 1; j <= static_cast<int>(std::floor(period / 2.0 + 1e-9)); ++j) all.push_back(j);
  return design_terms(period, all);
}

}  // namespace

int term_count(double period) { return static_cast<int>(all_terms(period).size()); }

std::vector<TrigTerm> leading_terms(double period, int k) {
  if (k < 0) throw std::invalid_argument("trig regression: order must be >= 0");
  const auto available = all_terms(period);
  if (k > static_cast<int>(available.size()))
    throw std::invalid_argument("trig regression: order " + std::to_string(k) + " exceeds the " +
                                std::to_string(available.size()) + " terms available at period " +
                                std::to_string(period));
  return {available.begin(), available.begin() + k};
}

Eigen::MatrixXd term_design_matrix(std::size_t N, double period, const std::vector<TrigTerm>& terms,
                                   bool intercept) {
  if (N == 0) throw std::invalid_argument("design_matrix: N must be >= 1");
  if (!(period > 0.0)) throw std::invalid_argument("design_matrix: period must be > 0");
  if (terms.empty() && !intercept) throw std::invalid_argument("design_matrix: no harmonics and no intercept");
  const int limit = static_cast<int>(std::floor(period / 2.0 + 1e-9));
  for (const auto& t : terms)
    if (t.harmonic < 1 || t.harmonic > limit || (t.sine && sine_vanishes(period, t.harmonic)))
      throw std::invalid_argument("design_matrix: invalid term at harmonic " + std::to_string(t.harmonic));
  const double omega = 2.0 * std::numbers::pi / period;
  const Eigen::Index off = intercept ? 1 : 0;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(N), off + static_cast<Eigen::Index>(terms.size()));
  for (std::size_t i = 0; i < N; ++i) {
    const long n = static_cast<long>(i) + 1;
    const auto r = static_cast<Eigen::Index>(i);
    if (intercept) X(r, 0) = 1.0;
    for (std::size_t c = 0; c < terms.size(); ++c)
      X(r, off + static_cast<Eigen::Index>(c)) = basis(terms[c], omega, n);
  }
  return X;
}

Eigen::MatrixXd design_matrix(std::size_t N, double period, const std::vector<int>& harmonics,
                              bool intercept) {
  if (!(period > 0.0)) throw std::invalid_argument("design_matrix: period must be > 0");
  check_harmonics(period, harmonics);
  return term_design_matrix(N, period, design_terms(period, harmonics), intercept);
}

double TrigRegressionFit::harmonic_part(long n) const {
  const double omega = 2.0 * std::numbers::pi / period;
  double v = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) v += coef[i] * basis(terms[i], omega, n);
  return v;
}

double TrigRegressionFit::evaluate(long n) const { return intercept + harmonic_part(n); }

std::vector<double> TrigRegressionFit::harmonic_curve(std::size_t length) const {
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = harmonic_part(static_cast<long>(i) + 1);
  return out;
}

TrigRegressionFit fit_terms(const TimeSeries& ts, double period, const std::vector<TrigTerm>& terms) {
  const Eigen::MatrixXd full = term_design_matrix(ts.size(), period, terms, true);
  const auto q = full.cols();
  const auto n_obs = static_cast<Eigen::Index>(ts.observed_count());
  if (n_obs <= q)
    throw std::invalid_argument("fit_ols: " + std::to_string(n_obs) + " observations for " + std::to_string(q) +
                                " coefficients");
  Eigen::MatrixXd X(n_obs, q);
  Eigen::VectorXd y(n_obs);
  for (std::size_t i = 0, r = 0; i < ts.size(); ++i) {
    if (!ts.observed(i)) continue;
    X.row(static_cast<Eigen::Index>(r)) = full.row(static_cast<Eigen::Index>(i));
    y(static_cast<Eigen::Index>(r)) = ts.value(i);
    ++r;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
  if (sv(q - 1) <= kRankTol * sv(0))
    throw RankDeficientError("fit_ols: rank-deficient design, smallest singular value " + std::to_string(sv(q - 1)),
                             sv(q - 1));
  const Eigen::VectorXd beta = qr.solve(y);

  TrigRegressionFit fit;
  fit.period = period;
  fit.order = static_cast<int>(terms.size());
  fit.terms = terms;
  fit.intercept = beta(0);
  fit.coef.assign(beta.data() + 1, beta.data() + q);
  std::map<int, std::pair<double, double>> by_harmonic;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    auto& slot = by_harmonic[terms[i].harmonic];
    (terms[i].sine ? slot.second : slot.first) = fit.coef[i];
  }
  for (const auto& [j, cs] : by_harmonic) {
    fit.harmonics.push_back(j);
    fit.cos_coef.push_back(cs.first);
    fit.sin_coef.push_back(cs.second);
  }
  fit.rss = (y - X * beta).squaredNorm();
  fit.n_obs = static_cast<std::size_t>(n_obs);
  fit.n_coefficients = static_cast<int>(q);
  fit.sigma2_hat = fit.rss / static_cast<double>(n_obs);
  const double n = static_cast<double>(n_obs);
  fit.aic = n * std::log(2.0 * std::numbers::pi * fit.sigma2_hat) + n + 2.0 * static_cast<double>(q + 1);
  const Eigen::VectorXd curve = full * beta;
  fit.fitted_curve.assign(curve.data(), curve.data() + curve.size());
  return fit;
}

TrigRegressionFit fit_harmonics(const TimeSeries& ts, double period, const std::vector<int>& harmonics) {
  if (!(period > 0.0)) throw std::invalid_argument("fit_ols: period must be > 0");
  check_harmonics(period, harmonics);
  return fit_terms(ts, period, design_terms(period, harmonics));
}

TrigRegressionFit fit_pairs(const TimeSeries& ts, double period, int k) {
  if (k < 0) throw std::invalid_argument("fit_pairs: k must be >= 0");
  std::vector<int> harmonics(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) harmonics[static_cast<std::size_t>(j - 1)] = j;
  return fit_harmonics(ts, period, harmonics);
}

TrigRegressionFit fit_ols(const TimeSeries& ts, double period, int k) {
  if (!(period > 0.0)) throw std::invalid_argument("fit_ols: period must be > 0");
  return fit_terms(ts, period, leading_terms(period, k));
}

SubsetSelection subset_select(const TimeSeries& ts, double period, int max_order) {
  if (max_order < 0) throw std::invalid_argument("subset_select: max_order must be >= 0");
  if (max_order > kMaxSubsetOrder)
    throw std::invalid_argument("subset_select: 2^" + std::to_string(max_order) +
                                " subsets exceeds the 2^20 enumeration guard");
  if (!(period > 0.0)) throw std::invalid_argument("subset_select: period must be > 0");
  const auto pool = leading_terms(period, max_order);

  SubsetSelection out;
  out.by_size.resize(static_cast<std::size_t>(max_order) + 1);
  std::vector<std::optional<TrigRegressionFit>> best_by_size(out.by_size.size());
  for (std::size_t r = 0; r < out.by_size.size(); ++r) out.by_size[r].size = static_cast<int>(r);

  const std::uint32_t count = std::uint32_t{1} << max_order;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::vector<TrigTerm> terms;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (std::uint32_t{1} << i)) terms.push_back(pool[i]);
    const auto r = static_cast<std::size_t>(std::popcount(mask));
    ++out.by_size[r].candidates;
    try {
      auto fit = fit_terms(ts, period, terms);
      if (!best_by_size[r] || fit.aic < best_by_size[r]->aic) best_by_size[r] = std::move(fit);
    } catch (const RankDeficientError&) {
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < best_by_size.size(); ++r) {
    if (!best_by_size[r]) continue;
    auto& s = out.by_size[r];
    s.fitted = true;
    s.aic = best_by_size[r]->aic;
    s.sigma2_hat = best_by_size[r]->sigma2_hat;
    s.terms = best_by_size[r]->terms;
    if (!best || s.aic < best_by_size[*best]->aic) best = r;
  }
  if (!best) throw std::runtime_error("subset_select: no subset could be fitted");
  out.best = *best_by_size[*best];
  return out;
}

TwoStepResult two_step_fit(const TimeSeries& ts, double long_period, int k, const ModelSpec& spec,
                           const FitOptions& options) {
  if (k < 1) throw std::invalid_argument("two_step_fit: k must be >= 1");
  auto regression = fit_pairs(ts, long_period, k);
  auto residual = subtract_series(ts, regression.fitted_curve);
  auto report = fit_mle(spec, residual, options);
  const double aic_prime = report.aic + two_step_penalty(k);
  return {std::move(regression), std::move(residual), std::move(report), aic_prime};
}

}  // namespace seastate
