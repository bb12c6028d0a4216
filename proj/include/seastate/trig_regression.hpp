#ifndef SEASTATE_TRIG_REGRESSION_HPP
#define SEASTATE_TRIG_REGRESSION_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "seastate/components.hpp"
#include "seastate/estimation.hpp"
#include "seastate/timeseries.hpp"

namespace seastate {

/// Thrown when the trigonometric design is numerically rank deficient.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, double singular_value)
      : std::runtime_error(what), singular_value_(singular_value) {}
  double singular_value() const { return singular_value_; }

 private:
  double singular_value_;
};

/// Columns: optional constant, then cos(w j n) and sin(w j n) for each listed
/// harmonic j, n = 1..N, w = 2 pi / p. A sine column that vanishes
/// identically (j = p/2) is omitted.
Eigen::MatrixXd design_matrix(std::size_t N, double period, const std::vector<int>& harmonics,
                              bool intercept = true);

/// The (harmonic, sine?) layout of design_matrix columns after the intercept.
std::vector<TrigTerm> design_terms(double period, const std::vector<int>& harmonics);

/// The first k terms of the sequence cos 1, sin 1, cos 2, sin 2, ... with
/// vanishing sines skipped. k may not exceed the number of such terms.
std::vector<TrigTerm> leading_terms(double period, int k);

/// Number of non-vanishing terms over harmonics 1..floor(p/2) (p - 1 for
/// integer p).
int term_count(double period);

/// Design for an explicit term list (harmonic 0 is not allowed here).
Eigen::MatrixXd term_design_matrix(std::size_t N, double period, const std::vector<TrigTerm>& terms,
                                   bool intercept = true);

struct TrigRegressionFit {
  double period = 0.0;
  /// Number of trigonometric terms (coefficients besides the intercept).
  int order = 0;
  std::vector<TrigTerm> terms;
  std::vector<double> coef;  // per term
  double intercept = 0.0;
  /// Distinct harmonics present, increasing, with per-harmonic cosine and
  /// sine coefficients (0 where the term is absent).
  std::vector<int> harmonics;
  std::vector<double> cos_coef;
  std::vector<double> sin_coef;
  double rss = 0.0;
  double sigma2_hat = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;
  int n_coefficients = 0;
  std::vector<double> fitted_curve;  // n = 1..N

  /// intercept + harmonic part at time n (any n >= 1).
  double evaluate(long n) const;
  /// Harmonic part only (no intercept) at time n.
  double harmonic_part(long n) const;
  /// harmonic_part(n) for n = 1..length.
  std::vector<double> harmonic_curve(std::size_t length) const;
};

/// Least squares on the observed points for an explicit term list.
TrigRegressionFit fit_terms(const TimeSeries& ts, double period, const std::vector<TrigTerm>& terms);

/// Both terms of every listed harmonic (sine dropped where it vanishes).
TrigRegressionFit fit_harmonics(const TimeSeries& ts, double period, const std::vector<int>& harmonics);

/// Harmonics 1..k with both terms each: 2k + 1 coefficients.
TrigRegressionFit fit_pairs(const TimeSeries& ts, double period, int k);

/// Order-k fit: the first k terms of leading_terms.
TrigRegressionFit fit_ols(const TimeSeries& ts, double period, int k);

struct SubsetSizeSummary {
  int size = 0;
  double sigma2_hat = 0.0;
  double aic = 0.0;
  std::size_t candidates = 0;
  /// The minimum-AIC subset of this size; empty when none could be fitted.
  std::vector<TrigTerm> terms;
  bool fitted = false;
};

struct SubsetSelection {
  TrigRegressionFit best;
  std::vector<SubsetSizeSummary> by_size;  // sizes 0..max_order
};

/// Exhaustive search over all subsets of leading_terms(period, max_order).
SubsetSelection subset_select(const TimeSeries& ts, double period, int max_order);

struct TwoStepResult {
  TrigRegressionFit regression;
  TimeSeries residual;
  FitReport report;
  /// report.aic + 2 (2k + 1).
  double aic_prime = 0.0;
};

/// Penalty the regression stage adds to the stage-2 AIC.
constexpr double two_step_penalty(int k) { return 2.0 * (2.0 * k + 1.0); }

/// Regress out harmonics 1..k of the long period (2k + 1 coefficients),
/// then fit `spec` to the residual.
TwoStepResult two_step_fit(const TimeSeries& ts, double long_period, int k, const ModelSpec& spec,
                           const FitOptions& options = {});

}  // namespace seastate

#endif  // SEASTATE_TRIG_REGRESSION_HPP
