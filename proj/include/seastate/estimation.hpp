#ifndef SEASTATE_ESTIMATION_HPP
#define SEASTATE_ESTIMATION_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seastate/components.hpp"
#include "seastate/optimizer.hpp"
#include "seastate/parameters.hpp"
#include "seastate/timeseries.hpp"

namespace seastate {

/// 1 if m > 0, else 0.
constexpr int id(int m) { return m > 0 ? 1 : 0; }

enum class ParamCountRule {
  /// Free noise variances + sigma2 + AR coefficients.
  kVariancesAndAr,
  /// id(m1) + id(m2) + id(m3) + 1 + dim(x_n). Kept for comparison only.
  kStateDimension,
};

int count_params(const ModelSpec& spec, ParamCountRule rule = ParamCountRule::kVariancesAndAr);

/// Size of the state vector the spec assembles to.
Eigen::Index state_dimension(const ModelSpec& spec);

struct ParameterValue {
  std::string name;
  double value;

  bool operator==(const ParameterValue&) const = default;
};

struct FitOptions {
  OptimizerConfig optimizer;
  ParamCountRule count_rule = ParamCountRule::kVariancesAndAr;
  /// Initial state variance, relative to the largest noise variance.
  double prior_scale = 1e7;
};

struct FitReport {
  ModelSpec spec;
  std::vector<ParameterValue> params;  // absolute variances, a_j, sigma2
  double log_likelihood = 0.0;
  double aic = 0.0;
  int n_params = 0;
  std::size_t n_obs = 0;
  bool converged = false;
  int iterations = 0;
  double runtime_seconds = 0.0;
  /// Diagonal of V0 used by the fitted model.
  double prior_variance = 0.0;

  double param(const std::string& name) const;
  std::optional<double> find_param(const std::string& name) const;
};

/// Free parameters of a spec in model order, excluding sigma2.
struct ParameterLayout {
  std::vector<std::string> variance_slots;
  int ar_order = 0;
};
ParameterLayout parameter_layout(const ModelSpec& spec);

/// Builds the model for given absolute parameter values. `horizon` extends
/// the time range over which H(n) must be defined (one-factor curves).
ComposedModel build_model(const ModelSpec& spec, const std::vector<ParameterValue>& params,
                          double prior_variance, std::size_t n_total);

/// Model of a completed fit, defined for n = 1..n_total.
ComposedModel fitted_model(const FitReport& report, std::size_t n_total);

/// Concentrated log-likelihood at raw optimizer coordinates: sigma2 set to
/// its closed-form maximizer given the variance ratios and AR partials.
struct ConcentratedLikelihood {
  double log_likelihood;
  double sigma2;
  double prior_variance;
};
ConcentratedLikelihood concentrated_loglik(const ModelSpec& spec, const TimeSeries& ts,
                                           std::span<const double> raw,
                                           const FitOptions& options = {});

/// Maximum-likelihood fit. Optimizer non-convergence is reported through
/// `converged`; a non-finite likelihood at the start point throws.
FitReport fit_mle(const ModelSpec& spec, const TimeSeries& ts, const FitOptions& options = {});

struct SweepRow {
  ModelSpec spec;
  std::optional<FitReport> report;
  std::string error;
  bool is_min = false;

  bool ok() const { return report.has_value(); }
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::optional<std::size_t> best;
};

/// Worker count from SEASTATE_THREADS, defaulting to 1.
std::size_t sweep_threads_from_env();

/// Fits every grid point. Failed rows keep their error text; the table is
/// identical for any thread count. The minimum-AIC row is flagged, ties going
/// to fewer parameters and then the smaller order tuple.
SweepTable sweep(const std::vector<ModelSpec>& grid, const TimeSeries& ts,
                 const FitOptions& options = {}, std::size_t threads = 0);

}  // namespace seastate

#endif  // SEASTATE_ESTIMATION_HPP
