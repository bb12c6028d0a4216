#include "seastate/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace seastate {

namespace {

std::string trig_name(std::size_t index) { return "trig_" + std::to_string(index + 1); }

bool has_trig_block(const TrigBlockSpec& t) { return t.order > 0 || t.include_level; }

template <typename VarianceOf>
std::vector<ComponentBlock> build_blocks(const ModelSpec& spec, VarianceOf&& variance,
                                         std::span<const double> ar, std::size_t n_total) {
  std::vector<ComponentBlock> blocks;
  if (spec.trend_order > 0) blocks.push_back(build_trend(spec.trend_order, variance("tau2_trend")));
  if (spec.seasonal_order > 0)
    blocks.push_back(build_dummy_seasonal(spec.seasonal_period, spec.seasonal_variant,
                                          variance("tau2_seasonal")));
  if (spec.ar_order > 0) blocks.push_back(build_ar(ar, variance("tau2_ar")));
  for (std::size_t b = 0; b < spec.trig.size(); ++b) {
    const auto& t = spec.trig[b];
    if (!has_trig_block(t)) continue;
    const std::string name = trig_name(b);
    const double tau2 = t.dynamics == TrigDynamics::kRandomWalk ? variance("tau2_" + name) : 0.0;
    blocks.push_back(build_trig_seasonal(t, tau2, name));
  }
  if (spec.one_factor)
    blocks.push_back(build_one_factor(spec.one_factor->curve, n_total, variance("tau2_one_factor")));
  return blocks;
}

}  // namespace

ParameterLayout parameter_layout(const ModelSpec& spec) {
  ParameterLayout out;
  if (spec.trend_order > 0) out.variance_slots.push_back("tau2_trend");
  if (spec.seasonal_order > 0) out.variance_slots.push_back("tau2_seasonal");
  if (spec.ar_order > 0) out.variance_slots.push_back("tau2_ar");
  for (std::size_t b = 0; b < spec.trig.size(); ++b) {
    const auto& t = spec.trig[b];
    if (has_trig_block(t) && t.dynamics == TrigDynamics::kRandomWalk)
      out.variance_slots.push_back("tau2_" + trig_name(b));
  }
  if (spec.one_factor) out.variance_slots.push_back("tau2_one_factor");
  out.ar_order = spec.ar_order;
  return out;
}

Eigen::Index state_dimension(const ModelSpec& spec) {
  Eigen::Index d = spec.trend_order + spec.ar_order;
  if (spec.seasonal_order > 0)
    d += spec.seasonal_variant == SeasonalVariant::kSumForm ? spec.seasonal_period - 1
                                                            : spec.seasonal_period;
  for (const auto& t : spec.trig)
    if (has_trig_block(t)) d += static_cast<Eigen::Index>(trig_terms(t).size());
  if (spec.one_factor) d += 1;
  return d;
}

int count_params(const ModelSpec& spec, ParamCountRule rule) {
  if (rule == ParamCountRule::kStateDimension)
    return id(spec.trend_order) + id(spec.seasonal_order) + id(spec.ar_order) + 1 +
           static_cast<int>(state_dimension(spec));
  const auto layout = parameter_layout(spec);
  return static_cast<int>(layout.variance_slots.size()) + 1 + spec.ar_order;
}

std::optional<double> FitReport::find_param(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return p.value;
  return std::nullopt;
}

double FitReport::param(const std::string& name) const {
  if (auto v = find_param(name)) return *v;
  throw std::out_of_range("fit report: no parameter '" + name + "'");
}

ComposedModel build_model(const ModelSpec& spec, const std::vector<ParameterValue>& params,
                          double prior_variance, std::size_t n_total) {
  spec.validate();
  auto lookup = [&](const std::string& name) {
    for (const auto& p : params)
      if (p.name == name) return p.value;
    throw std::invalid_argument("build_model: missing parameter '" + name + "'");
  };
  std::vector<double> ar;
  for (int j = 1; j <= spec.ar_order; ++j) ar.push_back(lookup("a_" + std::to_string(j)));
  return compose(build_blocks(spec, lookup, ar, n_total), lookup("sigma2"), prior_variance);
}

ComposedModel fitted_model(const FitReport& report, std::size_t n_total) {
  return build_model(report.spec, report.params, report.prior_variance, n_total);
}

ConcentratedLikelihood concentrated_loglik(const ModelSpec& spec, const TimeSeries& ts,
                                           std::span<const double> raw,
                                           const FitOptions& options) {
  const auto layout = parameter_layout(spec);
  const ParamTransform transform(layout.variance_slots.size(),
                                 static_cast<std::size_t>(layout.ar_order));
  const auto values = transform.to_model(raw);
  double max_ratio = 1.0;
  for (double r : values.variance_ratios) max_ratio = std::max(max_ratio, r);
  const double prior_scaled = options.prior_scale * max_ratio;

  auto ratio = [&](const std::string& name) {
    for (std::size_t i = 0; i < layout.variance_slots.size(); ++i)
      if (layout.variance_slots[i] == name) return values.variance_ratios[i];
    throw std::logic_error("concentrated_loglik: unknown slot " + name);
  };
  const auto composed =
      compose(build_blocks(spec, ratio, values.ar, ts.size()), 1.0, prior_scaled);
  const auto terms = kalman_loglik(composed.model, ts);
  const double n = static_cast<double>(terms.n_obs);
  const double sigma2 = terms.sum_sq / n;
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw NumericalError("concentrated likelihood: degenerate scale estimate",
                         static_cast<long>(ts.size()));
  const double ll =
      -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma2) + terms.sum_log_r + n);
  return {ll, sigma2, prior_scaled * sigma2};
}

FitReport fit_mle(const ModelSpec& spec, const TimeSeries& ts, const FitOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  spec.validate();
  const auto dim = state_dimension(spec);
  if (ts.observed_count() < static_cast<std::size_t>(std::max<Eigen::Index>(dim, 1)))
    throw std::invalid_argument("fit_mle: fewer observed points (" +
                                std::to_string(ts.observed_count()) +
                                ") than state dimension (" + std::to_string(dim) + ")");
  const auto layout = parameter_layout(spec);
  const std::size_t n_raw = layout.variance_slots.size() + static_cast<std::size_t>(layout.ar_order);

  auto objective = [&](std::span<const double> raw) {
    try {
      return -concentrated_loglik(spec, ts, raw, options).log_likelihood;
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<double> start(n_raw, 0.0);
  if (!std::isfinite(objective(start)))
    throw std::runtime_error("fit_mle: likelihood not finite at the start point for " +
                             spec.describe());
  const auto opt = minimize(objective, start, options.optimizer);
  const auto at = concentrated_loglik(spec, ts, opt.x, options);

  const ParamTransform transform(layout.variance_slots.size(),
                                 static_cast<std::size_t>(layout.ar_order));
  const auto values = transform.to_model(opt.x);

  FitReport report;
  report.spec = spec;
  for (std::size_t i = 0; i < layout.variance_slots.size(); ++i)
    report.params.push_back({layout.variance_slots[i], values.variance_ratios[i] * at.sigma2});
  for (int j = 0; j < layout.ar_order; ++j)
    report.params.push_back({"a_" + std::to_string(j + 1), values.ar[static_cast<std::size_t>(j)]});
  report.params.push_back({"sigma2", at.sigma2});
  report.log_likelihood = at.log_likelihood;
  report.n_params = count_params(spec, options.count_rule);
  report.aic = -2.0 * report.log_likelihood + 2.0 * report.n_params;
  report.n_obs = ts.observed_count();
  report.converged = opt.converged;
  report.iterations = opt.evaluations;
  report.prior_variance = at.prior_variance;
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::size_t sweep_threads_from_env() {
  if (const char* env = std::getenv("SEASTATE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

SweepTable sweep(const std::vector<ModelSpec>& grid, const TimeSeries& ts,
                 const FitOptions& options, std::size_t threads) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  SweepTable table;
  table.rows.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) table.rows[i].spec = grid[i];

  auto run_row = [&](std::size_t i) {
    auto& row = table.rows[i];
    try {
      row.report = fit_mle(grid[i], ts, options);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  if (threads == 0) threads = sweep_threads_from_env();
  threads = std::min(threads, grid.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) run_row(i);
      });
  }

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (!row.ok()) continue;
    if (!table.best) {
      table.best = i;
      continue;
    }
    const auto& cur = *table.rows[*table.best].report;
    const auto& cand = *row.report;
    const bool better =
        cand.aic < cur.aic ||
        (cand.aic == cur.aic &&
         (cand.n_params < cur.n_params ||
          (cand.n_params == cur.n_params && row.spec.order_tuple() < table.rows[*table.best].spec.order_tuple())));
    if (better) table.best = i;
  }
  if (table.best) table.rows[*table.best].is_min = true;
  return table;
}

}  // namespace seastate
