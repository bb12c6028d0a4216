#include "seastate/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seastate {

std::vector<double> parcor_to_ar(std::span<const double> partials) {
  const std::size_t m = partials.size();
  std::vector<double> a(m, 0.0), prev(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double phi = partials[k];
    prev = a;
    a[k] = phi;
    for (std::size_t j = 0; j < k; ++j) a[j] = prev[j] - phi * prev[k - 1 - j];
  }
  return a;
}

std::vector<double> ar_to_parcor(std::span<const double> coefficients) {
  const std::size_t m = coefficients.size();
  std::vector<double> a(coefficients.begin(), coefficients.end());
  std::vector<double> partials(m, 0.0), prev(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    const double phi = a[k];
    partials[k] = phi;
    if (k == 0) break;
    const double denom = 1.0 - phi * phi;
    if (!(std::abs(phi) < 1.0)) {
      // Non-stationary; remaining partials are meaningless.
      for (std::size_t j = 0; j < k; ++j) partials[j] = 0.0;
      break;
    }
    for (std::size_t j = 0; j < k; ++j) prev[j] = (a[j] + phi * a[k - 1 - j]) / denom;
    for (std::size_t j = 0; j < k; ++j) a[j] = prev[j];
  }
  return partials;
}

bool is_stationary(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  const auto partials = ar_to_parcor(a);
  return std::all_of(partials.begin(), partials.end(),
                     [](double p) { return std::abs(p) < 1.0; });
}

ParamTransform::Values ParamTransform::to_model(std::span<const double> raw) const {
  if (raw.size() != size()) throw std::invalid_argument("ParamTransform: wrong raw size");
  Values out;
  out.variance_ratios.reserve(n_variances_);
  for (std::size_t i = 0; i < n_variances_; ++i)
    out.variance_ratios.push_back(std::exp(std::clamp(raw[i], kMinLogRatio, kMaxLogRatio)));
  std::vector<double> partials;
  partials.reserve(ar_order_);
  for (std::size_t i = 0; i < ar_order_; ++i)
    partials.push_back(std::tanh(std::clamp(raw[n_variances_ + i], -kMaxParcorRaw, kMaxParcorRaw)));
  out.ar = parcor_to_ar(partials);
  double scale = 1.0;
  for (double& a : out.ar) a *= (scale *= kRootRadius);
  return out;
}

std::vector<double> ParamTransform::to_raw(const Values& values) const {
  if (values.variance_ratios.size() != n_variances_ || values.ar.size() != ar_order_)
    throw std::invalid_argument("ParamTransform: wrong value sizes");
  std::vector<double> raw;
  raw.reserve(size());
  for (double r : values.variance_ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("ParamTransform: variance ratio must be > 0");
    raw.push_back(std::log(r));
  }
  std::vector<double> undamped(values.ar);
  double scale = 1.0;
  for (double& a : undamped) a /= (scale *= kRootRadius);
  for (double p : ar_to_parcor(undamped)) {
    if (!(std::abs(p) < 1.0))
      throw std::invalid_argument("ParamTransform: AR coefficients are not stationary");
    raw.push_back(std::atanh(p));
  }
  return raw;
}

}  // namespace seastate
