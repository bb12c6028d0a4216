#include "seastate/decomposition.hpp"

#include <limits>

namespace seastate {

const ComponentSeries* DecompositionResult::find(const std::string& name) const {
  for (const auto& c : components)
    if (c.name == name) return &c;
  return nullptr;
}

DecompositionResult decompose(const ComposedModel& composed, const TimeSeries& ts) {
  const auto& model = composed.model;
  const auto filtered = kalman_filter(model, ts);
  const auto smoothed = kalman_smooth(model, filtered);
  const std::size_t N = ts.size();

  DecompositionResult out;
  out.log_likelihood = filtered.log_likelihood;
  out.used_pseudo_inverse = smoothed.used_pseudo_inverse;
  for (const auto& blk : composed.layout) out.components.push_back({blk.name, std::vector<double>(N)});
  out.noise.assign(N, std::numeric_limits<double>::quiet_NaN());
  out.smoothed_signal.assign(N, 0.0);

  Eigen::RowVectorXd h(model.dim());
  for (std::size_t i = 0; i < N; ++i) {
    const long n = static_cast<long>(i) + 1;
    if (model.dim() > 0) model.H(n, h);
    double total = 0.0;
    for (std::size_t b = 0; b < composed.layout.size(); ++b) {
      const auto& blk = composed.layout[b];
      const double v = h.segment(blk.offset, blk.dim).dot(smoothed.mean[i].segment(blk.offset, blk.dim));
      out.components[b].values[i] = v;
      total += v;
    }
    out.smoothed_signal[i] = total;
    if (ts.observed(i)) out.noise[i] = ts.value(i) - total;
  }
  return out;
}

}  // namespace seastate
