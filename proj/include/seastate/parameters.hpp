#ifndef SEASTATE_PARAMETERS_HPP
#define SEASTATE_PARAMETERS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace seastate {

/// Maps partial autocorrelations (each in (-1, 1)) to the coefficients
/// a_1..a_m of p_n = sum_j a_j p_{n-j} + v_n via the Levinson recursion.
std::vector<double> parcor_to_ar(std::span<const double> partials);

/// Inverse of parcor_to_ar (backward Levinson / Schur-Cohn step-down).
/// A partial with |value| >= 1 means `a` is not stationary.
std::vector<double> ar_to_parcor(std::span<const double> a);

/// True when every root of z^m - a_1 z^{m-1} - ... - a_m lies strictly
/// inside the unit circle.
bool is_stationary(std::span<const double> a);

/// Bijection between unconstrained optimizer coordinates and model values:
/// the first `n_variances` raws are log variance ratios, the remaining
/// `ar_order` raws are atanh of the partial autocorrelations. The Levinson
/// output is damped, a_j -> a_j r^j, which scales every root by r; mapped
/// roots therefore never come closer to the unit circle than 1 - r.
class ParamTransform {
 public:
  /// Raw coordinates are clamped to these ranges before mapping.
  static constexpr double kMinLogRatio = -30.0;
  static constexpr double kMaxLogRatio = 12.0;
  static constexpr double kMaxParcorRaw = 8.0;
  static constexpr double kRootRadius = 1.0 - 1e-6;

  struct Values {
    std::vector<double> variance_ratios;
    std::vector<double> ar;
  };

  ParamTransform(std::size_t n_variances, std::size_t ar_order)
      : n_variances_(n_variances), ar_order_(ar_order) {}

  std::size_t size() const { return n_variances_ + ar_order_; }
  std::size_t n_variances() const { return n_variances_; }
  std::size_t ar_order() const { return ar_order_; }

  Values to_model(std::span<const double> raw) const;
  std::vector<double> to_raw(const Values& values) const;

 private:
  std::size_t n_variances_;
  std::size_t ar_order_;
};

}  // namespace seastate

#endif  // SEASTATE_PARAMETERS_HPP
