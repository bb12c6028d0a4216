#ifndef SEASTATE_COMPONENTS_HPP
#define SEASTATE_COMPONENTS_HPP

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seastate/state_space.hpp"

namespace seastate {

enum class SeasonalVariant {
  kSumForm,       // S_n = -(S_{n-1} + ... + S_{n-p+1}) + v_n
  kLagRandomWalk  // S_n = S_{n-p} + v_n
};

enum class TrigDynamics { kConstant, kRandomWalk };

/// One trigonometric seasonal block with period p.
struct TrigBlockSpec {
  double period = 12.0;
  /// Number of sinusoidal terms (m4, or m5 for the second block).
  int order = 0;
  TrigDynamics dynamics = TrigDynamics::kRandomWalk;
  /// Harmonic indices j whose cos/sin pair is left out of the block.
  std::set<int> excluded;
  /// When false, `order` is split into (k_c, k_s) first and `excluded` then
  /// filters the resulting terms. When true, `order` counts retained terms,
  /// taken as cos j, sin j for increasing non-excluded j.
  bool order_counts_retained = false;
  /// Adds a j = 0 cosine (constant 1) term in front, acting as a level.
  bool include_level = false;

  bool operator==(const TrigBlockSpec&) const = default;
};

/// Fixed curve scaled by a random-walk factor beta_n. curve[n-1] is the
/// value at time n; it must cover the sample plus any forecast horizon.
struct OneFactorSpec {
  std::shared_ptr<const std::vector<double>> curve;

  bool operator==(const OneFactorSpec& o) const {
    return curve == o.curve || (curve && o.curve && *curve == *o.curve);
  }
};

/// Names one model of the family by its orders.
struct ModelSpec {
  int trend_order = 0;     // m1
  int seasonal_order = 0;  // m2
  int seasonal_period = 12;
  SeasonalVariant seasonal_variant = SeasonalVariant::kSumForm;
  int ar_order = 0;  // m3
  std::vector<TrigBlockSpec> trig;
  std::optional<OneFactorSpec> one_factor;

  /// Throws std::invalid_argument if any order or period is out of range.
  void validate() const;

  /// (m1, m2, m3, order of each trig block...) used for labelling and ties.
  std::vector<int> order_tuple() const;
  std::string describe() const;

  bool operator==(const ModelSpec&) const = default;
};

/// (k_c, k_s) for m4 terms: even m4 splits evenly, odd m4 gets one extra cosine.
std::pair<int, int> harmonic_split(int m4);

/// Harmonic indices of the period-f2 component that coincide with harmonics
/// of the period-f1 component when f2 = k f1.
struct HarmonicExclusion {
  std::set<int> indices;
  std::optional<std::string> warning;
};
HarmonicExclusion excluded_harmonics(double f1, double f2);

/// True when sin(2 pi j n / p) vanishes for every integer n.
bool sine_vanishes(double period, int j);

struct TrigTerm {
  int harmonic;  // j; 0 denotes the constant level term
  bool sine;

  bool operator==(const TrigTerm&) const = default;
};

/// The ordered terms a trig block carries after splitting and exclusion.
std::vector<TrigTerm> trig_terms(const TrigBlockSpec& spec);

enum class ComponentKind { kTrend, kSeasonal, kAr, kTrig, kOneFactor };

/// State-space block for one component. The block carries one noise variance
/// (shared across all of its noise inputs) and, for AR, the coefficients.
struct ComponentBlock {
  ComponentKind kind;
  std::string name;
  Eigen::MatrixXd F;
  Eigen::MatrixXd G;
  ObservationRow<double> H;
  double variance = 0.0;
  /// Parameter name of `variance`; empty when the variance is fixed at 0.
  std::string variance_slot;
  std::vector<std::string> coefficient_slots;

  Eigen::Index dim() const { return F.rows(); }
  Eigen::RowVectorXd row(long n) const {
    Eigen::RowVectorXd h(dim());
    H(n, h);
    return h;
  }
};

ComponentBlock build_trend(int m1, double tau2 = 1.0);
ComponentBlock build_dummy_seasonal(int period, SeasonalVariant variant, double tau2 = 1.0);
ComponentBlock build_ar(std::span<const double> coefficients, double tau2 = 1.0);
ComponentBlock build_trig_seasonal(const TrigBlockSpec& spec, double tau2 = 1.0,
                                   const std::string& name = "trig_1");
ComponentBlock build_trig_seasonal(double period, int m4, TrigDynamics dynamics,
                                   const std::set<int>& excluded, double tau2 = 1.0);
/// `required_length` is the last time index the model will be asked about.
ComponentBlock build_one_factor(std::shared_ptr<const std::vector<double>> curve,
                                std::size_t required_length, double tau2 = 1.0);

struct BlockLayout {
  ComponentKind kind;
  std::string name;
  Eigen::Index offset;
  Eigen::Index dim;
  ObservationRow<double> H;
};

struct ComposedModel {
  StateSpaceModel<double> model;
  std::vector<BlockLayout> layout;
  /// Free parameter names: block variances in block order, then AR
  /// coefficients, then sigma2.
  std::vector<std::string> parameter_slots;
};

/// Stacks blocks block-diagonally. x0 = 0 and V0 = prior_variance * I.
ComposedModel compose(std::vector<ComponentBlock> blocks, double sigma2, double prior_variance);

}  // namespace seastate

#endif  // SEASTATE_COMPONENTS_HPP
