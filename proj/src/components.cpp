#include "seastate/components.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "seastate/parameters.hpp"

namespace seastate {

namespace {

constexpr double kPeriodTol = 1e-9;

bool is_integer(double x) { return std::abs(x - std::round(x)) < kPeriodTol; }

int max_harmonic(double period) {
  return static_cast<int>(std::floor(period / 2.0 + kPeriodTol));
}

ObservationRow<double> first_unit_row() {
  return [](long, Eigen::Ref<Eigen::RowVectorXd> out) {
    out.setZero();
    out(0) = 1.0;
  };
}

}  // namespace

std::pair<int, int> harmonic_split(int m4) {
  if (m4 < 0) throw std::invalid_argument("harmonic_split: m4 must be >= 0");
  if (m4 % 2 == 0) return {m4 / 2, m4 / 2};
  return {m4 / 2 + 1, m4 / 2};
}

bool sine_vanishes(double period, int j) {
  return is_integer(period) && 2 * j == static_cast<int>(std::lround(period));
}

HarmonicExclusion excluded_harmonics(double f1, double f2) {
  if (!(f1 > 0.0) || !(f2 > 0.0))
    throw std::invalid_argument("excluded_harmonics: periods must be positive");
  if (f1 >= f2) throw std::invalid_argument("excluded_harmonics: requires f1 < f2");
  HarmonicExclusion out;
  const double ratio = f2 / f1;
  const long k = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(k)) > kPeriodTol * ratio || k < 2) {
    out.warning = "periods " + std::to_string(f1) + " and " + std::to_string(f2) +
                  " are not integer multiples; no harmonics excluded";
    return out;
  }
  const int limit = static_cast<int>(std::ceil(f2 / 2.0 - kPeriodTol));
  for (long j = k; j <= limit; j += k) out.indices.insert(static_cast<int>(j));
  return out;
}

std::vector<TrigTerm> trig_terms(const TrigBlockSpec& spec) {
  std::vector<TrigTerm> terms;
  if (spec.include_level) terms.push_back({0, false});
  const auto skip = [&](int j) { return spec.excluded.count(j) > 0; };
  if (!spec.order_counts_retained) {
    const auto [kc, ks] = harmonic_split(spec.order);
    for (int j = 1; j <= std::max(kc, ks); ++j) {
      if (skip(j)) continue;
      if (j <= kc) terms.push_back({j, false});
      if (j <= ks && !sine_vanishes(spec.period, j)) terms.push_back({j, true});
    }
    return terms;
  }
  int remaining = spec.order;
  const int limit = max_harmonic(spec.period);
  for (int j = 1; remaining > 0 && j <= limit; ++j) {
    if (skip(j)) continue;
    terms.push_back({j, false});
    --remaining;
    if (remaining > 0 && !sine_vanishes(spec.period, j)) {
      terms.push_back({j, true});
      --remaining;
    }
  }
  if (remaining > 0)
    throw std::invalid_argument("trig block: order " + std::to_string(spec.order) +
                                " exceeds the number of available terms for period " +
                                std::to_string(spec.period));
  return terms;
}

void ModelSpec::validate() const {
  if (trend_order < 0 || trend_order > 2)
    throw std::invalid_argument("model spec: m1 must be 0, 1 or 2");
  if (seasonal_order < 0 || seasonal_order > 1)
    throw std::invalid_argument("model spec: m2 must be 0 or 1");
  if (seasonal_order == 1 && seasonal_period < 2)
    throw std::invalid_argument("model spec: seasonal period must be >= 2");
  if (ar_order < 0) throw std::invalid_argument("model spec: m3 must be >= 0");
  for (std::size_t b = 0; b < trig.size(); ++b) {
    const auto& t = trig[b];
    const std::string tag = "model spec: trig block " + std::to_string(b + 1) + ": ";
    if (!(t.period > 0.0) || !std::isfinite(t.period))
      throw std::invalid_argument(tag + "period must be positive");
    if (t.order < 0) throw std::invalid_argument(tag + "order must be >= 0");
    if (!t.order_counts_retained && t.order > t.period - 1.0 + kPeriodTol)
      throw std::invalid_argument(tag + "order " + std::to_string(t.order) +
                                  " exceeds period - 1");
    const int limit = static_cast<int>(std::ceil(t.period / 2.0 - kPeriodTol));
    for (int j : t.excluded)
      if (j < 1 || j > limit)
        throw std::invalid_argument(tag + "excluded harmonic " + std::to_string(j) +
                                    " out of range");
    if (t.order > 0 || t.include_level) {
      if (trig_terms(t).empty())
        throw std::invalid_argument(tag + "all terms excluded");
    }
  }
  if (one_factor) {
    if (!one_factor->curve || one_factor->curve->empty())
      throw std::invalid_argument("model spec: one-factor curve is empty");
    for (double v : *one_factor->curve)
      if (!std::isfinite(v)) throw std::invalid_argument("model spec: one-factor curve not finite");
  }
}

std::vector<int> ModelSpec::order_tuple() const {
  std::vector<int> out{trend_order, seasonal_order, ar_order};
  for (const auto& t : trig) out.push_back(t.order);
  return out;
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  os << "m1=" << trend_order << " m2=" << seasonal_order;
  if (seasonal_order > 0)
    os << "(p=" << seasonal_period
       << (seasonal_variant == SeasonalVariant::kLagRandomWalk ? ",lag" : "") << ")";
  os << " m3=" << ar_order;
  for (std::size_t b = 0; b < trig.size(); ++b) {
    os << (b == 0 ? " m4=" : " m" + std::to_string(4 + b) + "=") << trig[b].order << "(p="
       << trig[b].period << (trig[b].dynamics == TrigDynamics::kConstant ? ",const" : ",rw")
       << ")";
  }
  if (one_factor) os << " one_factor";
  return os.str();
}

ComponentBlock build_trend(int m1, double tau2) {
  if (m1 != 1 && m1 != 2) throw std::invalid_argument("build_trend: m1 must be 1 or 2");
  ComponentBlock b{ComponentKind::kTrend, "trend", {}, {}, {}, tau2, "tau2_trend", {}};
  if (m1 == 1) {
    b.F = Eigen::MatrixXd::Ones(1, 1);
  } else {
    b.F.resize(2, 2);
    b.F << 2.0, -1.0, 1.0, 0.0;
  }
  b.G = Eigen::MatrixXd::Zero(m1, 1);
  b.G(0, 0) = 1.0;
  b.H = first_unit_row();
  return b;
}

ComponentBlock build_dummy_seasonal(int period, SeasonalVariant variant, double tau2) {
  if (period < 2) throw std::invalid_argument("build_dummy_seasonal: period must be >= 2");
  ComponentBlock b{ComponentKind::kSeasonal, "seasonal", {}, {}, {}, tau2, "tau2_seasonal", {}};
  const int d = variant == SeasonalVariant::kSumForm ? period - 1 : period;
  b.F = Eigen::MatrixXd::Zero(d, d);
  if (variant == SeasonalVariant::kSumForm)
    b.F.row(0).setConstant(-1.0);
  else
    b.F(0, d - 1) = 1.0;
  for (int i = 1; i < d; ++i) b.F(i, i - 1) = 1.0;
  b.G = Eigen::MatrixXd::Zero(d, 1);
  b.G(0, 0) = 1.0;
  b.H = first_unit_row();
  return b;
}

ComponentBlock build_ar(std::span<const double> coefficients, double tau2) {
  const auto m = static_cast<Eigen::Index>(coefficients.size());
  if (m < 1) throw std::invalid_argument("build_ar: order must be >= 1");
  if (!is_stationary(coefficients))
    throw std::invalid_argument("build_ar: coefficients are not stationary");
  ComponentBlock b{ComponentKind::kAr, "ar", {}, {}, {}, tau2, "tau2_ar", {}};
  b.F = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) b.F(0, j) = coefficients[j];
  for (Eigen::Index i = 1; i < m; ++i) b.F(i, i - 1) = 1.0;
  b.G = Eigen::MatrixXd::Zero(m, 1);
  b.G(0, 0) = 1.0;
  b.H = first_unit_row();
  for (Eigen::Index j = 1; j <= m; ++j) b.coefficient_slots.push_back("a_" + std::to_string(j));
  return b;
}

ComponentBlock build_trig_seasonal(const TrigBlockSpec& spec, double tau2, const std::string& name) {
  if (!(spec.period > 0.0)) throw std::invalid_argument("build_trig_seasonal: period must be > 0");
  if (spec.order < 1 && !spec.include_level)
    throw std::invalid_argument("build_trig_seasonal: order must be >= 1");
  if (!spec.order_counts_retained && spec.order > spec.period - 1.0 + kPeriodTol)
    throw std::invalid_argument("build_trig_seasonal: order exceeds period - 1");
  const auto terms = trig_terms(spec);
  if (terms.empty()) throw std::invalid_argument("build_trig_seasonal: all terms excluded");

  const bool random_walk = spec.dynamics == TrigDynamics::kRandomWalk;
  const auto d = static_cast<Eigen::Index>(terms.size());
  ComponentBlock b{ComponentKind::kTrig, name, Eigen::MatrixXd::Identity(d, d),
                   Eigen::MatrixXd::Identity(d, d), {},
                   random_walk ? tau2 : 0.0, random_walk ? "tau2_" + name : std::string{}, {}};
  const double omega = 2.0 * std::numbers::pi / spec.period;
  b.H = [terms, omega](long n, Eigen::Ref<Eigen::RowVectorXd> out) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double arg = omega * terms[i].harmonic * static_cast<double>(n);
      out(static_cast<Eigen::Index>(i)) = terms[i].sine ? std::sin(arg) : std::cos(arg);
    }
  };
  return b;
}

ComponentBlock build_trig_seasonal(double period, int m4, TrigDynamics dynamics,
                                   const std::set<int>& excluded, double tau2) {
  TrigBlockSpec spec;
  spec.period = period;
  spec.order = m4;
  spec.dynamics = dynamics;
  spec.excluded = excluded;
  return build_trig_seasonal(spec, tau2);
}

ComponentBlock build_one_factor(std::shared_ptr<const std::vector<double>> curve,
                                std::size_t required_length, double tau2) {
  if (!curve) throw std::invalid_argument("build_one_factor: missing curve");
  if (curve->size() < required_length)
    throw std::invalid_argument("build_one_factor: curve shorter than series + horizon (" +
                                std::to_string(curve->size()) + " < " +
                                std::to_string(required_length) + ")");
  for (double v : *curve)
    if (!std::isfinite(v)) throw std::invalid_argument("build_one_factor: curve not finite");
  ComponentBlock b{ComponentKind::kOneFactor, "one_factor", Eigen::MatrixXd::Ones(1, 1),
                   Eigen::MatrixXd::Ones(1, 1), {}, tau2, "tau2_one_factor", {}};
  b.H = [curve](long n, Eigen::Ref<Eigen::RowVectorXd> out) {
    if (n < 1 || static_cast<std::size_t>(n) > curve->size())
      throw std::out_of_range("one-factor curve not defined at n=" + std::to_string(n));
    out(0) = (*curve)[static_cast<std::size_t>(n - 1)];
  };
  return b;
}

ComposedModel compose(std::vector<ComponentBlock> blocks, double sigma2, double prior_variance) {
  Eigen::Index dim = 0, noise = 0;
  for (const auto& b : blocks) {
    if (b.G.rows() != b.dim() || b.F.cols() != b.dim())
      throw std::invalid_argument("compose: inconsistent block '" + b.name + "'");
    dim += b.dim();
    noise += b.G.cols();
  }
  ComposedModel out;
  auto& m = out.model;
  m.F = Eigen::MatrixXd::Zero(dim, dim);
  m.G = Eigen::MatrixXd::Zero(dim, noise);
  m.q = Eigen::VectorXd::Zero(noise);
  m.r = sigma2;
  m.x0 = Eigen::VectorXd::Zero(dim);
  m.V0 = prior_variance * Eigen::MatrixXd::Identity(dim, dim);

  Eigen::Index off = 0, noff = 0;
  std::vector<std::string> coefficient_slots;
  for (const auto& b : blocks) {
    const auto d = b.dim();
    const auto k = b.G.cols();
    m.F.block(off, off, d, d) = b.F;
    m.G.block(off, noff, d, k) = b.G;
    m.q.segment(noff, k).setConstant(b.variance);
    m.transition_blocks.push_back(d);
    out.layout.push_back({b.kind, b.name, off, d, b.H});
    if (!b.variance_slot.empty()) out.parameter_slots.push_back(b.variance_slot);
    coefficient_slots.insert(coefficient_slots.end(), b.coefficient_slots.begin(),
                             b.coefficient_slots.end());
    off += d;
    noff += k;
  }
  out.parameter_slots.insert(out.parameter_slots.end(), coefficient_slots.begin(),
                             coefficient_slots.end());
  out.parameter_slots.push_back("sigma2");

  m.H = [layout = out.layout](long n, Eigen::Ref<Eigen::RowVectorXd> h) {
    for (const auto& blk : layout) blk.H(n, h.segment(blk.offset, blk.dim));
  };
  return out;
}

}  // namespace seastate
