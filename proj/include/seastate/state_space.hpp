#ifndef SEASTATE_STATE_SPACE_HPP
#define SEASTATE_STATE_SPACE_HPP

// Linear-Gaussian state-space engine:
//
//   x_n = F x_{n-1} + G v_n,   v_n ~ N(0, diag(q))
//   y_n = H(n) x_n + w_n,      w_n ~ N(0, r)
//
// with x_0 ~ N(x0, V0) and a time-varying observation row H(n), n = 1..N.
// Missing observations skip the update step and contribute nothing to the
// log-likelihood.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "seastate/timeseries.hpp"

namespace seastate {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Fills `out` (length dim) with the observation row at time n (1-based).
template <typename Scalar>
using ObservationRow = std::function<void(long n, Eigen::Ref<RowVectorX<Scalar>> out)>;

/// Raised when the recursion breaks down numerically (r_n <= 0, NaN, ...).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long n)
      : std::runtime_error(what + " at n=" + std::to_string(n)), n_(n) {}
  long time_index() const { return n_; }

 private:
  long n_;
};

template <typename Scalar = double>
struct StateSpaceModel {
  MatrixX<Scalar> F;
  MatrixX<Scalar> G;
  VectorX<Scalar> q;  // diagonal of the system-noise covariance
  Scalar r = Scalar(1);
  ObservationRow<Scalar> H;
  VectorX<Scalar> x0;
  MatrixX<Scalar> V0;
  /// Sizes of the diagonal blocks of F, in order. Empty means one dense block.
  /// Identity blocks are detected and skipped when propagating covariances.
  std::vector<Eigen::Index> transition_blocks;

  Eigen::Index dim() const { return F.rows(); }
  Eigen::Index noise_dim() const { return G.cols(); }

  RowVectorX<Scalar> row(long n) const {
    RowVectorX<Scalar> h = RowVectorX<Scalar>::Zero(dim());
    if (dim() > 0) H(n, h);
    return h;
  }

  /// Throws std::invalid_argument when dimensions or covariances are invalid.
  void validate() const {
    const auto d = dim();
    if (F.cols() != d) throw std::invalid_argument("state space: F must be square");
    if (G.rows() != d) throw std::invalid_argument("state space: G rows != dim");
    if (G.cols() > d) throw std::invalid_argument("state space: noise dim exceeds state dim");
    if (q.size() != G.cols()) throw std::invalid_argument("state space: q size != noise dim");
    if (x0.size() != d) throw std::invalid_argument("state space: x0 size != dim");
    if (V0.rows() != d || V0.cols() != d)
      throw std::invalid_argument("state space: V0 shape != dim x dim");
    if (!(r >= Scalar(0))) throw std::invalid_argument("state space: negative observation variance");
    for (Eigen::Index i = 0; i < q.size(); ++i)
      if (!(q(i) >= Scalar(0))) throw std::invalid_argument("state space: negative system variance");
    for (Eigen::Index i = 0; i < d; ++i)
      if (!(V0(i, i) >= Scalar(0))) throw std::invalid_argument("state space: negative V0 diagonal");
    const Scalar scale = d > 0 ? std::max(Scalar(1), V0.cwiseAbs().maxCoeff()) : Scalar(1);
    if (d > 0 && (V0 - V0.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
      throw std::invalid_argument("state space: V0 not symmetric");
    if (!transition_blocks.empty()) {
      Eigen::Index total = 0;
      for (auto b : transition_blocks) total += b;
      if (total != d) throw std::invalid_argument("state space: transition blocks do not cover F");
      Eigen::Index off = 0;
      for (auto b : transition_blocks) {
        MatrixX<Scalar> masked = F;
        masked.block(off, off, b, b).setZero();
        if (masked.middleRows(off, b).cwiseAbs().maxCoeff() != Scalar(0) ||
            masked.middleCols(off, b).cwiseAbs().maxCoeff() != Scalar(0))
          throw std::invalid_argument("state space: F is not block diagonal as declared");
        off += b;
      }
    }
  }
};

template <typename Scalar = double>
struct FilterResult {
  std::vector<bool> observed;
  std::vector<Scalar> innovation;           // NaN where missing
  std::vector<Scalar> innovation_variance;  // NaN where missing
  std::vector<VectorX<Scalar>> predicted_mean;  // x_{n|n-1}
  std::vector<MatrixX<Scalar>> predicted_cov;   // V_{n|n-1}
  std::vector<VectorX<Scalar>> filtered_mean;   // x_{n|n}
  std::vector<MatrixX<Scalar>> filtered_cov;    // V_{n|n}
  Scalar log_likelihood = Scalar(0);
  std::size_t n_obs = 0;

  std::size_t size() const { return observed.size(); }
};

/// Sufficient pieces of the log-likelihood, for concentrating out a scale.
template <typename Scalar = double>
struct LikelihoodTerms {
  Scalar sum_log_r = Scalar(0);
  Scalar sum_sq = Scalar(0);  // sum of eps_n^2 / r_n
  std::size_t n_obs = 0;

  Scalar log_likelihood() const {
    const Scalar log2pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
    return Scalar(-0.5) * (Scalar(n_obs) * log2pi + sum_log_r + sum_sq);
  }
};

template <typename Scalar = double>
struct SmootherResult {
  std::vector<VectorX<Scalar>> mean;  // x_{n|N}
  std::vector<MatrixX<Scalar>> cov;   // V_{n|N}
  /// Set when some V_{n+1|n} was numerically singular and the pseudo-inverse
  /// was used for the backward gain.
  bool used_pseudo_inverse = false;
};

template <typename Scalar = double>
struct Forecast {
  std::vector<Scalar> mean;
  std::vector<Scalar> variance;
};

namespace detail {

template <typename Scalar>
struct BlockInfo {
  Eigen::Index offset;
  Eigen::Index size;
  bool identity;
};

template <typename Scalar>
std::vector<BlockInfo<Scalar>> transition_layout(const StateSpaceModel<Scalar>& m) {
  std::vector<BlockInfo<Scalar>> out;
  const auto d = m.dim();
  std::vector<Eigen::Index> sizes = m.transition_blocks;
  if (sizes.empty() && d > 0) sizes.push_back(d);
  Eigen::Index off = 0;
  for (auto b : sizes) {
    const bool id = m.F.block(off, off, b, b).isIdentity(Scalar(0));
    out.push_back({off, b, id});
    off += b;
  }
  return out;
}

/// Propagates a mean and covariance through F and adds W = G diag(q) G'.
template <typename Scalar>
class Propagator {
 public:
  explicit Propagator(const StateSpaceModel<Scalar>& m)
      : model_(m), blocks_(transition_layout(m)) {
    W_ = m.G * m.q.asDiagonal() * m.G.transpose();
    work_.resize(m.dim(), m.dim());
  }

  void mean(const VectorX<Scalar>& in, VectorX<Scalar>& out) const {
    out.resize(in.size());
    for (const auto& b : blocks_) {
      if (b.identity)
        out.segment(b.offset, b.size) = in.segment(b.offset, b.size);
      else
        out.segment(b.offset, b.size).noalias() =
            model_.F.block(b.offset, b.offset, b.size, b.size) * in.segment(b.offset, b.size);
    }
  }

  void cov(const MatrixX<Scalar>& in, MatrixX<Scalar>& out) {
    const auto d = in.rows();
    for (const auto& b : blocks_) {
      if (b.identity)
        work_.middleRows(b.offset, b.size) = in.middleRows(b.offset, b.size);
      else
        work_.middleRows(b.offset, b.size).noalias() =
            model_.F.block(b.offset, b.offset, b.size, b.size) * in.middleRows(b.offset, b.size);
    }
    out.resize(d, d);
    for (const auto& b : blocks_) {
      if (b.identity)
        out.middleCols(b.offset, b.size) = work_.middleCols(b.offset, b.size);
      else
        out.middleCols(b.offset, b.size).noalias() =
            work_.middleCols(b.offset, b.size) *
            model_.F.block(b.offset, b.offset, b.size, b.size).transpose();
    }
    out += W_;
    symmetrize(out);
  }

  static void symmetrize(MatrixX<Scalar>& V) {
    V = Scalar(0.5) * (V + V.transpose()).eval();
  }

 private:
  const StateSpaceModel<Scalar>& model_;
  std::vector<BlockInfo<Scalar>> blocks_;
  MatrixX<Scalar> W_;
  MatrixX<Scalar> work_;
};

template <typename Scalar>
bool is_finite(const MatrixX<Scalar>& m) {
  return m.allFinite();
}

/// Shared forward recursion. `sink(i, xp, Vp, xf, Vf, eps, r)` is invoked
/// after each step; eps/r are NaN at missing points.
template <typename Scalar, typename Sink>
LikelihoodTerms<Scalar> forward(const StateSpaceModel<Scalar>& model, const TimeSeries& ts,
                                Sink&& sink) {
  model.validate();
  const auto d = model.dim();
  Propagator<Scalar> prop(model);
  VectorX<Scalar> x = model.x0, xp(d);
  MatrixX<Scalar> V = model.V0, Vp(d, d);
  RowVectorX<Scalar> h(d);
  VectorX<Scalar> Vh(d);
  LikelihoodTerms<Scalar> terms;
  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const long n = static_cast<long>(i) + 1;
    prop.mean(x, xp);
    prop.cov(V, Vp);
    if (!ts.observed(i)) {
      x = xp;
      V = Vp;
      sink(i, xp, Vp, x, V, nan, nan);
      continue;
    }
    if (d > 0) model.H(n, h);
    const Scalar y = static_cast<Scalar>(ts.value(i));
    Scalar r = model.r;
    Scalar eps = y;
    if (d > 0) {
      Vh.noalias() = Vp * h.transpose();
      r += h.dot(Vh);
      eps -= h.dot(xp);
    }
    if (!std::isfinite(static_cast<double>(r)) || !std::isfinite(static_cast<double>(eps)))
      throw NumericalError("kalman filter: non-finite innovation", n);
    if (!(r > Scalar(0))) throw NumericalError("kalman filter: innovation variance <= 0", n);
    if (d > 0) {
      const VectorX<Scalar> K = Vh / r;
      x = xp + K * eps;
      V = Vp;
      V.noalias() -= K * Vh.transpose();
      Propagator<Scalar>::symmetrize(V);
      if (!is_finite(V)) throw NumericalError("kalman filter: non-finite covariance", n);
    }
    terms.sum_log_r += std::log(r);
    terms.sum_sq += eps * eps / r;
    ++terms.n_obs;
    sink(i, xp, Vp, x, V, eps, r);
  }
  return terms;
}

}  // namespace detail

/// Log-likelihood pieces only; stores no per-step moments.
template <typename Scalar>
LikelihoodTerms<Scalar> kalman_loglik(const StateSpaceModel<Scalar>& model, const TimeSeries& ts) {
  return detail::forward(model, ts, [](auto&&...) {});
}

template <typename Scalar>
FilterResult<Scalar> kalman_filter(const StateSpaceModel<Scalar>& model, const TimeSeries& ts) {
  FilterResult<Scalar> out;
  const std::size_t N = ts.size();
  out.observed = ts.mask();
  out.innovation.resize(N);
  out.innovation_variance.resize(N);
  out.predicted_mean.resize(N);
  out.predicted_cov.resize(N);
  out.filtered_mean.resize(N);
  out.filtered_cov.resize(N);
  auto terms = detail::forward(model, ts,
                               [&](std::size_t i, const VectorX<Scalar>& xp,
                                   const MatrixX<Scalar>& Vp, const VectorX<Scalar>& xf,
                                   const MatrixX<Scalar>& Vf, Scalar eps, Scalar r) {
                                 out.predicted_mean[i] = xp;
                                 out.predicted_cov[i] = Vp;
                                 out.filtered_mean[i] = xf;
                                 out.filtered_cov[i] = Vf;
                                 out.innovation[i] = eps;
                                 out.innovation_variance[i] = r;
                               });
  out.log_likelihood = terms.log_likelihood();
  out.n_obs = terms.n_obs;
  if (!std::isfinite(static_cast<double>(out.log_likelihood)))
    throw NumericalError("kalman filter: non-finite log-likelihood", static_cast<long>(N));
  return out;
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix. Eigenvalues at or
/// below `rel_tol` times the largest diagonal entry are treated as zero.
template <typename Scalar>
MatrixX<Scalar> symmetric_pseudo_inverse(const MatrixX<Scalar>& V, Scalar rel_tol, bool* singular) {
  const auto d = V.rows();
  if (d == 0) return V;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(V);
  const Scalar tol = rel_tol * V.diagonal().cwiseAbs().maxCoeff();
  VectorX<Scalar> inv(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Scalar ev = es.eigenvalues()(i);
    if (ev > tol) {
      inv(i) = Scalar(1) / ev;
    } else {
      inv(i) = Scalar(0);
      if (singular) *singular = true;
    }
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Fixed-interval (Rauch-Tung-Striebel) smoother.
template <typename Scalar>
SmootherResult<Scalar> kalman_smooth(const StateSpaceModel<Scalar>& model,
                                     const FilterResult<Scalar>& filtered) {
  const std::size_t N = filtered.size();
  SmootherResult<Scalar> out;
  out.mean.resize(N);
  out.cov.resize(N);
  if (N == 0) return out;
  out.mean[N - 1] = filtered.filtered_mean[N - 1];
  out.cov[N - 1] = filtered.filtered_cov[N - 1];
  const auto d = model.dim();
  if (d == 0) {
    for (std::size_t i = 0; i < N; ++i) {
      out.mean[i] = filtered.filtered_mean[i];
      out.cov[i] = filtered.filtered_cov[i];
    }
    return out;
  }
  MatrixX<Scalar> A(d, d);
  for (std::size_t i = N - 1; i-- > 0;) {
    const MatrixX<Scalar>& Vf = filtered.filtered_cov[i];
    const MatrixX<Scalar>& Vp_next = filtered.predicted_cov[i + 1];
    bool singular = false;
    Eigen::LLT<MatrixX<Scalar>> llt(Vp_next);
    // A = Vf F' Vp^{-1}; computed as (Vp^{-1} F Vf)' using symmetry.
    const MatrixX<Scalar> FVf = model.F * Vf;
    const Scalar smallest_pivot =
        llt.info() == Eigen::Success ? llt.matrixLLT().diagonal().minCoeff() : Scalar(0);
    const Scalar largest_diag = Vp_next.diagonal().maxCoeff();
    if (llt.info() == Eigen::Success &&
        smallest_pivot * smallest_pivot > Scalar(1e-12) * largest_diag) {
      A = llt.solve(FVf).transpose();
    } else {
      A = Vf * model.F.transpose() * symmetric_pseudo_inverse(Vp_next, Scalar(1e-12), &singular);
      out.used_pseudo_inverse = true;
    }
    out.mean[i] = filtered.filtered_mean[i] +
                  A * (out.mean[i + 1] - filtered.predicted_mean[i + 1]);
    MatrixX<Scalar> V = Vf + A * (out.cov[i + 1] - Vp_next) * A.transpose();
    detail::Propagator<Scalar>::symmetrize(V);
    out.cov[i] = std::move(V);
  }
  return out;
}

/// Multi-step prediction from the end of the filtered sample: observation
/// means H(N+k) x_{N+k|N} and variances H V H' + r, k = 1..horizon.
template <typename Scalar>
Forecast<Scalar> predict(const StateSpaceModel<Scalar>& model, const FilterResult<Scalar>& filtered,
                         std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("predict: horizon must be >= 1");
  if (filtered.size() == 0) throw std::invalid_argument("predict: empty filter result");
  const auto d = model.dim();
  detail::Propagator<Scalar> prop(model);
  VectorX<Scalar> x = filtered.filtered_mean.back(), xn(d);
  MatrixX<Scalar> V = filtered.filtered_cov.back(), Vn(d, d);
  Forecast<Scalar> out;
  const long N = static_cast<long>(filtered.size());
  for (std::size_t k = 1; k <= horizon; ++k) {
    prop.mean(x, xn);
    prop.cov(V, Vn);
    x.swap(xn);
    V.swap(Vn);
    const RowVectorX<Scalar> h = model.row(N + static_cast<long>(k));
    out.mean.push_back(d > 0 ? h.dot(x) : Scalar(0));
    out.variance.push_back((d > 0 ? h.dot(V * h.transpose()) : Scalar(0)) + model.r);
  }
  return out;
}

}  // namespace seastate

#endif  // SEASTATE_STATE_SPACE_HPP
