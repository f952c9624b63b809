#pragma once

// Deterministic pieces of the time-varying-rank VECM
//
//   dy_t = c + y_{t-1} Pi_t + dy_{t-1} B + e_t,   e_t ~ N(0, Sigma),
//
// with row-vector observations y_t (1 x n). Days are 0-based here; the first
// usable day is t = 2 because both dy_t and dy_{t-1} must exist, so a
// series of T rows yields T - 2 residual rows. Per-day matrix sequences
// (Pi, U, V, ...) are indexed by day and have T entries; the first two
// entries are never read by the likelihood.

#include "mementum/errors.hpp"
#include "mementum/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace mementum {

template <typename Scalar>
struct StaticParams {
  RowVector<Scalar> c;  // 1 x n
  Matrix<Scalar> B;     // n x n
  Matrix<Scalar> Sigma; // n x n, SPD

  Eigen::Index dim() const { return c.size(); }

  static StaticParams zeros(Eigen::Index n) {
    return {RowVector<Scalar>::Zero(n), Matrix<Scalar>::Zero(n, n), Matrix<Scalar>::Identity(n, n)};
  }
};

/// Hidden chain over N = n + 1 states; state s carries cointegration rank s - 1.
struct RankChainParams {
  MatrixXd P;

  Eigen::Index states() const { return P.rows(); }
};

/// States are 1-based, matching the rank convention r_t = state - 1.
struct RankPath {
  std::vector<int> states;

  std::size_t size() const { return states.size(); }
  int rank(std::size_t t) const { return states[t] - 1; }
  bool operator==(const RankPath&) const = default;
};

template <typename Scalar>
struct SvdFactors {
  MatrixSequence<Scalar> U;
  MatrixSequence<Scalar> V;
  MatrixSequence<Scalar> Lambda;
  MatrixSequence<Scalar> kappa;
};

/// beta[t] is n x r_t with a leading identity block, alpha[t] is r_t x n.
template <typename Scalar>
struct CointFactors {
  MatrixSequence<Scalar> beta;
  MatrixSequence<Scalar> alpha;
};

inline void check_state(int state, Eigen::Index n) {
  if (state < 1 || state > n + 1) {
    throw DomainError("state " + std::to_string(state) + " outside 1.." + std::to_string(n + 1));
  }
}

/// Diagonal 0/1 matrix with entry i equal to (1 - s_1) * sum_{j > i} s_j in
/// 1-based indexing, where s_j is the indicator of the current state.
template <typename Scalar = double>
Matrix<Scalar> rank_indicator(int state, Eigen::Index n) {
  check_state(state, n);
  const auto s = [state](Eigen::Index j) { return static_cast<Scalar>(j == state ? 1 : 0); };
  Matrix<Scalar> out = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 1; i <= n; ++i) {
    Scalar sum(0);
    for (Eigen::Index j = i + 1; j <= n + 1; ++j) sum += s(j);
    out(i - 1, i - 1) = (Scalar(1) - s(1)) * sum;
  }
  return out;
}

/// Integer rank with singular values counted above `rel_tol` times the largest.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-8) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m.eval());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == Scalar(0)) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++r;
  }
  return r;
}

template <typename Derived>
void check_orthogonal(const Eigen::MatrixBase<Derived>& m, const char* name, double tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> gram = m.transpose() * m;
  const double dev = (gram - Matrix<Scalar>::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) throw ValidationError(std::string(name) + " is not orthogonal (deviation " + std::to_string(dev) + ")");
}

/// Pi_t = U I(S_t) I(S_t) Lambda V'.
template <typename Scalar>
Matrix<Scalar> pi_from_svd(const Matrix<Scalar>& U, const Matrix<Scalar>& V, const Matrix<Scalar>& Lambda,
                           int state) {
  check_orthogonal(U, "U");
  check_orthogonal(V, "V");
  const Matrix<Scalar> ind = rank_indicator<Scalar>(state, U.rows());
  return U * ind * ind * Lambda * V.transpose();
}

/// Pi_t = U kappa I(S_t) I(S_t) kappa^{-1} Lambda V'. Equal to pi_from_svd
/// because diagonal kappa commutes with the indicator.
template <typename Scalar>
Matrix<Scalar> pi_from_svd_scaled(const Matrix<Scalar>& U, const Matrix<Scalar>& V, const Matrix<Scalar>& Lambda,
                                  const Matrix<Scalar>& kappa, int state) {
  check_orthogonal(U, "U");
  check_orthogonal(V, "V");
  const Vector<Scalar> k = kappa.diagonal();
  if ((k.array() <= Scalar(0)).any()) throw ValidationError("kappa must have a positive diagonal");
  const Matrix<Scalar> ind = rank_indicator<Scalar>(state, U.rows());
  const Matrix<Scalar> kappa_inv = k.cwiseInverse().asDiagonal();
  return U * kappa * ind * ind * kappa_inv * Lambda * V.transpose();
}

template <typename Scalar>
Matrix<Scalar> pi_from_svd(const SvdFactors<Scalar>& f, std::size_t t, int state) {
  return pi_from_svd<Scalar>(f.U[t], f.V[t], f.Lambda[t], state);
}

/// Pi = beta alpha for beta (n x r), alpha (r x n); r = 0 gives the zero matrix.
template <typename Scalar>
Matrix<Scalar> pi_from_factors(const Matrix<Scalar>& alpha, const Matrix<Scalar>& beta) {
  if (beta.cols() != alpha.rows()) {
    throw DomainError("factor dimension mismatch: beta has " + std::to_string(beta.cols()) + " columns, alpha has " +
                      std::to_string(alpha.rows()) + " rows");
  }
  if (alpha.cols() != beta.rows()) throw DomainError("Pi must be square: beta rows differ from alpha columns");
  if (beta.cols() == 0) return Matrix<Scalar>::Zero(beta.rows(), alpha.cols());
  return beta * alpha;
}

template <typename Scalar>
void check_model_dims(const Matrix<Scalar>& y, const StaticParams<Scalar>& params, const MatrixSequence<Scalar>& Pi) {
  const auto n = y.cols();
  if (y.rows() < 3) throw DomainError("need at least 3 observations, got " + std::to_string(y.rows()));
  if (params.c.size() != n || params.B.rows() != n || params.B.cols() != n || params.Sigma.rows() != n ||
      params.Sigma.cols() != n) {
    throw DomainError("static parameter dimensions do not match series dimension " + std::to_string(n));
  }
  if (static_cast<Eigen::Index>(Pi.size()) != y.rows()) {
    throw DomainError("Pi sequence has " + std::to_string(Pi.size()) + " entries for " + std::to_string(y.rows()) +
                      " days");
  }
  for (std::size_t t = 2; t < Pi.size(); ++t) {
    if (Pi[t].rows() != n || Pi[t].cols() != n) throw DomainError("Pi_t has wrong shape at t=" + std::to_string(t));
  }
}

/// Row k holds e_t for day t = k + 2.
template <typename Scalar>
Matrix<Scalar> residuals(const Matrix<Scalar>& y, const StaticParams<Scalar>& params,
                         const MatrixSequence<Scalar>& Pi) {
  check_model_dims(y, params, Pi);
  const auto T = y.rows();
  Matrix<Scalar> out(T - 2, y.cols());
  for (Eigen::Index t = 2; t < T; ++t) {
    const RowVector<Scalar> dy = y.row(t) - y.row(t - 1);
    const RowVector<Scalar> dy_lag = y.row(t - 1) - y.row(t - 2);
    out.row(t - 2) = dy - params.c - y.row(t - 1) * Pi[static_cast<std::size_t>(t)] - dy_lag * params.B;
  }
  return out;
}

/// Gaussian log-density evaluator for a fixed covariance.
template <typename Scalar>
class GaussianLogDensity {
 public:
  explicit GaussianLogDensity(const Matrix<Scalar>& Sigma) : llt_(Sigma) {
    if (Sigma.rows() != Sigma.cols()) throw DomainError("Sigma must be square");
    if (llt_.info() != Eigen::Success || !(Sigma - Sigma.transpose()).isZero(1e-9 * (1 + Sigma.cwiseAbs().maxCoeff()))) {
      throw DomainError("Sigma is not symmetric positive definite");
    }
    const Matrix<Scalar> L = llt_.matrixL();
    Scalar log_det(0);
    for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += 2 * std::log(L(i, i));
    offset_ = -Scalar(0.5) * (static_cast<Scalar>(Sigma.rows()) * std::log(2 * std::numbers::pi_v<Scalar>) + log_det);
  }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& e) const {
    const Vector<Scalar> z = llt_.matrixL().solve(e.transpose());
    return offset_ - Scalar(0.5) * z.squaredNorm();
  }

 private:
  Eigen::LLT<Matrix<Scalar>> llt_;
  Scalar offset_{};
};

template <typename Scalar>
Vector<Scalar> loglik_by_time(const Matrix<Scalar>& y, const StaticParams<Scalar>& params,
                              const MatrixSequence<Scalar>& Pi) {
  const Matrix<Scalar> e = residuals(y, params, Pi);
  const GaussianLogDensity<Scalar> density(params.Sigma);
  Vector<Scalar> out(e.rows());
  for (Eigen::Index k = 0; k < e.rows(); ++k) out(k) = density(e.row(k));
  return out;
}

template <typename Scalar>
Scalar conditional_loglik(const Matrix<Scalar>& y, const StaticParams<Scalar>& params,
                          const MatrixSequence<Scalar>& Pi) {
  return loglik_by_time(y, params, Pi).sum();
}

}  // namespace mementum
