#include "mementum/random.hpp"

#include "mementum/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace mementum {

double Rng::uniform() { return uniform_(engine_); }

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(engine_);
}

double Rng::inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, 1.0 / scale); }

double Rng::chi_squared(double df) { return gamma(0.5 * df, 2.0); }

VectorXd Rng::standard_normal(Eigen::Index n) {
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
  return z;
}

VectorXd Rng::dirichlet(const VectorXd& concentration) {
  VectorXd g(concentration.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = gamma(concentration(i), 1.0);
  const double total = g.sum();
  if (!(total > 0.0)) {
    // every gamma underflowed; fall back to the largest concentration
    g.setZero();
    Eigen::Index best = 0;
    concentration.maxCoeff(&best);
    g(best) = 1.0;
    return g;
  }
  return g / total;
}

int Rng::categorical(const VectorXd& weights) {
  const double total = weights.sum();
  const double u = uniform() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    if (u < acc) return static_cast<int>(i);
  }
  for (Eigen::Index i = weights.size() - 1; i >= 0; --i) {
    if (weights(i) > 0.0) return static_cast<int>(i);
  }
  return 0;
}

bool Rng::try_mvn(const VectorXd& mean, const MatrixXd& cov, VectorXd& out) {
  const MatrixXd sym = 0.5 * (cov + cov.transpose());
  const VectorXd z = standard_normal(mean.size());
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) {
    out = mean + llt.matrixL() * z;
    return true;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  const VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-8 * scale) return false;
  out = mean + eig.eigenvectors() * (lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal() * z);
  return true;
}

MatrixXd Rng::inverse_wishart(double df, const MatrixXd& scale) {
  const auto n = scale.rows();
  if (df <= static_cast<double>(n - 1)) throw DomainError("inverse-Wishart degrees of freedom too small");
  const MatrixXd scale_inv = scale.llt().solve(MatrixXd::Identity(n, n));
  Eigen::LLT<MatrixXd> llt(0.5 * (scale_inv + scale_inv.transpose()));
  if (llt.info() != Eigen::Success) throw DomainError("inverse-Wishart scale is not positive definite");
  const MatrixXd L = llt.matrixL();
  // Bartlett decomposition of the Wishart draw for Sigma^{-1}
  MatrixXd A = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = std::sqrt(chi_squared(df - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = normal();
  }
  const MatrixXd LA = L * A;
  const MatrixXd W = LA * LA.transpose();
  MatrixXd Sigma = W.llt().solve(MatrixXd::Identity(n, n));
  return 0.5 * (Sigma + Sigma.transpose());
}

}  // namespace mementum
