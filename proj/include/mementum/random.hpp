#pragma once

#include "mementum/types.hpp"

#include <cstdint>
#include <random>

namespace mementum {

/// Seeded generator plus the handful of distributions the sampler needs.
/// Draw sequences are a pure function of the seed on a given standard
/// library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  /// Gamma with shape `k` and scale `theta`.
  double gamma(double shape, double scale);
  /// 1 / Gamma(shape, 1 / scale): density proportional to x^{-shape-1} exp(-scale / x).
  double inverse_gamma(double shape, double scale);
  double chi_squared(double df);

  VectorXd standard_normal(Eigen::Index n);
  VectorXd dirichlet(const VectorXd& concentration);
  /// Index drawn with probability proportional to `weights`.
  int categorical(const VectorXd& weights);

  /// N(mean, cov) for a symmetric positive semidefinite `cov`. Returns false
  /// when `cov` is materially indefinite.
  bool try_mvn(const VectorXd& mean, const MatrixXd& cov, VectorXd& out);
  /// Sigma ~ IW(df, scale), i.e. Sigma^{-1} ~ Wishart(df, scale^{-1}).
  MatrixXd inverse_wishart(double df, const MatrixXd& scale);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace mementum
