#pragma once

// Gibbs sampler for the time-varying-rank, time-varying-parameter VECM.
//
// One sweep draws, in order:
//   1. the rank path S_{1:T} by forward filtering / backward sampling,
//   2. each row of the transition matrix from its conjugate Dirichlet,
//   3. the loading path alpha_t, then the free beta path, each with a
//      Carter-Kohn simulation smoother, then the random-walk innovation
//      variances from their inverse-gamma conditionals,
//   4. (c, B) from their joint Gaussian conditional and Sigma from its
//      inverse-Wishart conditional.
//
// Factor paths are kept at maximal size and truncated to the current rank
// when Pi_t is assembled. With L_t unit lower-triangular (n(n-1)/2 free
// entries) and alpha_t n x n:
//   beta_t^(r) = L_t(:, 0:r),   alpha_t^(r) = alpha_t(0:r, :).
// Lower ranks are leading blocks of higher ones.

#include "mementum/random.hpp"
#include "mementum/types.hpp"
#include "mementum/vecm_core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mementum {

struct PriorSpec {
  /// Prior variance v0 of every element of (c, B); prior mean is zero.
  /// v0 = 0 pins (c, B) at zero.
  double coef_variance = 10.0;
  /// Inverse-Wishart degrees of freedom for Sigma; unset means n + 2.
  std::optional<double> sigma_df;
  /// Inverse-Wishart scale is sigma_scale * I.
  double sigma_scale = 1.0;
  double stay_concentration = 10.0;
  double move_concentration = 1.0;
  double tvp_shape = 3.0;
  double tvp_scale = 0.01;
  /// When set, every random-walk innovation variance is held at this value
  /// instead of being sampled (0 gives time-invariant factors).
  std::optional<double> tvp_fixed_variance;
  double initial_factor_variance = 10.0;

  double sigma_dof(Eigen::Index n) const { return sigma_df.value_or(static_cast<double>(n) + 2.0); }
  void validate(Eigen::Index n) const;
};

struct McmcSettings {
  int n_draws = 5000;
  int n_burnin = 1000;
  int thin = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Max-size factor paths. Column t of `alpha` is alpha_t flattened row-major;
/// column t of `lower` holds the strictly-lower entries of L_t in the order
/// given by FactorLayout::lower_entries().
struct FactorPaths {
  MatrixXd alpha;
  MatrixXd lower;
  VectorXd alpha_innovation;
  VectorXd lower_innovation;
};

class FactorLayout {
 public:
  explicit FactorLayout(Eigen::Index n);

  Eigen::Index dim() const { return n_; }
  Eigen::Index alpha_size() const { return n_ * n_; }
  Eigen::Index lower_size() const { return static_cast<Eigen::Index>(lower_.size()); }
  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& lower_entries() const { return lower_; }

  MatrixXd alpha(const FactorPaths& f, Eigen::Index t, Eigen::Index rank) const;
  MatrixXd beta(const FactorPaths& f, Eigen::Index t, Eigen::Index rank) const;
  MatrixXd pi(const FactorPaths& f, Eigen::Index t, Eigen::Index rank) const;

  FactorPaths zeros(Eigen::Index T, double innovation) const;
  CointFactors<double> coint_factors(const FactorPaths& f, const RankPath& path) const;
  MatrixSequence<double> pi_sequence(const FactorPaths& f, const RankPath& path) const;

 private:
  Eigen::Index n_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> lower_;
};

struct GibbsState {
  RankPath path;
  MatrixXd P;
  StaticParams<double> statics;
  FactorPaths factors;
};

struct SamplerCounters {
  std::uint64_t sweeps = 0;
  std::uint64_t ridge_fallbacks = 0;
  std::uint64_t covariance_repairs = 0;
};

struct PosteriorDraw {
  RankPath path;
  MatrixXd P;
  StaticParams<double> statics;
  FactorPaths factors;
  VectorXd loglik;  // per usable day, length T - 2
};

struct PosteriorDraws {
  Eigen::Index T = 0;
  Eigen::Index n = 0;
  PriorSpec prior;
  McmcSettings settings;
  SamplerCounters counters;
  std::vector<PosteriorDraw> draws;

  CointFactors<double> factors(std::size_t draw) const;
};

/// Log-density of day t's observation under every state; T x N, rows 0 and
/// 1 are zero (no usable observation).
MatrixXd state_loglik(const MatrixXd& y, const StaticParams<double>& statics, const FactorPaths& factors);

struct FilterResult {
  MatrixXd filtered;  // T x N, rows sum to one
  double log_marginal = 0.0;
};

/// Log-space forward filter with a uniform initial distribution.
FilterResult forward_filter(const MatrixXd& loglik, const MatrixXd& P);
RankPath backward_sample(const FilterResult& filter, const MatrixXd& P, Rng& rng);

RankPath sample_rank_path(const MatrixXd& y, const StaticParams<double>& statics, const FactorPaths& factors,
                          const MatrixXd& P, Rng& rng);

MatrixXd sample_transition_matrix(const RankPath& path, Eigen::Index states, const PriorSpec& prior, Rng& rng);

/// Carter-Kohn draw of a random-walk state path x_t = x_{t-1} + w_t,
/// w_t ~ N(0, diag(q)), x_0 ~ N(0, v0 I), observed through z_t = H_t x_t + e_t,
/// e_t ~ N(0, R) on the days where `has_obs` is set. Returns dim x T.
struct RandomWalkObservations {
  std::vector<bool> has_obs;
  std::vector<MatrixXd> H;
  std::vector<VectorXd> z;
};
MatrixXd simulate_random_walk_path(const RandomWalkObservations& obs, const MatrixXd& R, const VectorXd& q, double v0,
                                   Rng& rng, SamplerCounters* counters = nullptr);

FactorPaths sample_tvp_factors(const MatrixXd& y, const RankPath& path, const StaticParams<double>& statics,
                               const FactorPaths& current, const PriorSpec& prior, Rng& rng,
                               SamplerCounters* counters = nullptr);

/// Draws (c, B) given the current Sigma, then Sigma given the new (c, B).
StaticParams<double> sample_statics(const MatrixXd& y, const RankPath& path, const FactorPaths& factors,
                                    const StaticParams<double>& current, const PriorSpec& prior, Rng& rng,
                                    SamplerCounters* counters = nullptr);

/// Holds data, prior and the current state of one chain.
class GibbsSampler {
 public:
  GibbsSampler(MatrixXd y, PriorSpec prior, std::uint64_t seed);

  /// Data-driven starting point: rank 1 everywhere, least-squares statics,
  /// factors from a static rank-1 reduced-rank fit, then warmed up with the
  /// path held fixed.
  void initialize();
  void set_state(GibbsState state) { state_ = std::move(state); }
  void set_data(MatrixXd y);

  void sweep();

  const GibbsState& state() const { return state_; }
  const MatrixXd& data() const { return y_; }
  const SamplerCounters& counters() const { return counters_; }
  const std::string& current_step() const { return step_; }
  Rng& rng() { return rng_; }

  PosteriorDraw snapshot() const;

 private:
  MatrixXd y_;
  PriorSpec prior_;
  Rng rng_;
  GibbsState state_;
  SamplerCounters counters_;
  std::string step_ = "init";
};

using ProgressCallback = std::function<void(int done, int total)>;

PosteriorDraws run_mcmc(const MatrixXd& y, const PriorSpec& prior, const McmcSettings& settings,
                        const ProgressCallback& progress = {});

}  // namespace mementum
