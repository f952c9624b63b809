#include "mementum/posterior_sampler.hpp"

#include "mementum/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mementum {

namespace {

constexpr int kInitSweeps = 25;
constexpr double kWarmupInnovation = 1e-4;

double log_sum_exp(const VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

MatrixXd differences(const MatrixXd& y) {
  MatrixXd dy = MatrixXd::Zero(y.rows(), y.cols());
  if (y.rows() > 1) dy.bottomRows(y.rows() - 1) = y.bottomRows(y.rows() - 1) - y.topRows(y.rows() - 1);
  return dy;
}

/// z_t = dy_t - c - dy_{t-1} B for every usable day (rows 0 and 1 unused).
MatrixXd short_run_adjusted(const MatrixXd& y, const StaticParams<double>& statics) {
  const MatrixXd dy = differences(y);
  MatrixXd z = MatrixXd::Zero(y.rows(), y.cols());
  for (Eigen::Index t = 2; t < y.rows(); ++t) {
    z.row(t) = dy.row(t) - statics.c - dy.row(t - 1) * statics.B;
  }
  return z;
}

void check_data(const MatrixXd& y) {
  if (y.rows() < 3) throw DomainError("need at least 3 observations, got " + std::to_string(y.rows()));
  if (y.cols() < 1) throw DomainError("series dimension must be positive");
  if (!y.allFinite()) throw ValidationError("series contains non-finite values");
}

}  // namespace

void PriorSpec::validate(Eigen::Index n) const {
  if (!(coef_variance >= 0.0)) throw ValidationError("coefficient prior variance must be nonnegative");
  if (!(sigma_dof(n) > static_cast<double>(n) - 1.0)) throw ValidationError("Sigma prior degrees of freedom too small");
  if (!(sigma_scale > 0.0)) throw ValidationError("Sigma prior scale must be positive");
  if (!(stay_concentration > 0.0) || !(move_concentration > 0.0)) {
    throw ValidationError("Dirichlet concentrations must be positive");
  }
  if (!(tvp_shape > 0.0) || !(tvp_scale > 0.0)) throw ValidationError("innovation variance prior must be proper");
  if (tvp_fixed_variance && !(*tvp_fixed_variance >= 0.0)) {
    throw ValidationError("fixed innovation variance must be nonnegative");
  }
  if (!(initial_factor_variance > 0.0)) throw ValidationError("initial factor variance must be positive");
}

void McmcSettings::validate() const {
  if (n_draws < 1) throw ValidationError("n_draws must be at least 1");
  if (n_burnin < 0) throw ValidationError("n_burnin must be nonnegative");
  if (thin < 1) throw ValidationError("thin must be at least 1");
}

// ---------------------------------------------------------------------------
// factor layout

FactorLayout::FactorLayout(Eigen::Index n) : n_(n) {
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) lower_.emplace_back(i, j);
  }
}

MatrixXd FactorLayout::alpha(const FactorPaths& f, Eigen::Index t, Eigen::Index rank) const {
  MatrixXd full(n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (Eigen::Index j = 0; j < n_; ++j) full(i, j) = f.alpha(i * n_ + j, t);
  }
  return full.topRows(rank);
}

MatrixXd FactorLayout::beta(const FactorPaths& f, Eigen::Index t, Eigen::Index rank) const {
  MatrixXd b = MatrixXd::Identity(n_, rank);
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    const auto [i, j] = lower_[k];
    if (j < rank) b(i, j) = f.lower(static_cast<Eigen::Index>(k), t);
  }
  return b;
}

MatrixXd FactorLayout::pi(const FactorPaths& f, Eigen::Index t, Eigen::Index rank) const {
  if (rank == 0) return MatrixXd::Zero(n_, n_);
  return beta(f, t, rank) * alpha(f, t, rank);
}

FactorPaths FactorLayout::zeros(Eigen::Index T, double innovation) const {
  FactorPaths f;
  f.alpha = MatrixXd::Zero(alpha_size(), T);
  f.lower = MatrixXd::Zero(lower_size(), T);
  f.alpha_innovation = VectorXd::Constant(alpha_size(), innovation);
  f.lower_innovation = VectorXd::Constant(lower_size(), innovation);
  return f;
}

CointFactors<double> FactorLayout::coint_factors(const FactorPaths& f, const RankPath& path) const {
  CointFactors<double> out;
  for (std::size_t t = 0; t < path.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(path.rank(t));
    const MatrixXd b = beta(f, static_cast<Eigen::Index>(t), r);
    const MatrixXd a = alpha(f, static_cast<Eigen::Index>(t), r);
    const MatrixXd top = b.topRows(r);
    out.beta.push_back(top.transpose().triangularView<Eigen::UnitUpper>().solve(b.transpose()).transpose());
    out.alpha.push_back(top * a);
  }
  return out;
}

MatrixSequence<double> FactorLayout::pi_sequence(const FactorPaths& f, const RankPath& path) const {
  MatrixSequence<double> out;
  out.reserve(path.size());
  for (std::size_t t = 0; t < path.size(); ++t) {
    out.push_back(pi(f, static_cast<Eigen::Index>(t), path.rank(t)));
  }
  return out;
}

CointFactors<double> PosteriorDraws::factors(std::size_t draw) const {
  return FactorLayout(n).coint_factors(draws.at(draw).factors, draws.at(draw).path);
}

// ---------------------------------------------------------------------------
// rank path

MatrixXd state_loglik(const MatrixXd& y, const StaticParams<double>& statics, const FactorPaths& factors) {
  check_data(y);
  const auto T = y.rows();
  const auto n = y.cols();
  const FactorLayout layout(n);
  const GaussianLogDensity<double> density(statics.Sigma);
  const MatrixXd z = short_run_adjusted(y, statics);
  MatrixXd out = MatrixXd::Zero(T, n + 1);
  for (Eigen::Index t = 2; t < T; ++t) {
    const RowVectorXd y_lag = y.row(t - 1);
    for (Eigen::Index r = 0; r <= n; ++r) {
      const RowVectorXd e = z.row(t) - y_lag * layout.pi(factors, t, r);
      out(t, r) = density(e);
    }
  }
  return out;
}

FilterResult forward_filter(const MatrixXd& loglik, const MatrixXd& P) {
  const auto T = loglik.rows();
  const auto N = loglik.cols();
  if (P.rows() != N || P.cols() != N) throw DomainError("transition matrix does not match state count");
  const MatrixXd logP = P.array().log().matrix();
  FilterResult out;
  out.filtered.resize(T, N);
  VectorXd prev = VectorXd::Constant(N, -std::log(static_cast<double>(N)));
  for (Eigen::Index t = 0; t < T; ++t) {
    VectorXd f(N);
    if (t == 0) {
      f = prev + loglik.row(0).transpose();
    } else {
      for (Eigen::Index j = 0; j < N; ++j) f(j) = log_sum_exp(prev + logP.col(j)) + loglik(t, j);
    }
    const double norm = log_sum_exp(f);
    if (!std::isfinite(norm)) throw NumericalError("all-state likelihood underflow in rank filter", t);
    prev = f.array() - norm;
    VectorXd p = prev.array().exp();
    p /= p.sum();
    out.filtered.row(t) = p.transpose();
    out.log_marginal += norm;
  }
  return out;
}

RankPath backward_sample(const FilterResult& filter, const MatrixXd& P, Rng& rng) {
  const auto T = filter.filtered.rows();
  RankPath path;
  path.states.resize(static_cast<std::size_t>(T));
  int next = rng.categorical(filter.filtered.row(T - 1).transpose());
  path.states[static_cast<std::size_t>(T - 1)] = next + 1;
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const VectorXd w = filter.filtered.row(t).transpose().cwiseProduct(P.col(next));
    if (!(w.sum() > 0.0)) throw NumericalError("backward sampling weights vanish", t);
    next = rng.categorical(w);
    path.states[static_cast<std::size_t>(t)] = next + 1;
  }
  return path;
}

RankPath sample_rank_path(const MatrixXd& y, const StaticParams<double>& statics, const FactorPaths& factors,
                          const MatrixXd& P, Rng& rng) {
  return backward_sample(forward_filter(state_loglik(y, statics, factors), P), P, rng);
}

MatrixXd sample_transition_matrix(const RankPath& path, Eigen::Index states, const PriorSpec& prior, Rng& rng) {
  MatrixXd counts = MatrixXd::Zero(states, states);
  for (std::size_t t = 1; t < path.size(); ++t) {
    const int from = path.states[t - 1];
    const int to = path.states[t];
    if (from < 1 || from > states || to < 1 || to > states) throw DomainError("rank path state out of range");
    counts(from - 1, to - 1) += 1.0;
  }
  MatrixXd P(states, states);
  for (Eigen::Index i = 0; i < states; ++i) {
    VectorXd conc = VectorXd::Constant(states, prior.move_concentration);
    conc(i) = prior.stay_concentration;
    conc += counts.row(i).transpose();
    P.row(i) = rng.dirichlet(conc).transpose();
  }
  return P;
}

// ---------------------------------------------------------------------------
// factor paths

MatrixXd simulate_random_walk_path(const RandomWalkObservations& obs, const MatrixXd& R, const VectorXd& q, double v0,
                                   Rng& rng, SamplerCounters* counters) {
  const auto T = static_cast<Eigen::Index>(obs.has_obs.size());
  const auto dim = q.size();
  MatrixXd path(dim, T);
  if (dim == 0 || T == 0) return path;

  std::vector<VectorXd> m(static_cast<std::size_t>(T));
  std::vector<MatrixXd> C(static_cast<std::size_t>(T));
  const MatrixXd Q = q.asDiagonal();
  const MatrixXd I = MatrixXd::Identity(dim, dim);

  VectorXd mean = VectorXd::Zero(dim);
  MatrixXd cov = v0 * I;
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    if (t > 0) cov += Q;
    if (obs.has_obs[ts]) {
      const MatrixXd& H = obs.H[ts];
      const MatrixXd PHt = cov * H.transpose();
      MatrixXd S = H * PHt + R;
      S = 0.5 * (S + S.transpose());
      Eigen::LLT<MatrixXd> llt(S);
      if (llt.info() != Eigen::Success) {
        S.diagonal().array() += 1e-10;
        llt.compute(S);
        if (counters) ++counters->covariance_repairs;
        if (llt.info() != Eigen::Success) throw NumericalError("innovation covariance not positive definite", t);
      }
      const MatrixXd K = llt.solve(PHt.transpose()).transpose();
      mean += K * (obs.z[ts] - H * mean);
      const MatrixXd IKH = I - K * H;
      cov = IKH * cov * IKH.transpose() + K * R * K.transpose();
      cov = 0.5 * (cov + cov.transpose());
    }
    m[ts] = mean;
    C[ts] = cov;
  }

  VectorXd draw;
  if (!rng.try_mvn(m.back(), C.back(), draw)) throw NumericalError("filtered covariance not positive semidefinite", T - 1);
  path.col(T - 1) = draw;
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const auto ts = static_cast<std::size_t>(t);
    const MatrixXd& Ct = C[ts];
    MatrixXd pred = Ct + Q;
    pred = 0.5 * (pred + pred.transpose());
    Eigen::LDLT<MatrixXd> ldlt(pred);
    if (ldlt.info() != Eigen::Success) throw NumericalError("predicted covariance not invertible", t);
    const MatrixXd G = ldlt.solve(Ct).transpose();
    const VectorXd mu = m[ts] + G * (path.col(t + 1) - m[ts]);
    const MatrixXd S = Ct - G * Ct;
    if (!rng.try_mvn(mu, S, draw)) throw NumericalError("smoothed covariance not positive semidefinite", t);
    path.col(t) = draw;
  }
  return path;
}

namespace {

VectorXd sample_innovations(const MatrixXd& path, const PriorSpec& prior, Rng& rng) {
  const auto dim = path.rows();
  const auto T = path.cols();
  VectorXd q(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (prior.tvp_fixed_variance) {
      q(k) = *prior.tvp_fixed_variance;
      continue;
    }
    double ss = 0.0;
    for (Eigen::Index t = 1; t < T; ++t) {
      const double d = path(k, t) - path(k, t - 1);
      ss += d * d;
    }
    q(k) = rng.inverse_gamma(prior.tvp_shape + 0.5 * static_cast<double>(T - 1), prior.tvp_scale + 0.5 * ss);
  }
  return q;
}

/// Log-density of the steps of each row of `path` under N(0, q).
double random_walk_logpdf(const MatrixXd& path, double q) {
  if (path.cols() < 2 || !(q > 0.0)) return 0.0;
  const MatrixXd steps = path.rightCols(path.cols() - 1) - path.leftCols(path.cols() - 1);
  return -0.5 * (steps.squaredNorm() / q + static_cast<double>(steps.size()) * std::log(2.0 * std::numbers::pi * q));
}

/// Constant factor paths from a static rank-1 reduced-rank regression with
/// (1, dy_{t-1}) concentrated out; zero when the fit is degenerate.
FactorPaths static_rank1_start(const MatrixXd& y, const MatrixXd& X, const MatrixXd& Z, const FactorPaths& zeros) {
  const auto T = y.rows();
  const auto n = y.cols();
  const MatrixXd Y1 = y.middleRows(1, T - 2);
  const Eigen::LDLT<MatrixXd> xx(X.transpose() * X);
  if (xx.info() != Eigen::Success || !xx.isPositive()) return zeros;
  const MatrixXd R0 = Z - X * xx.solve(X.transpose() * Z);
  const MatrixXd R1 = Y1 - X * xx.solve(X.transpose() * Y1);
  const MatrixXd S00 = R0.transpose() * R0;
  const MatrixXd S11 = R1.transpose() * R1;
  const MatrixXd S01 = R0.transpose() * R1;
  const Eigen::LDLT<MatrixXd> s00(S00);
  if (s00.info() != Eigen::Success || !s00.isPositive()) return zeros;
  const MatrixXd M = S01.transpose() * s00.solve(S01);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> eig(0.5 * (M + M.transpose()), S11);
  if (eig.info() != Eigen::Success) return zeros;
  const VectorXd v = eig.eigenvectors().col(n - 1);
  if (!(std::abs(v(0)) > 1e-8 * v.cwiseAbs().maxCoeff())) return zeros;
  const VectorXd beta = v / v(0);
  const double denom = beta.dot(S11 * beta);
  if (!(denom > 0.0)) return zeros;
  const RowVectorXd alpha = (S01 * beta).transpose() / denom;
  if (!alpha.allFinite() || !beta.allFinite()) return zeros;

  FactorPaths f = zeros;
  for (Eigen::Index j = 0; j < n; ++j) f.alpha.row(j).setConstant(alpha(j));
  for (Eigen::Index i = 1; i < n; ++i) f.lower.row(i - 1).setConstant(beta(i));
  return f;
}

}  // namespace

FactorPaths sample_tvp_factors(const MatrixXd& y, const RankPath& path, const StaticParams<double>& statics,
                               const FactorPaths& current, const PriorSpec& prior, Rng& rng,
                               SamplerCounters* counters) {
  check_data(y);
  const auto T = y.rows();
  const auto n = y.cols();
  if (static_cast<Eigen::Index>(path.size()) != T) throw DomainError("rank path length does not match series");
  const FactorLayout layout(n);
  const MatrixXd z = short_run_adjusted(y, statics);
  FactorPaths out = current;

  // loadings given the free beta entries
  {
    RandomWalkObservations obs;
    obs.has_obs.assign(static_cast<std::size_t>(T), false);
    obs.H.resize(static_cast<std::size_t>(T));
    obs.z.resize(static_cast<std::size_t>(T));
    for (Eigen::Index t = 2; t < T; ++t) {
      const auto r = static_cast<Eigen::Index>(path.rank(static_cast<std::size_t>(t)));
      if (r == 0) continue;
      const auto ts = static_cast<std::size_t>(t);
      const RowVectorXd x = y.row(t - 1) * layout.beta(current, t, r);
      MatrixXd H = MatrixXd::Zero(n, layout.alpha_size());
      for (Eigen::Index k = 0; k < r; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) H(j, k * n + j) = x(k);
      }
      obs.has_obs[ts] = true;
      obs.H[ts] = std::move(H);
      obs.z[ts] = z.row(t).transpose();
    }
    out.alpha = simulate_random_walk_path(obs, statics.Sigma, current.alpha_innovation, prior.initial_factor_variance,
                                          rng, counters);
  }

  // free beta entries given the new loadings
  if (layout.lower_size() > 0) {
    RandomWalkObservations obs;
    obs.has_obs.assign(static_cast<std::size_t>(T), false);
    obs.H.resize(static_cast<std::size_t>(T));
    obs.z.resize(static_cast<std::size_t>(T));
    const auto& entries = layout.lower_entries();
    for (Eigen::Index t = 2; t < T; ++t) {
      const auto r = static_cast<Eigen::Index>(path.rank(static_cast<std::size_t>(t)));
      if (r == 0) continue;
      const auto ts = static_cast<std::size_t>(t);
      const MatrixXd a = layout.alpha(out, t, r);
      MatrixXd H = MatrixXd::Zero(n, layout.lower_size());
      for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto [i, j] = entries[k];
        if (j < r) H.col(static_cast<Eigen::Index>(k)) = y(t - 1, i) * a.row(j).transpose();
      }
      obs.has_obs[ts] = true;
      obs.H[ts] = std::move(H);
      obs.z[ts] = (z.row(t) - y.row(t - 1).head(r) * a).transpose();
    }
    out.lower = simulate_random_walk_path(obs, statics.Sigma, current.lower_innovation, prior.initial_factor_variance,
                                          rng, counters);
  }

  out.alpha_innovation = sample_innovations(out.alpha, prior, rng);
  out.lower_innovation = sample_innovations(out.lower, prior, rng);
  return out;
}

// ---------------------------------------------------------------------------
// static parameters

StaticParams<double> sample_statics(const MatrixXd& y, const RankPath& path, const FactorPaths& factors,
                                    const StaticParams<double>& current, const PriorSpec& prior, Rng& rng,
                                    SamplerCounters* counters) {
  check_data(y);
  const auto T = y.rows();
  const auto n = y.cols();
  const auto p = n + 1;
  const FactorLayout layout(n);
  const MatrixXd dy = differences(y);

  MatrixXd X(T - 2, p);
  MatrixXd Z(T - 2, n);
  for (Eigen::Index t = 2; t < T; ++t) {
    X(t - 2, 0) = 1.0;
    X.row(t - 2).tail(n) = dy.row(t - 1);
    Z.row(t - 2) = dy.row(t) - y.row(t - 1) * layout.pi(factors, t, path.rank(static_cast<std::size_t>(t)));
  }

  MatrixXd Gamma = MatrixXd::Zero(p, n);
  if (prior.coef_variance > 0.0) {
    const MatrixXd Sinv = current.Sigma.llt().solve(MatrixXd::Identity(n, n));
    const MatrixXd XtX = X.transpose() * X;
    const auto k = p * n;
    MatrixXd prec(k, k);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) prec.block(a * p, b * p, p, p) = Sinv(a, b) * XtX;
    }
    prec.diagonal().array() += 1.0 / prior.coef_variance;
    prec = 0.5 * (prec + prec.transpose());
    const MatrixXd rhs_mat = X.transpose() * Z * Sinv;
    const VectorXd rhs = Eigen::Map<const VectorXd>(rhs_mat.data(), k);
    Eigen::LLT<MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success) {
      prec.diagonal().array() += 1e-8;
      llt.compute(prec);
      if (counters) ++counters->ridge_fallbacks;
      if (llt.info() != Eigen::Success) throw NumericalError("coefficient precision not positive definite", -1);
    }
    const VectorXd mean = llt.solve(rhs);
    const VectorXd draw = mean + llt.matrixU().solve(rng.standard_normal(k));
    Gamma = Eigen::Map<const MatrixXd>(draw.data(), p, n);
  }

  StaticParams<double> out;
  out.c = Gamma.row(0);
  out.B = Gamma.bottomRows(n);
  const MatrixXd E = Z - X * Gamma;
  const MatrixXd scale = prior.sigma_scale * MatrixXd::Identity(n, n) + E.transpose() * E;
  out.Sigma = rng.inverse_wishart(prior.sigma_dof(n) + static_cast<double>(T - 2), scale);
  return out;
}

// ---------------------------------------------------------------------------
// chain driver

GibbsSampler::GibbsSampler(MatrixXd y, PriorSpec prior, std::uint64_t seed)
    : y_(std::move(y)), prior_(std::move(prior)), rng_(seed) {
  check_data(y_);
  prior_.validate(y_.cols());
}

void GibbsSampler::set_data(MatrixXd y) {
  check_data(y);
  if (y.rows() != y_.rows() || y.cols() != y_.cols()) throw DomainError("replacement data has a different shape");
  y_ = std::move(y);
}

void GibbsSampler::initialize() {
  step_ = "init";
  const auto T = y_.rows();
  const auto n = y_.cols();
  const auto N = n + 1;
  const FactorLayout layout(n);

  state_.path.states.assign(static_cast<std::size_t>(T), std::min<int>(2, static_cast<int>(N)));

  state_.P = MatrixXd::Constant(N, N, prior_.move_concentration);
  state_.P.diagonal().setConstant(prior_.stay_concentration);
  for (Eigen::Index i = 0; i < N; ++i) state_.P.row(i) /= state_.P.row(i).sum();

  // least squares for (c, B) with Pi = 0
  const MatrixXd dy = differences(y_);
  MatrixXd X(T - 2, n + 1);
  MatrixXd Z(T - 2, n);
  for (Eigen::Index t = 2; t < T; ++t) {
    X(t - 2, 0) = 1.0;
    X.row(t - 2).tail(n) = dy.row(t - 1);
    Z.row(t - 2) = dy.row(t);
  }
  MatrixXd Gamma = MatrixXd::Zero(n + 1, n);
  if (prior_.coef_variance > 0.0) {
    MatrixXd A = X.transpose() * X;
    A.diagonal().array() += 1.0 / prior_.coef_variance;
    Gamma = A.ldlt().solve(X.transpose() * Z);
  }
  state_.statics.c = Gamma.row(0);
  state_.statics.B = Gamma.bottomRows(n);
  const MatrixXd E = Z - X * Gamma;
  const double df = prior_.sigma_dof(n) + static_cast<double>(T - 2);
  state_.statics.Sigma =
      (prior_.sigma_scale * MatrixXd::Identity(n, n) + E.transpose() * E) / (df + static_cast<double>(n) + 1.0);

  const double innovation = prior_.tvp_fixed_variance.value_or(
      prior_.tvp_shape > 1.0 ? prior_.tvp_scale / (prior_.tvp_shape - 1.0) : prior_.tvp_scale);
  state_.factors = static_rank1_start(y_, X, Z, layout.zeros(T, innovation));

  // warm up from near-static and from prior-scale drift, keep the better fit
  std::vector<double> candidates{kWarmupInnovation, innovation};
  if (prior_.tvp_fixed_variance) candidates = {*prior_.tvp_fixed_variance};
  const GibbsState start = state_;
  GibbsState best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (double q : candidates) {
    state_ = start;
    PriorSpec warm = prior_;
    warm.tvp_fixed_variance = q;
    for (int k = 0; k < kInitSweeps; ++k) {
      step_ = "init:factors";
      state_.factors = sample_tvp_factors(y_, state_.path, state_.statics, state_.factors, warm, rng_, &counters_);
      step_ = "init:statics";
      state_.statics = sample_statics(y_, state_.path, state_.factors, state_.statics, warm, rng_, &counters_);
    }
    const double score = forward_filter(state_loglik(y_, state_.statics, state_.factors), state_.P).log_marginal +
                         random_walk_logpdf(state_.factors.alpha, innovation) +
                         random_walk_logpdf(state_.factors.lower, innovation);
    if (score > best_score) {
      best_score = score;
      best = state_;
    }
  }
  state_ = std::move(best);
}

void GibbsSampler::sweep() {
  step_ = "rank_path";
  state_.path = sample_rank_path(y_, state_.statics, state_.factors, state_.P, rng_);
  step_ = "transition_matrix";
  state_.P = sample_transition_matrix(state_.path, y_.cols() + 1, prior_, rng_);
  step_ = "tvp_factors";
  state_.factors = sample_tvp_factors(y_, state_.path, state_.statics, state_.factors, prior_, rng_, &counters_);
  step_ = "statics";
  state_.statics = sample_statics(y_, state_.path, state_.factors, state_.statics, prior_, rng_, &counters_);
  ++counters_.sweeps;
}

PosteriorDraw GibbsSampler::snapshot() const {
  const FactorLayout layout(y_.cols());
  PosteriorDraw d{state_.path, state_.P, state_.statics, state_.factors, {}};
  d.loglik = loglik_by_time(y_, state_.statics, layout.pi_sequence(state_.factors, state_.path));
  return d;
}

PosteriorDraws run_mcmc(const MatrixXd& y, const PriorSpec& prior, const McmcSettings& settings,
                        const ProgressCallback& progress) {
  settings.validate();
  GibbsSampler sampler(y, prior, settings.seed);
  PosteriorDraws out;
  out.T = y.rows();
  out.n = y.cols();
  out.prior = prior;
  out.settings = settings;
  out.draws.reserve(static_cast<std::size_t>(settings.n_draws));

  const int total = settings.n_burnin + settings.n_draws * settings.thin;
  int iteration = 0;
  try {
    sampler.initialize();
    for (iteration = 1; iteration <= total; ++iteration) {
      sampler.sweep();
      const int after_burnin = iteration - settings.n_burnin;
      if (after_burnin > 0 && after_burnin % settings.thin == 0) out.draws.push_back(sampler.snapshot());
      if (progress) progress(iteration, total);
    }
  } catch (const std::exception& e) {
    throw Error("MCMC failed at draw " + std::to_string(iteration) + ", step " + sampler.current_step() + ": " +
                e.what());
  }
  out.counters = sampler.counters();
  return out;
}

}  // namespace mementum
