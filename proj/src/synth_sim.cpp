#include "mementum/synth_sim.hpp"

#include "mementum/errors.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mementum {

namespace {

constexpr double kExplosionLimit = 1e12;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_transition_matrix(const MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() == 0) throw ValidationError("transition matrix must be square and non-empty");
  if ((P.array() < 0.0).any() || (P.array() > 1.0).any()) {
    throw ValidationError("transition matrix entries must lie in [0, 1]");
  }
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if (std::abs(P.row(i).sum() - 1.0) > 1e-9) {
      throw ValidationError("transition matrix row " + std::to_string(i + 1) + " does not sum to 1");
    }
  }
}

RankPath simulate_chain(const MarkovPath& mode, Eigen::Index T, Rng& rng) {
  check_transition_matrix(mode.P);
  const auto N = mode.P.rows();
  VectorXd initial = mode.initial.size() == 0 ? VectorXd::Constant(N, 1.0 / static_cast<double>(N)) : mode.initial;
  if (initial.size() != N || (initial.array() < 0.0).any() || !(initial.sum() > 0.0)) {
    throw ValidationError("initial state distribution does not match the transition matrix");
  }
  RankPath path;
  path.states.resize(static_cast<std::size_t>(T));
  int s = rng.categorical(initial);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t > 0) s = rng.categorical(mode.P.row(s).transpose());
    path.states[static_cast<std::size_t>(t)] = s + 1;
  }
  return path;
}

RankPath make_path(const std::variant<ScriptedPath, MarkovPath>& mode, Eigen::Index T, Eigen::Index max_state,
                   Rng& rng) {
  if (const auto* scripted = std::get_if<ScriptedPath>(&mode)) {
    if (static_cast<Eigen::Index>(scripted->path.size()) != T) {
      throw ValidationError("scripted path length " + std::to_string(scripted->path.size()) + " differs from T=" +
                            std::to_string(T));
    }
    for (int s : scripted->path.states) {
      if (s < 1 || s > max_state) throw ValidationError("scripted state " + std::to_string(s) + " out of range");
    }
    return scripted->path;
  }
  const auto& markov = std::get<MarkovPath>(mode);
  if (markov.P.rows() != max_state) throw ValidationError("transition matrix must have " + std::to_string(max_state) + " states");
  return simulate_chain(markov, T, rng);
}

/// base + script perturbation for every day.
RowVectorXd scripted_values(double base, const FactorScript& script, Eigen::Index T, Rng& rng) {
  RowVectorXd out(T);
  double walk = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    switch (script.kind) {
      case FactorScript::Kind::constant:
        out(t) = base;
        break;
      case FactorScript::Kind::random_walk:
        if (t > 0) walk += std::sqrt(script.variance) * rng.normal();
        out(t) = base + walk;
        break;
      case FactorScript::Kind::sine:
        out(t) = base + script.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / script.period);
        break;
    }
  }
  return out;
}

MatrixXd cholesky_factor(const MatrixXd& Sigma) {
  Eigen::LLT<MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) throw ValidationError("Sigma is not positive definite");
  return llt.matrixL();
}

void guard_explosion(const RowVectorXd& row, Eigen::Index t) {
  if (!row.allFinite() || row.norm() > kExplosionLimit) {
    throw Error("simulated series exploded at t=" + std::to_string(t) +
                "; reduce the loadings or short-run coefficients so the recursion is stable");
  }
}

}  // namespace

RankPath gen_rank_path(const ScenarioSpec& spec) {
  Rng rng(stream_seed(spec.seed, 0));
  return make_path(spec.path_mode, spec.T, spec.dim() + 1, rng);
}

GeneratedSeries gen_series(const ScenarioSpec& spec, const RankPath& path) {
  const auto n = spec.dim();
  const auto T = spec.T;
  if (T < 3) throw ValidationError("scenario needs T >= 3");
  if (static_cast<Eigen::Index>(path.size()) != T) throw ValidationError("rank path length differs from T");
  for (int s : path.states) check_state(s, n);
  const FactorLayout layout(n);
  if (spec.alpha_base.rows() != n || spec.alpha_base.cols() != n) throw ValidationError("alpha_base must be n x n");
  if (spec.lower_base.size() != layout.lower_size()) {
    throw ValidationError("lower_base must hold " + std::to_string(layout.lower_size()) + " entries");
  }

  Rng rng(stream_seed(spec.seed, 1));
  GeneratedSeries out;
  GroundTruth& truth = out.truth;
  truth.path = path;
  truth.statics = spec.statics;
  truth.factors = layout.zeros(T, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      truth.factors.alpha.row(i * n + j) = scripted_values(spec.alpha_base(i, j), spec.alpha_script, T, rng);
    }
  }
  for (Eigen::Index k = 0; k < layout.lower_size(); ++k) {
    truth.factors.lower.row(k) = scripted_values(spec.lower_base(k), spec.beta_script, T, rng);
  }
  truth.Pi = layout.pi_sequence(truth.factors, path);

  const MatrixXd L = cholesky_factor(spec.statics.Sigma);
  truth.eps = MatrixXd::Zero(T, n);
  out.y = MatrixXd::Zero(T, n);
  if (spec.initial_rows.size() != 0) {
    if (spec.initial_rows.rows() != 2 || spec.initial_rows.cols() != n) throw ValidationError("initial_rows must be 2 x n");
    out.y.topRows(2) = spec.initial_rows;
  }
  for (Eigen::Index t = 2; t < T; ++t) {
    if (spec.noise_on) truth.eps.row(t) = (L * rng.standard_normal(n)).transpose();
    const RowVectorXd y_lag = out.y.row(t - 1);
    const RowVectorXd dy_lag = out.y.row(t - 1) - out.y.row(t - 2);
    out.y.row(t) = y_lag + spec.statics.c + y_lag * truth.Pi[static_cast<std::size_t>(t)] + dy_lag * spec.statics.B +
                   truth.eps.row(t);
    guard_explosion(out.y.row(t), t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// three-series scenarios

namespace {

GroundTruth pair_truth(const PairScenario& pair, const TickerScenario& sc, const RankPath& path,
                       const RowVectorXd& loading, const RowVectorXd& beta) {
  const FactorLayout layout(2);
  GroundTruth truth;
  truth.path = path;
  truth.statics.c = RowVectorXd{{pair.intercept, sc.tweets_intercept}};
  truth.statics.B = MatrixXd::Zero(2, 2);
  truth.statics.B(0, 0) = pair.ar;
  truth.statics.B(1, 1) = sc.tweets_ar;
  const double cov = pair.corr * pair.sigma * sc.tweets_sigma;
  truth.statics.Sigma = MatrixXd{{pair.sigma * pair.sigma, cov}, {cov, sc.tweets_sigma * sc.tweets_sigma}};
  truth.factors = layout.zeros(sc.T, 0.0);
  truth.factors.alpha.row(0) = loading;
  truth.factors.lower.row(0) = beta;
  truth.Pi = layout.pi_sequence(truth.factors, path);
  truth.eps = MatrixXd::Zero(sc.T, 2);
  return truth;
}

}  // namespace

GeneratedTicker generate_ticker(const TickerScenario& sc) {
  const auto T = sc.T;
  if (T < 3) throw ValidationError("scenario needs T >= 3");
  for (const PairScenario* p : {&sc.pr_tw, &sc.vol_tw}) {
    if (!(p->sigma > 0.0) || std::abs(p->corr) >= 1.0) throw ValidationError("pair shock scale/correlation invalid");
  }
  if (!(sc.tweets_sigma > 0.0)) throw ValidationError("tweets shock scale must be positive");

  Rng path_rng(stream_seed(sc.seed, 10));
  const RankPath path_p = make_path(sc.pr_tw.path_mode, T, 3, path_rng);
  const RankPath path_v = make_path(sc.vol_tw.path_mode, T, 3, path_rng);
  for (const RankPath* p : {&path_p, &path_v}) {
    for (int s : p->states) {
      if (s > 2) throw ValidationError("three-series scenarios support ranks 0 and 1 only");
    }
  }

  Rng factor_rng(stream_seed(sc.seed, 11));
  const RowVectorXd a_p = scripted_values(sc.pr_tw.loading, sc.pr_tw.loading_script, T, factor_rng);
  const RowVectorXd b_p = scripted_values(sc.pr_tw.beta, sc.pr_tw.beta_script, T, factor_rng);
  const RowVectorXd a_v = scripted_values(sc.vol_tw.loading, sc.vol_tw.loading_script, T, factor_rng);
  const RowVectorXd b_v = scripted_values(sc.vol_tw.beta, sc.vol_tw.beta_script, T, factor_rng);

  GeneratedTicker out;
  out.pr_tw = pair_truth(sc.pr_tw, sc, path_p, a_p, b_p);
  out.vol_tw = pair_truth(sc.vol_tw, sc, path_v, a_v, b_v);

  VectorXd price = VectorXd::Constant(T, sc.price_level);
  VectorXd volume = VectorXd::Constant(T, sc.volume_level);
  VectorXd tweets = VectorXd::Constant(T, sc.tweets_level);

  Rng noise_rng(stream_seed(sc.seed, 12));
  const double sp = sc.pr_tw.sigma, sv = sc.vol_tw.sigma, st = sc.tweets_sigma;
  for (Eigen::Index t = 2; t < T; ++t) {
    double e_tw = 0.0, e_p = 0.0, e_v = 0.0;
    if (sc.noise_on) {
      const double z_tw = noise_rng.normal();
      const double z_p = noise_rng.normal();
      const double z_v = noise_rng.normal();
      e_tw = st * z_tw;
      e_p = sp * (sc.pr_tw.corr * z_tw + std::sqrt(1.0 - sc.pr_tw.corr * sc.pr_tw.corr) * z_p);
      e_v = sv * (sc.vol_tw.corr * z_tw + std::sqrt(1.0 - sc.vol_tw.corr * sc.vol_tw.corr) * z_v);
    }
    const auto ts = static_cast<std::size_t>(t);
    const double ec_p = path_p.rank(ts) == 1 ? (price(t - 1) + b_p(t) * tweets(t - 1)) * a_p(t) : 0.0;
    const double ec_v = path_v.rank(ts) == 1 ? (volume(t - 1) + b_v(t) * tweets(t - 1)) * a_v(t) : 0.0;
    price(t) = price(t - 1) + sc.pr_tw.intercept + ec_p + sc.pr_tw.ar * (price(t - 1) - price(t - 2)) + e_p;
    volume(t) = volume(t - 1) + sc.vol_tw.intercept + ec_v + sc.vol_tw.ar * (volume(t - 1) - volume(t - 2)) + e_v;
    tweets(t) = tweets(t - 1) + sc.tweets_intercept + sc.tweets_ar * (tweets(t - 1) - tweets(t - 2)) + e_tw;
    out.pr_tw.eps.row(t) << e_p, e_tw;
    out.vol_tw.eps.row(t) << e_v, e_tw;
    guard_explosion(RowVectorXd{{price(t), volume(t), tweets(t)}}, t);
  }

  auto& set = out.series;
  set.ticker = sc.ticker;
  set.dates = weekday_calendar(sc.start_date, static_cast<std::size_t>(T));
  set.price.assign(price.data(), price.data() + T);
  set.volume.assign(volume.data(), volume.data() + T);
  set.tweets.assign(tweets.data(), tweets.data() + T);
  if ((price.array() <= 0.0).any() || (volume.array() < 0.0).any() || (tweets.array() < 0.0).any()) {
    throw ValidationError("simulated levels left the admissible range; raise the starting levels");
  }
  return out;
}

// ---------------------------------------------------------------------------
// scenario JSON

namespace {

using nlohmann::json;

FactorScript parse_script(const json& j) {
  if (j.is_null()) return FactorScript::constant();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return FactorScript::constant();
  if (kind == "random_walk") return FactorScript::random_walk(j.at("variance").get<double>());
  if (kind == "sine") return FactorScript::sine(j.at("amplitude").get<double>(), j.at("period").get<double>());
  throw ValidationError("unknown factor script kind '" + kind + "'");
}

std::variant<ScriptedPath, MarkovPath> parse_path(const json& j, Eigen::Index T) {
  if (j.contains("states")) {
    ScriptedPath sp;
    sp.path.states = j.at("states").get<std::vector<int>>();
    return sp;
  }
  if (j.contains("rank1_days")) {
    // 1-based inclusive day ranges carrying rank 1
    ScriptedPath sp;
    sp.path.states.assign(static_cast<std::size_t>(T), 1);
    for (const auto& range : j.at("rank1_days")) {
      const auto lo = range.at(0).get<long>();
      const auto hi = range.at(1).get<long>();
      if (lo < 1 || hi > T || lo > hi) throw ValidationError("rank1_days range out of bounds");
      for (long d = lo; d <= hi; ++d) sp.path.states[static_cast<std::size_t>(d - 1)] = 2;
    }
    return sp;
  }
  if (j.contains("markov")) {
    const auto& m = j.at("markov");
    const auto rows = m.at("P").get<std::vector<std::vector<double>>>();
    MarkovPath mp;
    mp.P.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw ValidationError("transition matrix must be square");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        mp.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
      }
    }
    if (m.contains("initial")) {
      const auto init = m.at("initial").get<std::vector<double>>();
      mp.initial = Eigen::Map<const VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
    }
    return mp;
  }
  throw ValidationError("pair scenario needs one of 'states', 'rank1_days' or 'markov'");
}

PairScenario parse_pair(const json& j, Eigen::Index T) {
  PairScenario p;
  p.path_mode = parse_path(j, T);
  p.intercept = j.value("intercept", p.intercept);
  p.ar = j.value("ar", p.ar);
  p.sigma = j.value("sigma", p.sigma);
  p.corr = j.value("corr", p.corr);
  p.loading = j.value("loading", p.loading);
  p.beta = j.value("beta", p.beta);
  if (j.contains("loading_script")) p.loading_script = parse_script(j.at("loading_script"));
  if (j.contains("beta_script")) p.beta_script = parse_script(j.at("beta_script"));
  return p;
}

json path_json(const RankPath& p) { return p.states; }

json truth_json(const GroundTruth& g) {
  json j;
  j["states"] = path_json(g.path);
  std::vector<double> loading(static_cast<std::size_t>(g.factors.alpha.cols()));
  std::vector<double> beta(static_cast<std::size_t>(g.factors.lower.cols()));
  for (Eigen::Index t = 0; t < g.factors.alpha.cols(); ++t) loading[static_cast<std::size_t>(t)] = g.factors.alpha(0, t);
  for (Eigen::Index t = 0; t < g.factors.lower.cols(); ++t) beta[static_cast<std::size_t>(t)] = g.factors.lower(0, t);
  j["loading"] = loading;
  j["beta"] = beta;
  j["c"] = std::vector<double>(g.statics.c.data(), g.statics.c.data() + g.statics.c.size());
  j["B"] = {{g.statics.B(0, 0), g.statics.B(0, 1)}, {g.statics.B(1, 0), g.statics.B(1, 1)}};
  j["Sigma"] = {{g.statics.Sigma(0, 0), g.statics.Sigma(0, 1)}, {g.statics.Sigma(1, 0), g.statics.Sigma(1, 1)}};
  return j;
}

}  // namespace

TickerScenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    TickerScenario sc;
    sc.ticker = j.value("ticker", sc.ticker);
    sc.T = j.at("T").get<Eigen::Index>();
    const auto start = parse_date(j.value("start_date", std::string("2021-01-04")));
    if (!start) throw ValidationError("scenario start_date is not an ISO-8601 date");
    sc.start_date = *start;
    sc.seed = j.value("seed", sc.seed);
    sc.noise_on = j.value("noise", sc.noise_on);
    if (j.contains("levels")) {
      const auto& lv = j.at("levels");
      sc.price_level = lv.value("price", sc.price_level);
      sc.volume_level = lv.value("volume", sc.volume_level);
      sc.tweets_level = lv.value("tweets", sc.tweets_level);
    }
    if (j.contains("tweets")) {
      const auto& tw = j.at("tweets");
      sc.tweets_intercept = tw.value("intercept", sc.tweets_intercept);
      sc.tweets_ar = tw.value("ar", sc.tweets_ar);
      sc.tweets_sigma = tw.value("sigma", sc.tweets_sigma);
    }
    sc.pr_tw = parse_pair(j.at("pr_tw"), sc.T);
    sc.vol_tw = parse_pair(j.at("vol_tw"), sc.T);
    return sc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad scenario: ") + e.what());
  }
}

TickerScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string ground_truth_json(const GeneratedTicker& generated, const TickerScenario& scenario) {
  json j;
  j["ticker"] = scenario.ticker;
  j["T"] = scenario.T;
  j["seed"] = scenario.seed;
  std::vector<std::string> dates;
  for (const auto& d : generated.series.dates) dates.push_back(format_date(d));
  j["dates"] = dates;
  j["pr_tw"] = truth_json(generated.pr_tw);
  j["vol_tw"] = truth_json(generated.vol_tw);
  return j.dump(2);
}

}  // namespace mementum
