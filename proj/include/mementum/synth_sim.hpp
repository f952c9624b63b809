#pragma once

#include "mementum/posterior_sampler.hpp"
#include "mementum/series_ingest.hpp"
#include "mementum/types.hpp"
#include "mementum/vecm_core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace mementum {

/// How a factor element moves around its base value.
struct FactorScript {
  enum class Kind { constant, random_walk, sine };
  Kind kind = Kind::constant;
  double variance = 0.0;   // random_walk step variance
  double amplitude = 0.0;  // sine
  double period = 1.0;     // sine, in days

  static FactorScript constant() { return {}; }
  static FactorScript random_walk(double variance) { return {Kind::random_walk, variance, 0.0, 1.0}; }
  static FactorScript sine(double amplitude, double period) { return {Kind::sine, 0.0, amplitude, period}; }
};

struct ScriptedPath {
  RankPath path;
};

struct MarkovPath {
  MatrixXd P;
  VectorXd initial;  // distribution of the first state
};

struct ScenarioSpec {
  Eigen::Index T = 0;
  std::variant<ScriptedPath, MarkovPath> path_mode;
  StaticParams<double> statics;
  /// Max-size factor values (alpha is n x n; lower holds the free beta
  /// entries in FactorLayout order) that the scripts perturb.
  MatrixXd alpha_base;
  VectorXd lower_base;
  FactorScript alpha_script;
  FactorScript beta_script;
  bool noise_on = true;
  std::uint64_t seed = 1;
  /// Rows y_1 and y_2; zero when empty.
  MatrixXd initial_rows;

  Eigen::Index dim() const { return statics.dim(); }
};

struct GroundTruth {
  RankPath path;
  FactorPaths factors;
  MatrixSequence<double> Pi;
  StaticParams<double> statics;
  MatrixXd eps;  // T x n, rows 0 and 1 are zero
};

struct GeneratedSeries {
  MatrixXd y;
  GroundTruth truth;
};

RankPath gen_rank_path(const ScenarioSpec& spec);

GeneratedSeries gen_series(const ScenarioSpec& spec, const RankPath& path);

// ---------------------------------------------------------------------------
// Three-series scenarios (price, volume, tweets) for end-to-end runs.
//
// Post counts follow an autonomous AR(1)-in-differences walk. Price and
// volume each error-correct towards the count level while their own rank
// path is 1:
//   dp_t = c_p + (p_{t-1} + b_t tw_{t-1}) a_t + phi_p dp_{t-1} + e_p,t
// so each (series, tweets) pair is exactly the bivariate model with
// alpha = [[a, 0], [0, 0]], beta = (1, b)'. Only ranks 0 and 1 occur.

struct PairScenario {
  std::variant<ScriptedPath, MarkovPath> path_mode;
  double intercept = 0.0;
  double ar = 0.0;
  double sigma = 0.01;
  double corr = 0.0;  // correlation of the pair's shock with the count shock
  double loading = -0.3;
  double beta = -1.0;
  FactorScript loading_script;
  FactorScript beta_script;
};

struct TickerScenario {
  std::string ticker = "SIM";
  Eigen::Index T = 0;
  Date start_date{};
  std::uint64_t seed = 1;
  bool noise_on = true;
  double price_level = 100.0;
  double volume_level = 100.0;
  double tweets_level = 100.0;
  double tweets_intercept = 0.0;
  double tweets_ar = 0.0;
  double tweets_sigma = 0.01;
  PairScenario pr_tw;
  PairScenario vol_tw;
};

struct GeneratedTicker {
  AlignedSeriesSet series;  // level-scale values; estimate with level transforms
  GroundTruth pr_tw;
  GroundTruth vol_tw;
};

GeneratedTicker generate_ticker(const TickerScenario& scenario);

TickerScenario load_scenario(const std::filesystem::path& path);
TickerScenario parse_scenario(const std::string& json_text);

/// Ground truth as JSON (paths, factors, statics) for audit files.
std::string ground_truth_json(const GeneratedTicker& generated, const TickerScenario& scenario);

}  // namespace mementum
