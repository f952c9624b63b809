#include "mementum/cli_report.hpp"

#include "mementum/draws_io.hpp"
#include "mementum/errors.hpp"
#include "mementum/hashing.hpp"
#include "mementum/synth_sim.hpp"

#include <json.hpp>

#include <fstream>
#include <future>
#include <mutex>
#include <ostream>
#include <sstream>

namespace mementum {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

AlignedSeriesSet load_inputs(const RunConfig& cfg) {
  std::vector<RawSeries> raw;
  if (cfg.combined) {
    raw = load_combined_csv(*cfg.combined, cfg.ticker);
  } else {
    raw.push_back(load_csv(*cfg.price, SeriesKind::price, cfg.ticker));
    raw.push_back(load_csv(*cfg.volume, SeriesKind::volume, cfg.ticker));
    raw.push_back(load_csv(*cfg.tweets, SeriesKind::tweets, cfg.ticker));
  }
  return align(raw[0], raw[1], raw[2], cfg.transform.weekend_policy);
}

std::string aligned_hash(const AlignedSeriesSet& set) {
  std::ostringstream out;
  char buf[96];
  for (std::size_t t = 0; t < set.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n", format_date(set.dates[t]).c_str(), set.price[t],
                  set.volume[t], set.tweets[t]);
    out << buf;
  }
  return git_blob_hash(out.str());
}

std::string transform_name(PriceTransform t) { return t == PriceTransform::log ? "log" : "level"; }
std::string transform_name(CountTransform t) { return t == CountTransform::log1p ? "log1p" : "level"; }

}  // namespace

void RunConfig::validate() const {
  const bool separate = price || volume || tweets;
  if (combined && separate) throw UsageError("give either --combined or --price/--volume/--tweets, not both");
  if (!combined && !(price && volume && tweets)) {
    throw UsageError("need --price, --volume and --tweets (or --combined)");
  }
  if (out_dir.empty()) throw UsageError("need --out");
  mcmc.validate();
  prior.validate(2);
  detector.validate();
}

std::string estimation_config_hash(const RunConfig& cfg) {
  json j;
  j["transform"] = {{"price", transform_name(cfg.transform.price_transform)},
                    {"volume", transform_name(cfg.transform.volume_transform)},
                    {"tweets", transform_name(cfg.transform.tweets_transform)},
                    {"weekend", to_string(cfg.transform.weekend_policy)},
                    {"min_length", cfg.transform.min_length}};
  j["priors"] = prior_to_json(cfg.prior);
  j["settings"] = settings_to_json(cfg.mcmc);
  return git_blob_hash(j.dump());
}

std::string report_json(const MementumReport& report, const std::string& ticker, const std::string& config_hash) {
  json j;
  j["ticker"] = ticker;
  j["config"] = {{"d_c", report.config.d_c},
                 {"d_p", report.config.d_p},
                 {"d_f", report.config.d_f},
                 {"d_w", report.config.d_w},
                 {"filter_first", report.config.filter_first}};
  j["config_hash"] = config_hash;
  j["input_hashes"] = report.input_hashes;
  json periods = json::array();
  for (const auto& p : report.periods) {
    if (report.dates.empty()) {
      periods.push_back({p.start, p.end});
    } else {
      periods.push_back({format_date(p.start_date), format_date(p.end_date)});
    }
  }
  j["periods"] = periods;
  std::vector<std::string> dates;
  for (const auto& d : report.dates) dates.push_back(format_date(d));
  auto as_ints = [](const std::vector<bool>& m) {
    std::vector<int> v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i] ? 1 : 0;
    return v;
  };
  j["masks"] = {{"dates", dates},
                {"cond1", as_ints(report.cond1)},
                {"cond2", as_ints(report.cond2)},
                {"cond3", as_ints(report.cond3)},
                {"mementum", as_ints(report.mementum_mask())}};
  return j.dump(2) + "\n";
}

void write_masks_csv(const fs::path& path, const MementumReport& report, const std::string& config_hash) {
  std::ostringstream out;
  out << "# config_hash=" << config_hash << '\n';
  out << "date,cond1,cond2,cond3,mementum\n";
  const auto mask = report.mementum_mask();
  for (std::size_t t = 0; t < report.cond1.size(); ++t) {
    out << (report.dates.empty() ? std::to_string(t) : format_date(report.dates[t])) << ',' << report.cond1[t] << ','
        << report.cond2[t] << ',' << report.cond3[t] << ',' << mask[t] << '\n';
  }
  write_text(path, out.str());
}

std::string summary_text(const MementumReport& report, const std::string& ticker) {
  const std::string name = ticker.empty() ? "TICKER" : ticker;
  if (report.periods.empty()) return name + ": no period detected\n";
  std::string out;
  for (const auto& p : report.periods) {
    if (report.dates.empty()) {
      out += name + ": day " + std::to_string(p.start + 1) + " → day " + std::to_string(p.end + 1) + "\n";
    } else {
      out += name + ": " + format_date(p.start_date) + " → " + format_date(p.end_date) + "\n";
    }
  }
  return out;
}

SimulateResult cmd_simulate(const fs::path& scenario_path, const fs::path& out_dir) {
  const TickerScenario scenario = load_scenario(scenario_path);
  const GeneratedTicker generated = generate_ticker(scenario);
  ensure_dir(out_dir);
  const auto& s = generated.series;
  write_series_csv(out_dir / "price.csv", s.dates, s.price);
  write_series_csv(out_dir / "volume.csv", s.dates, s.volume);
  write_series_csv(out_dir / "tweets.csv", s.dates, s.tweets);
  write_combined_csv(out_dir / "combined.csv", s);
  write_text(out_dir / "ground_truth.json", ground_truth_json(generated, scenario) + "\n");
  return {out_dir / "combined.csv"};
}

EstimateResult cmd_estimate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const AlignedSeriesSet set = load_inputs(cfg);
  const std::string ticker = !cfg.ticker.empty() ? cfg.ticker : (set.ticker.empty() ? "TICKER" : set.ticker);
  const PairSeries pr = make_pair(set, PairKind::pr_tw, cfg.transform);
  const PairSeries vol = make_pair(set, PairKind::vol_tw, cfg.transform);
  ensure_dir(cfg.out_dir);

  const std::string config_hash = estimation_config_hash(cfg);
  const std::string input_hash = aligned_hash(set);

  std::mutex log_mutex;
  auto estimate = [&](const PairSeries& pair, PairKind kind, std::uint64_t seed) {
    McmcSettings settings = cfg.mcmc;
    settings.seed = seed;
    const std::string name = to_string(kind);
    int last_decile = -1;
    auto progress = [&](int done, int total) {
      const int decile = 10 * done / total;
      if (decile == last_decile) return;
      last_decile = decile;
      std::lock_guard lock(log_mutex);
      log << name << ": " << 10 * decile << "% (" << done << "/" << total << " sweeps)\n";
    };
    try {
      return run_mcmc(pair.y, cfg.prior, settings, progress);
    } catch (const std::exception& e) {
      throw Error("estimation failed for " + name + ": " + e.what());
    }
  };

  // the two chains get distinct, seed-derived streams
  const std::uint64_t seed_pr = cfg.mcmc.seed * 2;
  const std::uint64_t seed_vol = cfg.mcmc.seed * 2 + 1;
  PosteriorDraws draws_pr, draws_vol;
  if (cfg.parallel_pairs) {
    auto fut = std::async(std::launch::async, estimate, std::cref(vol), PairKind::vol_tw, seed_vol);
    draws_pr = estimate(pr, PairKind::pr_tw, seed_pr);
    draws_vol = fut.get();
  } else {
    draws_pr = estimate(pr, PairKind::pr_tw, seed_pr);
    draws_vol = estimate(vol, PairKind::vol_tw, seed_vol);
  }

  EstimateResult result;
  result.config_hash = config_hash;
  result.ticker = ticker;
  for (const auto& [kind, draws] : {std::pair{PairKind::pr_tw, &draws_pr}, std::pair{PairKind::vol_tw, &draws_vol}}) {
    const std::string name = to_string(kind);
    const fs::path regimes = cfg.out_dir / (name + "_regimes.csv");
    write_regime_csv(regimes, set.dates, summarize(*draws), config_hash, ticker);
    if (cfg.emit_draws) {
      const std::string bin = name + "_draws.bin";
      write_draws_binary(cfg.out_dir / bin, *draws);
      write_text(cfg.out_dir / (name + "_manifest.json"),
                 draws_manifest(*draws, bin, input_hash, config_hash).dump(2) + "\n");
    }
    (kind == PairKind::pr_tw ? result.pr_tw_regimes : result.vol_tw_regimes) = regimes;
  }
  return result;
}

MementumReport cmd_detect(const fs::path& pr_path, const fs::path& vol_path, const RunConfig& cfg, std::ostream& out) {
  cfg.detector.validate();
  if (cfg.out_dir.empty()) throw UsageError("need --out");
  const RegimeTable pr = read_regime_csv(pr_path);
  const RegimeTable vol = read_regime_csv(vol_path);

  const auto common = std::min(pr.dates.size(), vol.dates.size());
  for (std::size_t t = 0; t < common; ++t) {
    if (pr.dates[t] != vol.dates[t]) {
      throw ValidationError("regime calendars diverge at row " + std::to_string(t + 1) + ": " +
                            format_date(pr.dates[t]) + " vs " + format_date(vol.dates[t]));
    }
  }
  if (pr.dates.size() != vol.dates.size()) {
    const auto& longer = pr.dates.size() > vol.dates.size() ? pr.dates : vol.dates;
    throw ValidationError("regime calendars diverge at row " + std::to_string(common + 1) + ": " +
                          format_date(longer[common]) + " present in only one file");
  }
  if (pr.config_hash != vol.config_hash && !cfg.force) {
    throw ValidationError("regime files come from different configurations (" + pr.config_hash + " vs " +
                          vol.config_hash + "); pass --force to combine them");
  }

  MementumReport report = detect(pr.posterior.map_path, vol.posterior.map_path, pr.dates, cfg.detector);
  report.input_hashes = {git_blob_hash_file(pr_path), git_blob_hash_file(vol_path)};
  const std::string ticker = !cfg.ticker.empty() ? cfg.ticker : (pr.ticker.empty() ? "TICKER" : pr.ticker);
  const std::string hash = pr.config_hash;

  ensure_dir(cfg.out_dir);
  if (cfg.emit_report) write_text(cfg.out_dir / "report.json", report_json(report, ticker, hash));
  if (cfg.emit_masks) write_masks_csv(cfg.out_dir / "masks.csv", report, hash);
  const std::string summary = summary_text(report, ticker);
  if (cfg.emit_summary) write_text(cfg.out_dir / "summary.txt", summary);
  out << summary;
  return report;
}

MementumReport cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const EstimateResult est = cmd_estimate(cfg, log);
  RunConfig detect_cfg = cfg;
  detect_cfg.ticker = est.ticker;
  return cmd_detect(est.pr_tw_regimes, est.vol_tw_regimes, detect_cfg, out);
}

}  // namespace mementum
