// mementum: simulate, estimate and detect synchronized cointegration regimes.

#include "mementum/cli_report.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace mementum;

namespace {

struct InputOptions {
  std::string price, volume, tweets, combined, weekend = "sum_forward", transform = "log";
  bool no_draws = false, sequential = false;
};

void add_inputs(CLI::App* cmd, InputOptions& in, RunConfig& cfg) {
  cmd->add_option("--price", in.price, "price CSV (date,value)");
  cmd->add_option("--volume", in.volume, "volume CSV (date,value)");
  cmd->add_option("--tweets", in.tweets, "daily post-count CSV (date,value)");
  cmd->add_option("--combined", in.combined, "single CSV with date,price,volume,tweets");
  cmd->add_option("--ticker", cfg.ticker, "ticker label for reports");
  cmd->add_option("--weekend", in.weekend, "off-day posts: sum_forward or drop")
      ->check(CLI::IsMember({"sum_forward", "drop"}));
  cmd->add_option("--transform", in.transform, "log (log prices, log1p counts) or level")
      ->check(CLI::IsMember({"log", "level"}));
  cmd->add_option("--seed", cfg.mcmc.seed, "MCMC seed");
  cmd->add_option("--draws", cfg.mcmc.n_draws, "retained draws per pair");
  cmd->add_option("--burnin", cfg.mcmc.n_burnin, "burn-in sweeps");
  cmd->add_option("--thin", cfg.mcmc.thin, "keep every k-th sweep");
  cmd->add_flag("--no-draws", in.no_draws, "skip writing raw posterior draws");
  cmd->add_flag("--sequential", in.sequential, "estimate the two pairs one after the other");
}

void add_detector(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dc", cfg.detector.d_c, "minimum span length");
  cmd->add_option("--dp", cfg.detector.d_p, "minimum clean gap before a span");
  cmd->add_option("--df", cfg.detector.d_f, "longest fall merged into a span");
  cmd->add_option("--dw", cfg.detector.d_w, "largest start offset between pairs");
  cmd->add_flag("--filter-first", cfg.detector.filter_first, "filter persistence before merging falls");
  cmd->add_flag("--force", cfg.force, "combine regime files with different config hashes");
}

void apply_inputs(const InputOptions& in, RunConfig& cfg) {
  if (!in.price.empty()) cfg.price = in.price;
  if (!in.volume.empty()) cfg.volume = in.volume;
  if (!in.tweets.empty()) cfg.tweets = in.tweets;
  if (!in.combined.empty()) cfg.combined = in.combined;
  cfg.transform.weekend_policy = parse_weekend_policy(in.weekend);
  cfg.emit_draws = !in.no_draws;
  cfg.parallel_pairs = !in.sequential;
  if (in.transform == "level") {
    cfg.transform.price_transform = PriceTransform::level;
    cfg.transform.volume_transform = CountTransform::level;
    cfg.transform.tweets_transform = CountTransform::level;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect meme periods from price, volume and post-count series"};
  app.require_subcommand(1);

  RunConfig cfg;
  InputOptions in;
  std::string scenario, out, pr_file, vol_file;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic ticker from a scenario file");
  sim->add_option("--scenario", scenario, "scenario JSON")->required();
  sim->add_option("--out", out, "output directory")->required();

  auto* est = app.add_subcommand("estimate", "sample both pair posteriors and write regime files");
  add_inputs(est, in, cfg);
  est->add_option("--out", out, "output directory")->required();

  auto* det = app.add_subcommand("detect", "find meme periods in two regime files");
  det->add_option("--pr-tw", pr_file, "price/tweets regime CSV")->required();
  det->add_option("--vol-tw", vol_file, "volume/tweets regime CSV")->required();
  det->add_option("--ticker", cfg.ticker, "ticker label for reports");
  det->add_option("--out", out, "output directory")->required();
  add_detector(det, cfg);

  auto* run = app.add_subcommand("run", "estimate and detect in one go");
  add_inputs(run, in, cfg);
  add_detector(run, cfg);
  run->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.out_dir = out;
    if (*sim) {
      const auto result = cmd_simulate(scenario, out);
      std::cout << result.combined_csv.string() << '\n';
    } else if (*est) {
      apply_inputs(in, cfg);
      const auto result = cmd_estimate(cfg, std::cerr);
      std::cout << result.pr_tw_regimes.string() << '\n' << result.vol_tw_regimes.string() << '\n';
    } else if (*det) {
      cmd_detect(pr_file, vol_file, cfg, std::cout);
    } else if (*run) {
      apply_inputs(in, cfg);
      cmd_run(cfg, std::cout, std::cerr);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
