#pragma once

#include "mementum/detector.hpp"
#include "mementum/posterior_sampler.hpp"
#include "mementum/regime_extract.hpp"
#include "mementum/series_ingest.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace mementum {

/// Bad command-line usage; the CLI maps it to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::optional<std::filesystem::path> price;
  std::optional<std::filesystem::path> volume;
  std::optional<std::filesystem::path> tweets;
  std::optional<std::filesystem::path> combined;
  std::string ticker;
  TransformSpec transform;
  PriorSpec prior;
  McmcSettings mcmc;
  DetectorConfig detector;
  std::filesystem::path out_dir;
  bool emit_regimes = true;
  bool emit_masks = true;
  bool emit_report = true;
  bool emit_summary = true;
  bool emit_draws = true;
  bool force = false;
  bool parallel_pairs = true;

  void validate() const;
};

/// Hash of everything that shapes estimation output (transforms, priors,
/// MCMC settings). Detection refuses regime files with different hashes.
std::string estimation_config_hash(const RunConfig& cfg);

std::string report_json(const MementumReport& report, const std::string& ticker, const std::string& config_hash);
void write_masks_csv(const std::filesystem::path& path, const MementumReport& report, const std::string& config_hash);
/// One line per period ("TICKER: 2021-01-13 → 2021-02-12") or a single
/// "TICKER: no period detected".
std::string summary_text(const MementumReport& report, const std::string& ticker);

struct SimulateResult {
  std::filesystem::path combined_csv;
};
SimulateResult cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& out_dir);

struct EstimateResult {
  std::filesystem::path pr_tw_regimes;
  std::filesystem::path vol_tw_regimes;
  std::string config_hash;
  std::string ticker;
};
EstimateResult cmd_estimate(const RunConfig& cfg, std::ostream& log);

MementumReport cmd_detect(const std::filesystem::path& pr_tw_regimes, const std::filesystem::path& vol_tw_regimes,
                          const RunConfig& cfg, std::ostream& out);

MementumReport cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace mementum
