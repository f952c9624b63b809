#pragma once

#include "mementum/dates.hpp"
#include "mementum/posterior_sampler.hpp"
#include "mementum/types.hpp"
#include "mementum/vecm_core.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mementum {

struct RankPosterior {
  MatrixXd probs;     // T x N state frequencies
  RankPath map_path;  // per-day argmax, ties to the lower state
};

/// Day indices are 0-based and inclusive.
struct RegimeInterval {
  std::size_t start = 0;
  std::size_t end = 0;
  int rank = 0;

  bool operator==(const RegimeInterval&) const = default;
};

struct RegimeIntervals {
  std::vector<RegimeInterval> intervals;
  std::vector<Date> calendar;
};

RankPosterior summarize(const std::vector<RankPath>& paths, Eigen::Index states);
RankPosterior summarize(const PosteriorDraws& draws);

RegimeIntervals to_intervals(const RankPath& path, const std::vector<Date>& dates);
RankPath expand(const RegimeIntervals& intervals);

/// Contents of a regime CSV (`date,state,rank,p_rank0,...`).
struct RegimeTable {
  std::vector<Date> dates;
  RankPosterior posterior;
  std::string config_hash;
  std::string ticker;
};

void write_regime_csv(const std::filesystem::path& path, const std::vector<Date>& dates, const RankPosterior& posterior,
                      const std::string& config_hash, const std::string& ticker = {});
RegimeTable read_regime_csv(const std::filesystem::path& path);

}  // namespace mementum
