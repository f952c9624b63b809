#pragma once

// Meme-period detection from the per-day rank paths of the price/posts and
// volume/posts models.
//
// Per pair: rank-1 runs -> merge short falls (gaps <= d_f) -> keep runs of
// length >= d_c preceded by >= d_p non-cointegrated days. Across pairs:
// match runs whose start days differ by <= d_w, intersect each matched
// pair and keep intersections of length >= d_c.
//
// All day arithmetic is in trading-day indices (0-based, inclusive ends).

#include "mementum/dates.hpp"
#include "mementum/regime_extract.hpp"
#include "mementum/vecm_core.hpp"

#include <string>
#include <vector>

namespace mementum {

struct DetectorConfig {
  int d_c = 2;  // minimum cointegration duration
  int d_p = 2;  // minimum preceding non-cointegrated duration
  int d_f = 1;  // longest fall that is merged away
  int d_w = 1;  // largest start-day delay between the pairs
  /// Apply the duration/precedence filter before merging falls.
  bool filter_first = false;

  void validate() const;
};

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool contains(std::size_t t) const { return t >= start && t <= end; }
  bool operator==(const Span&) const = default;
};

struct CointSpans {
  std::vector<Span> spans;
  std::size_t horizon = 0;

  bool operator==(const CointSpans&) const = default;
};

struct Period {
  std::size_t start = 0;
  std::size_t end = 0;
  Date start_date{};
  Date end_date{};

  std::size_t length() const { return end - start + 1; }
};

struct MementumReport {
  std::vector<Period> periods;
  std::vector<bool> cond1;  // both pairs inside a (merged) cointegration run
  std::vector<bool> cond2;  // inside a run that was start-matched with the other pair
  std::vector<bool> cond3;  // both pairs inside a run passing the persistence filter
  DetectorConfig config;
  std::vector<Date> dates;
  std::vector<std::string> input_hashes;

  std::vector<bool> mementum_mask() const;
};

CointSpans coint_spans(const RegimeIntervals& intervals);
CointSpans merge_falls(const CointSpans& spans, int d_f);
CointSpans persistence_filter(const CointSpans& spans, int d_c, int d_p);

/// Spans of one pair at the two stages the masks report on.
struct PairSpans {
  CointSpans cointegrated;  // merged runs (condition 1)
  CointSpans persistent;    // runs passing the persistence filter (condition 3)
};

MementumReport match_and_intersect(const PairSpans& pr_tw, const PairSpans& vol_tw, const DetectorConfig& cfg);
/// Both span sets already merged and filtered; they also serve as the
/// condition-1 spans.
MementumReport match_and_intersect(const CointSpans& pr_tw, const CointSpans& vol_tw, const DetectorConfig& cfg);

PairSpans pair_spans(const RankPath& path, const DetectorConfig& cfg);

MementumReport detect(const RankPath& pr_tw, const RankPath& vol_tw, const std::vector<Date>& dates,
                      const DetectorConfig& cfg = {});

}  // namespace mementum
