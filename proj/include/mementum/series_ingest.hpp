#pragma once

#include "mementum/dates.hpp"
#include "mementum/types.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mementum {

enum class SeriesKind { price, volume, tweets };

struct Observation {
  Date date;
  double value;
};

struct RawSeries {
  std::string ticker;
  SeriesKind kind = SeriesKind::price;
  std::vector<Observation> observations;
};

struct AlignedSeriesSet {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<double> price;
  std::vector<double> volume;
  std::vector<double> tweets;

  std::size_t size() const { return dates.size(); }
};

enum class PriceTransform { log, level };
enum class CountTransform { log1p, level };
enum class WeekendPolicy { sum_forward, drop };
enum class PairKind { pr_tw, vol_tw };

struct TransformSpec {
  PriceTransform price_transform = PriceTransform::log;
  CountTransform volume_transform = CountTransform::log1p;
  CountTransform tweets_transform = CountTransform::log1p;
  WeekendPolicy weekend_policy = WeekendPolicy::sum_forward;
  std::size_t min_length = 10;
};

struct PairSeries {
  std::pair<std::string, std::string> labels;
  MatrixXd y;  // T x 2, row t is the observation on dates[t]
  std::vector<Date> dates;

  Eigen::Index length() const { return y.rows(); }
};

std::string to_string(SeriesKind kind);
std::string to_string(WeekendPolicy policy);
std::string to_string(PairKind pair);
WeekendPolicy parse_weekend_policy(const std::string& text);

/// Reads a `date,value` file. Header optional; rows are returned sorted by
/// date. Prices must be strictly positive, volumes and counts nonnegative.
RawSeries load_csv(const std::filesystem::path& path, SeriesKind kind, const std::string& ticker = {});

/// Reads the combined `date,price,volume,tweets` layout into three series.
std::vector<RawSeries> load_combined_csv(const std::filesystem::path& path, const std::string& ticker = {});

/// Output calendar is the set of dates carried by both market series within
/// the common date range; post counts from non-trading days are folded per
/// `policy`. A trading day with no post-count row counts as zero posts.
AlignedSeriesSet align(const RawSeries& price, const RawSeries& volume, const RawSeries& tweets,
                       WeekendPolicy policy);

PairSeries make_pair(const AlignedSeriesSet& set, PairKind pair, const TransformSpec& spec = {});

void write_combined_csv(const std::filesystem::path& path, const AlignedSeriesSet& set);
void write_series_csv(const std::filesystem::path& path, const std::vector<Date>& dates,
                      const std::vector<double>& values);

/// Splits an aligned set back into raw series (one per kind).
std::vector<RawSeries> split(const AlignedSeriesSet& set);

}  // namespace mementum
