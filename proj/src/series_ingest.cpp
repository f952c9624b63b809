#include "mementum/series_ingest.hpp"

#include "mementum/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

namespace mementum {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view text, double& out) {
  if (text.empty()) return false;
  const std::string buf(text);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && errno == 0 && std::isfinite(out);
}

struct CsvRow {
  std::size_t line_no;
  Date date;
  std::vector<double> values;
};

std::vector<CsvRow> read_rows(const std::filesystem::path& path, std::size_t value_columns) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body);
    const auto date = parse_date(fields.front());
    if (first_content_line) {
      first_content_line = false;
      if (!date) continue;  // header
    }
    if (!date) throw ParseError("malformed date '" + std::string(fields.front()) + "' in " + path.string(), line_no);
    if (fields.size() != value_columns + 1) {
      throw ParseError("expected " + std::to_string(value_columns + 1) + " columns in " + path.string(), line_no);
    }
    CsvRow row{line_no, *date, {}};
    row.values.resize(value_columns);
    for (std::size_t k = 0; k < value_columns; ++k) {
      if (!parse_number(fields[k + 1], row.values[k])) {
        throw ParseError("malformed number '" + std::string(fields[k + 1]) + "' in " + path.string(), line_no);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("no observations in " + path.string());
  return rows;
}

void validate_value(SeriesKind kind, double value, std::size_t line_no) {
  if (kind == SeriesKind::price && !(value > 0.0)) {
    throw ValidationError("non-positive price on row " + std::to_string(line_no));
  }
  if (kind != SeriesKind::price && value < 0.0) {
    throw ValidationError("negative " + to_string(kind) + " on row " + std::to_string(line_no));
  }
}

void sort_and_check(RawSeries& series) {
  auto& obs = series.observations;
  std::stable_sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < obs.size(); ++i) {
    if (obs[i].date == obs[i - 1].date) {
      throw ValidationError("duplicate date " + format_date(obs[i].date) + " in " + to_string(series.kind) + " series");
    }
  }
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::price: return "price";
    case SeriesKind::volume: return "volume";
    case SeriesKind::tweets: return "tweets";
  }
  return "?";
}

std::string to_string(WeekendPolicy policy) {
  return policy == WeekendPolicy::sum_forward ? "sum_forward" : "drop";
}

std::string to_string(PairKind pair) { return pair == PairKind::pr_tw ? "pr_tw" : "vol_tw"; }

WeekendPolicy parse_weekend_policy(const std::string& text) {
  if (text == "sum_forward") return WeekendPolicy::sum_forward;
  if (text == "drop") return WeekendPolicy::drop;
  throw ValidationError("unknown weekend policy '" + text + "'");
}

RawSeries load_csv(const std::filesystem::path& path, SeriesKind kind, const std::string& ticker) {
  RawSeries series{ticker, kind, {}};
  for (const auto& row : read_rows(path, 1)) {
    validate_value(kind, row.values[0], row.line_no);
    series.observations.push_back({row.date, row.values[0]});
  }
  sort_and_check(series);
  return series;
}

std::vector<RawSeries> load_combined_csv(const std::filesystem::path& path, const std::string& ticker) {
  std::vector<RawSeries> out{{ticker, SeriesKind::price, {}},
                             {ticker, SeriesKind::volume, {}},
                             {ticker, SeriesKind::tweets, {}}};
  for (const auto& row : read_rows(path, 3)) {
    for (std::size_t k = 0; k < 3; ++k) {
      validate_value(out[k].kind, row.values[k], row.line_no);
      out[k].observations.push_back({row.date, row.values[k]});
    }
  }
  for (auto& s : out) sort_and_check(s);
  return out;
}

AlignedSeriesSet align(const RawSeries& price, const RawSeries& volume, const RawSeries& tweets,
                       WeekendPolicy policy) {
  std::string ticker;
  for (const RawSeries* s : {&price, &volume, &tweets}) {
    if (s->ticker.empty()) continue;
    if (!ticker.empty() && ticker != s->ticker) {
      throw ValidationError("ticker mismatch: " + ticker + " vs " + s->ticker);
    }
    ticker = s->ticker;
  }
  for (const RawSeries* s : {&price, &volume, &tweets}) {
    if (s->observations.empty()) throw ValidationError("no observations in " + to_string(s->kind) + " series");
  }

  const Date lo = std::max({price.observations.front().date, volume.observations.front().date,
                            tweets.observations.front().date});
  const Date hi = std::min({price.observations.back().date, volume.observations.back().date,
                            tweets.observations.back().date});
  if (lo > hi) throw ValidationError("empty overlap between price, volume and tweets date ranges");

  std::map<Date, double> price_by_day, volume_by_day;
  for (const auto& o : price.observations) {
    if (o.date >= lo && o.date <= hi) price_by_day.emplace(o.date, o.value);
  }
  for (const auto& o : volume.observations) {
    if (o.date >= lo && o.date <= hi) volume_by_day.emplace(o.date, o.value);
  }

  std::vector<std::string> missing;
  for (const auto& [d, v] : price_by_day) {
    if (!volume_by_day.contains(d)) missing.push_back(format_date(d) + " (volume)");
  }
  for (const auto& [d, v] : volume_by_day) {
    if (!price_by_day.contains(d)) missing.push_back(format_date(d) + " (price)");
  }
  if (!missing.empty()) {
    std::string msg = "missing market values on trading days:";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }
  if (price_by_day.empty()) throw ValidationError("empty overlap: no trading days in common date range");

  AlignedSeriesSet out;
  out.ticker = ticker;
  for (const auto& [d, v] : price_by_day) {
    out.dates.push_back(d);
    out.price.push_back(v);
    out.volume.push_back(volume_by_day.at(d));
  }
  out.tweets.assign(out.dates.size(), 0.0);

  for (const auto& o : tweets.observations) {
    if (o.date < lo || o.date > hi) continue;
    const auto it = std::lower_bound(out.dates.begin(), out.dates.end(), o.date);
    if (it == out.dates.end()) continue;
    if (*it == o.date || policy == WeekendPolicy::sum_forward) {
      out.tweets[static_cast<std::size_t>(it - out.dates.begin())] += o.value;
    }
  }
  return out;
}

PairSeries make_pair(const AlignedSeriesSet& set, PairKind pair, const TransformSpec& spec) {
  const auto T = set.size();
  if (set.price.size() != T || set.volume.size() != T || set.tweets.size() != T) {
    throw ValidationError("aligned series have unequal lengths");
  }
  if (T < spec.min_length) {
    throw ValidationError("series length " + std::to_string(T) + " below minimum " + std::to_string(spec.min_length));
  }

  auto count_transform = [](CountTransform tr, double v, const char* what) {
    if (v < 0.0) throw ValidationError(std::string("negative ") + what);
    return tr == CountTransform::log1p ? std::log1p(v) : v;
  };

  PairSeries out;
  out.dates = set.dates;
  out.y.resize(static_cast<Eigen::Index>(T), 2);
  for (std::size_t t = 0; t < T; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    if (pair == PairKind::pr_tw) {
      const double p = set.price[t];
      if (spec.price_transform == PriceTransform::log && !(p > 0.0)) {
        throw ValidationError("non-positive price on " + format_date(set.dates[t]) + " under log transform");
      }
      out.y(row, 0) = spec.price_transform == PriceTransform::log ? std::log(p) : p;
    } else {
      out.y(row, 0) = count_transform(spec.volume_transform, set.volume[t], "volume");
    }
    out.y(row, 1) = count_transform(spec.tweets_transform, set.tweets[t], "tweet count");
  }
  if (!out.y.allFinite()) throw ValidationError("non-finite value after transform");
  out.labels = pair == PairKind::pr_tw ? std::pair<std::string, std::string>{"price", "tweets"}
                                       : std::pair<std::string, std::string>{"volume", "tweets"};
  return out;
}

void write_combined_csv(const std::filesystem::path& path, const AlignedSeriesSet& set) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "date,price,volume,tweets\n";
  for (std::size_t t = 0; t < set.size(); ++t) {
    out << format_date(set.dates[t]) << ',' << format_value(set.price[t]) << ',' << format_value(set.volume[t])
        << ',' << format_value(set.tweets[t]) << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

void write_series_csv(const std::filesystem::path& path, const std::vector<Date>& dates,
                      const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "date,value\n";
  for (std::size_t t = 0; t < dates.size(); ++t) {
    out << format_date(dates[t]) << ',' << format_value(values[t]) << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<RawSeries> split(const AlignedSeriesSet& set) {
  std::vector<RawSeries> out{{set.ticker, SeriesKind::price, {}},
                             {set.ticker, SeriesKind::volume, {}},
                             {set.ticker, SeriesKind::tweets, {}}};
  for (std::size_t t = 0; t < set.size(); ++t) {
    out[0].observations.push_back({set.dates[t], set.price[t]});
    out[1].observations.push_back({set.dates[t], set.volume[t]});
    out[2].observations.push_back({set.dates[t], set.tweets[t]});
  }
  return out;
}

}  // namespace mementum
