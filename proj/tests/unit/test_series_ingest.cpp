#include "mementum/errors.hpp"
#include "mementum/series_ingest.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace mementum;
using testing::day;
using testing::TempDir;
using testing::write_file;

namespace {

RawSeries series(SeriesKind kind, std::vector<std::pair<const char*, double>> rows) {
  RawSeries s;
  s.kind = kind;
  for (auto [d, v] : rows) s.observations.push_back({day(d), v});
  return s;
}

}  // namespace

TEST_CASE("load_csv reads the volume jump rows") {
  TempDir dir;
  const auto f = write_file(dir / "v.csv", "date,value\n2021-01-12,7060665\n2021-01-13,144501736\n");
  const RawSeries s = load_csv(f, SeriesKind::volume, "GME");
  REQUIRE(s.observations.size() == 2);
  CHECK(s.observations[0].value == 7060665.0);
  CHECK(s.observations[1].value == 144501736.0);
  CHECK(s.ticker == "GME");
}

TEST_CASE("load_csv sorts rows and accepts a headerless file") {
  TempDir dir;
  const auto f = write_file(dir / "p.csv", "2021-01-13,20.5\n\n2021-01-12,19.9\n");
  const RawSeries s = load_csv(f, SeriesKind::price);
  REQUIRE(s.observations.size() == 2);
  CHECK(s.observations[0].date == day("2021-01-12"));
  CHECK(s.observations[1].value == 20.5);
}

TEST_CASE("load_csv errors") {
  TempDir dir;
  SUBCASE("empty file") {
    const auto f = write_file(dir / "e.csv", "");
    CHECK_THROWS_WITH_AS(load_csv(f, SeriesKind::tweets), doctest::Contains("no observations"), ValidationError);
  }
  SUBCASE("header only") {
    const auto f = write_file(dir / "h.csv", "date,value\n");
    CHECK_THROWS_WITH_AS(load_csv(f, SeriesKind::tweets), doctest::Contains("no observations"), ValidationError);
  }
  SUBCASE("malformed number carries the row") {
    const auto f = write_file(dir / "m.csv", "date,value\n2021-01-12,1\n2021-01-13,abc\n");
    try {
      load_csv(f, SeriesKind::volume);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.row() == 3);
    }
  }
  SUBCASE("malformed date") {
    const auto f = write_file(dir / "d.csv", "2021-01-12,1\n2021-02-30,2\n");
    CHECK_THROWS_AS(load_csv(f, SeriesKind::volume), ParseError);
  }
  SUBCASE("duplicate date") {
    const auto f = write_file(dir / "dup.csv", "2021-01-12,1\n2021-01-12,2\n");
    CHECK_THROWS_WITH_AS(load_csv(f, SeriesKind::volume), doctest::Contains("duplicate"), ValidationError);
  }
  SUBCASE("negative count") {
    const auto f = write_file(dir / "n.csv", "2021-01-12,-1\n");
    CHECK_THROWS_AS(load_csv(f, SeriesKind::tweets), ValidationError);
  }
  SUBCASE("non-positive price") {
    const auto f = write_file(dir / "z.csv", "2021-01-12,0\n");
    CHECK_THROWS_AS(load_csv(f, SeriesKind::price), ValidationError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_csv(dir / "nope.csv", SeriesKind::price), Error); }
}

TEST_CASE("weekend posts fold into Monday") {
  // 2021-01-08 is a Friday
  const auto price = series(SeriesKind::price, {{"2021-01-08", 10}, {"2021-01-11", 11}});
  const auto volume = series(SeriesKind::volume, {{"2021-01-08", 100}, {"2021-01-11", 110}});
  const auto tweets =
      series(SeriesKind::tweets, {{"2021-01-08", 1}, {"2021-01-09", 5}, {"2021-01-10", 3}, {"2021-01-11", 10}});

  const auto fwd = align(price, volume, tweets, WeekendPolicy::sum_forward);
  REQUIRE(fwd.size() == 2);
  CHECK(fwd.tweets[1] == 18.0);
  CHECK(fwd.tweets[0] == 1.0);

  const auto drop = align(price, volume, tweets, WeekendPolicy::drop);
  CHECK(drop.tweets[1] == 10.0);
}

TEST_CASE("align errors") {
  const auto price = series(SeriesKind::price, {{"2021-01-04", 1}, {"2021-03-31", 1}});
  const auto volume = series(SeriesKind::volume, {{"2021-01-04", 1}, {"2021-03-31", 1}});
  const auto late = series(SeriesKind::tweets, {{"2021-04-01", 1}, {"2021-06-30", 1}});
  CHECK_THROWS_WITH_AS(align(price, volume, late, WeekendPolicy::sum_forward), doctest::Contains("empty overlap"),
                       ValidationError);

  const auto gappy = series(SeriesKind::volume, {{"2021-01-04", 1}, {"2021-03-31", 1}, {"2021-02-01", 3}});
  const auto dense_price = series(SeriesKind::price, {{"2021-01-04", 1}, {"2021-02-01", 2}, {"2021-03-31", 1}});
  const auto volume_missing = series(SeriesKind::volume, {{"2021-01-04", 1}, {"2021-03-31", 1}});
  const auto tweets = series(SeriesKind::tweets, {{"2021-01-04", 1}, {"2021-03-31", 1}});
  CHECK_NOTHROW(align(dense_price, gappy, tweets, WeekendPolicy::sum_forward));
  CHECK_THROWS_WITH_AS(align(dense_price, volume_missing, tweets, WeekendPolicy::sum_forward),
                       doctest::Contains("2021-02-01"), ValidationError);

  auto other = tweets;
  other.ticker = "AMC";
  auto mine = dense_price;
  mine.ticker = "GME";
  CHECK_THROWS_AS(align(mine, gappy, other, WeekendPolicy::drop), ValidationError);
}

TEST_CASE("align is idempotent on trading-day inputs") {
  const auto price = series(SeriesKind::price, {{"2021-01-04", 1}, {"2021-01-05", 2}, {"2021-01-06", 3}});
  const auto volume = series(SeriesKind::volume, {{"2021-01-04", 4}, {"2021-01-05", 5}, {"2021-01-06", 6}});
  const auto tweets = series(SeriesKind::tweets, {{"2021-01-04", 7}, {"2021-01-06", 9}});
  for (auto policy : {WeekendPolicy::sum_forward, WeekendPolicy::drop}) {
    const auto once = align(price, volume, tweets, policy);
    CHECK(once.tweets == std::vector<double>{7, 0, 9});
    const auto parts = split(once);
    const auto twice = align(parts[0], parts[1], parts[2], policy);
    CHECK(twice.dates == once.dates);
    CHECK(twice.tweets == once.tweets);
    CHECK(twice.price == once.price);
  }
}

TEST_CASE("combined csv round trip is bit-exact") {
  TempDir dir;
  AlignedSeriesSet set;
  set.ticker = "SIM";
  const auto cal = weekday_calendar(day("2021-01-04"), 12);
  std::mt19937_64 gen(7);
  std::lognormal_distribution<double> ln(3.0, 1.0);
  for (auto d : cal) {
    set.dates.push_back(d);
    set.price.push_back(ln(gen));
    set.volume.push_back(std::floor(ln(gen) * 1000));
    set.tweets.push_back(std::floor(ln(gen)));
  }
  write_combined_csv(dir / "c.csv", set);
  const auto raw = load_combined_csv(dir / "c.csv", "SIM");
  const auto back = align(raw[0], raw[1], raw[2], WeekendPolicy::sum_forward);
  CHECK(back.dates == set.dates);
  CHECK(back.price == set.price);
  CHECK(back.volume == set.volume);
  CHECK(back.tweets == set.tweets);

  write_series_csv(dir / "p.csv", set.dates, set.price);
  CHECK(load_csv(dir / "p.csv", SeriesKind::price).observations.back().value == set.price.back());
}

TEST_CASE("make_pair transforms") {
  AlignedSeriesSet set;
  set.dates = {day("2021-01-04"), day("2021-01-05")};
  set.price = {std::exp(1.0), std::exp(2.0)};
  set.volume = {0.0, 99.0};
  set.tweets = {0.0, 9.0};
  TransformSpec spec;
  spec.min_length = 2;

  const auto pr = make_pair(set, PairKind::pr_tw, spec);
  CHECK(pr.labels.first == "price");
  CHECK(pr.y(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pr.y(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(pr.y(0, 1) == 0.0);
  CHECK(pr.y(1, 1) == doctest::Approx(std::log(10.0)).epsilon(1e-15));

  set.tweets = {0.0, 0.0};
  const auto vol = make_pair(set, PairKind::vol_tw, spec);
  CHECK(vol.y(0, 0) == 0.0);
  CHECK(vol.y(1, 0) == doctest::Approx(std::log(100.0)).epsilon(1e-15));
  CHECK(vol.y.col(1).isZero());

  spec.price_transform = PriceTransform::level;
  CHECK(make_pair(set, PairKind::pr_tw, spec).y(1, 0) == std::exp(2.0));

  set.price[0] = 0.0;
  spec.price_transform = PriceTransform::log;
  CHECK_THROWS_AS(make_pair(set, PairKind::pr_tw, spec), ValidationError);

  spec.min_length = 10;
  set.price[0] = 1.0;
  CHECK_THROWS_WITH_AS(make_pair(set, PairKind::pr_tw, spec), doctest::Contains("minimum"), ValidationError);
}

TEST_CASE("zero post counts give a finite pair") {
  AlignedSeriesSet set;
  set.dates = weekday_calendar(day("2021-01-04"), 300);
  for (std::size_t t = 0; t < 300; ++t) {
    set.price.push_back(10.0 + 0.01 * static_cast<double>(t));
    set.volume.push_back(1000.0);
    set.tweets.push_back(0.0);
  }
  const auto pr = make_pair(set, PairKind::pr_tw);
  CHECK(pr.y.rows() == 300);
  CHECK(pr.y.allFinite());
  CHECK(pr.y.col(1).isZero());
}

TEST_CASE("dates") {
  CHECK(format_date(day("2021-01-13")) == "2021-01-13");
  CHECK_FALSE(parse_date("2021-1-13"));
  CHECK_FALSE(parse_date("2021-02-29"));
  CHECK(parse_date("2020-02-29"));
  CHECK(is_weekend(day("2021-01-09")));
  const auto cal = weekday_calendar(day("2021-01-09"), 3);
  CHECK(cal.front() == day("2021-01-11"));
  CHECK(cal.back() == day("2021-01-13"));
}
