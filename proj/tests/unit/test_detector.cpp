#include "mementum/detector.hpp"
#include "mementum/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace mementum;

namespace {

// 1-based inclusive day ranges, as in the narrative of the examples
Span days(std::size_t first, std::size_t last) { return {first - 1, last - 1}; }

CointSpans spans(std::initializer_list<Span> s, std::size_t horizon = 30) { return {s, horizon}; }

RankPath rank1_on(std::size_t T, std::initializer_list<std::pair<std::size_t, std::size_t>> ranges) {
  RankPath p{std::vector<int>(T, 1)};
  for (auto [lo, hi] : ranges)
    for (std::size_t t = lo; t <= hi; ++t) p.states[t - 1] = 2;
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> periods_1based(const MementumReport& r) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : r.periods) out.emplace_back(p.start + 1, p.end + 1);
  return out;
}

using Periods = std::vector<std::pair<std::size_t, std::size_t>>;

}  // namespace

TEST_CASE("coint_spans keeps rank-1 intervals only") {
  RegimeIntervals all0{{{0, 11, 0}}, {}};
  CHECK(coint_spans(all0).spans.empty());

  RegimeIntervals mixed{{{0, 2, 0}, {3, 8, 1}, {9, 11, 0}}, {}};
  CHECK(coint_spans(mixed).spans == std::vector<Span>{days(4, 9)});
  CHECK(coint_spans(mixed).horizon == 12);

  RegimeIntervals full{{{0, 2, 0}, {3, 8, 2}, {9, 11, 1}}, {}};
  CHECK(coint_spans(full).spans == std::vector<Span>{days(10, 12)});
}

TEST_CASE("merge_falls") {
  CHECK(merge_falls(spans({days(4, 9), days(11, 15)}), 1).spans == std::vector<Span>{days(4, 15)});
  CHECK(merge_falls(spans({days(4, 9), days(12, 15)}), 1).spans == std::vector<Span>{days(4, 9), days(12, 15)});

  const auto chain = spans({days(1, 2), days(4, 5), days(7, 8), days(10, 11), days(13, 14)});
  const auto merged = merge_falls(chain, 1);
  CHECK(merged.spans == std::vector<Span>{days(1, 14)});
  CHECK(merge_falls(merged, 1) == merged);
  CHECK(merge_falls(chain, 0) == chain);
}

TEST_CASE("persistence_filter") {
  CHECK(persistence_filter(spans({days(4, 4)}), 2, 2).spans.empty());
  CHECK(persistence_filter(spans({days(3, 8)}), 2, 2).spans == std::vector<Span>{days(3, 8)});
  CHECK(persistence_filter(spans({days(2, 8)}), 2, 2).spans.empty());
  CHECK(persistence_filter(spans({days(1, 8)}), 2, 1).spans.empty());
  CHECK(persistence_filter(spans({days(1, 8)}), 2, 0).spans == std::vector<Span>{days(1, 8)});
  // a one-day gap after an earlier span is not a clean enough lead-in
  CHECK(persistence_filter(spans({days(3, 5), days(7, 12)}), 2, 2).spans == std::vector<Span>{days(3, 5)});
  CHECK(persistence_filter(spans({days(3, 5), days(8, 12)}), 2, 2).spans ==
        std::vector<Span>{days(3, 5), days(8, 12)});
}

TEST_CASE("match_and_intersect") {
  const DetectorConfig cfg;

  SUBCASE("start delay of one day") {
    const auto r = match_and_intersect(spans({days(8, 16)}), spans({days(9, 16)}), cfg);
    CHECK(periods_1based(r) == Periods{{9, 16}});
    CHECK(r.cond2[7]);
    CHECK_FALSE(r.cond1[7]);
  }
  SUBCASE("no partner within the delay") {
    const auto r = match_and_intersect(spans({days(3, 4)}), spans({}), cfg);
    CHECK(r.periods.empty());
    CHECK_FALSE(r.cond2[3]);
  }
  SUBCASE("joint cointegration with distant starts") {
    const auto r = match_and_intersect(spans({days(20, 29)}), spans({days(26, 29)}), cfg);
    CHECK(r.periods.empty());
    for (std::size_t t = 26; t <= 29; ++t) CHECK(r.cond1[t - 1]);
    CHECK_FALSE(r.cond2[26]);
  }
  SUBCASE("short intersection is dropped") {
    const auto r = match_and_intersect(spans({days(5, 9)}), spans({days(6, 6)}), cfg);
    CHECK(r.periods.empty());
    CHECK(r.cond2[4]);
  }
  SUBCASE("each span matches once, closest start first") {
    DetectorConfig wide;
    wide.d_w = 5;
    const auto r = match_and_intersect(spans({days(10, 20)}), spans({days(7, 14), days(11, 25)}), wide);
    CHECK(periods_1based(r) == Periods{{11, 20}});
  }
}

TEST_CASE("detect on whole paths") {
  const DetectorConfig cfg;
  SUBCASE("no cointegration") {
    const auto r = detect(RankPath{std::vector<int>(30, 1)}, RankPath{std::vector<int>(30, 1)}, {}, cfg);
    CHECK(r.periods.empty());
    CHECK(std::none_of(r.cond1.begin(), r.cond1.end(), [](bool b) { return b; }));
  }
  SUBCASE("joint stretch") {
    const auto p = rank1_on(30, {{9, 16}});
    const auto r = detect(p, p, {}, cfg);
    CHECK(periods_1based(r) == Periods{{9, 16}});
    DetectorConfig strict;
    strict.d_c = 9;
    CHECK(detect(p, p, {}, strict).periods.empty());
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(detect(RankPath{std::vector<int>(5, 1)}, RankPath{std::vector<int>(6, 1)}, {}, cfg),
                    ValidationError);
  }
  SUBCASE("order of merging and filtering") {
    // 1-day span, 1-day fall, 4-day span: merged first it is one 6-day run
    const auto p = rank1_on(20, {{5, 5}, {7, 10}});
    CHECK(periods_1based(detect(p, p, {}, cfg)) == Periods{{5, 10}});
    DetectorConfig literal;
    literal.filter_first = true;
    CHECK(detect(p, p, {}, literal).periods.empty());
  }
  SUBCASE("rank-2 days break a run") {
    RankPath p = rank1_on(20, {{5, 12}});
    p.states[8] = 3;
    CHECK(periods_1based(detect(p, p, {}, cfg)) == Periods{{5, 12}});
    p.states[9] = 3;
    CHECK(periods_1based(detect(p, p, {}, cfg)) == Periods{{5, 8}, {11, 12}});
  }
}

TEST_CASE("calendar shifts move periods with the dates") {
  const auto p = rank1_on(30, {{9, 16}});
  const auto cal = weekday_calendar(testing::day("2021-01-04"), 30);
  const auto later = weekday_calendar(testing::day("2021-03-01"), 30);
  const auto a = detect(p, p, cal, {});
  const auto b = detect(p, p, later, {});
  REQUIRE(a.periods.size() == 1);
  CHECK(a.periods[0].start_date == cal[8]);
  CHECK(b.periods[0].start_date == later[8]);
  CHECK(b.periods[0].end_date == later[15]);
  CHECK_THROWS_AS(detect(p, p, std::vector<Date>(cal.begin(), cal.begin() + 10), {}), ValidationError);
}

TEST_CASE("randomized invariants") {
  std::mt19937_64 gen(42);
  std::bernoulli_distribution flip(0.35);
  auto random_path = [&](std::size_t T) {
    RankPath p;
    int s = 1;
    for (std::size_t t = 0; t < T; ++t) {
      if (flip(gen)) s = 3 - s;
      p.states.push_back(s);
    }
    return p;
  };
  for (int trial = 0; trial < 3000; ++trial) {
    const auto a = random_path(40), b = random_path(40);

    std::vector<MementumReport> by_dc;
    for (int d_c = 1; d_c <= 5; ++d_c) {
      DetectorConfig cfg;
      cfg.d_c = d_c;
      by_dc.push_back(detect(a, b, {}, cfg));
      const auto& r = by_dc.back();
      for (const auto& p : r.periods) {
        REQUIRE(p.length() >= static_cast<std::size_t>(d_c));
        for (std::size_t t = p.start; t <= p.end; ++t) REQUIRE((r.cond1[t] && r.cond2[t] && r.cond3[t]));
      }
    }
    for (std::size_t k = 1; k < by_dc.size(); ++k) {
      for (const auto& p : by_dc[k].periods) {
        const bool found = std::any_of(by_dc[k - 1].periods.begin(), by_dc[k - 1].periods.end(),
                                       [&](const Period& q) { return q.start == p.start && q.end == p.end; });
        REQUIRE(found);
      }
      REQUIRE(by_dc[k].periods.size() <= by_dc[k - 1].periods.size());
    }

    const auto raw = coint_spans(to_intervals(a, {}));
    std::vector<bool> prev(40, false);
    for (int d_f = 0; d_f <= 4; ++d_f) {
      const auto merged = merge_falls(raw, d_f);
      std::vector<bool> cover(40, false);
      for (const auto& s : merged.spans)
        for (std::size_t t = s.start; t <= s.end; ++t) cover[t] = true;
      for (std::size_t t = 0; t < 40; ++t) REQUIRE((!prev[t] || cover[t]));
      prev = cover;
    }
  }
}
