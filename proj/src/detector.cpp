#include "mementum/detector.hpp"

#include "mementum/errors.hpp"

#include <algorithm>
#include <tuple>

namespace mementum {

void DetectorConfig::validate() const {
  if (d_c < 1) throw ValidationError("d_c must be at least 1");
  if (d_p < 0 || d_f < 0 || d_w < 0) throw ValidationError("d_p, d_f and d_w must be nonnegative");
}

std::vector<bool> MementumReport::mementum_mask() const {
  std::vector<bool> mask(cond1.size(), false);
  for (const auto& p : periods) {
    for (std::size_t t = p.start; t <= p.end && t < mask.size(); ++t) mask[t] = true;
  }
  return mask;
}

CointSpans coint_spans(const RegimeIntervals& intervals) {
  CointSpans out;
  for (const auto& iv : intervals.intervals) {
    if (iv.rank == 1) out.spans.push_back({iv.start, iv.end});
    out.horizon = std::max(out.horizon, iv.end + 1);
  }
  return out;
}

CointSpans merge_falls(const CointSpans& spans, int d_f) {
  CointSpans out;
  out.horizon = spans.horizon;
  for (const auto& s : spans.spans) {
    if (!out.spans.empty() && s.start - out.spans.back().end - 1 <= static_cast<std::size_t>(d_f)) {
      out.spans.back().end = std::max(out.spans.back().end, s.end);
    } else {
      out.spans.push_back(s);
    }
  }
  return out;
}

CointSpans persistence_filter(const CointSpans& spans, int d_c, int d_p) {
  CointSpans out;
  out.horizon = spans.horizon;
  for (std::size_t k = 0; k < spans.spans.size(); ++k) {
    const auto& s = spans.spans[k];
    const std::size_t clean_before = k == 0 ? s.start : s.start - spans.spans[k - 1].end - 1;
    if (s.length() >= static_cast<std::size_t>(d_c) && clean_before >= static_cast<std::size_t>(d_p)) {
      out.spans.push_back(s);
    }
  }
  return out;
}

namespace {

std::vector<bool> coverage(const CointSpans& spans, std::size_t T) {
  std::vector<bool> mask(T, false);
  for (const auto& s : spans.spans) {
    for (std::size_t t = s.start; t <= s.end && t < T; ++t) mask[t] = true;
  }
  return mask;
}

std::size_t start_gap(const Span& a, const Span& b) { return a.start > b.start ? a.start - b.start : b.start - a.start; }

}  // namespace

MementumReport match_and_intersect(const PairSpans& pr_tw, const PairSpans& vol_tw, const DetectorConfig& cfg) {
  cfg.validate();
  const std::size_t T = std::max({pr_tw.cointegrated.horizon, vol_tw.cointegrated.horizon, pr_tw.persistent.horizon,
                                  vol_tw.persistent.horizon});
  MementumReport report;
  report.config = cfg;

  const auto& A = pr_tw.persistent.spans;
  const auto& B = vol_tw.persistent.spans;

  // candidates ordered by start difference, then by the earlier start day
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t j = 0; j < B.size(); ++j) {
      const auto gap = start_gap(A[i], B[j]);
      if (gap <= static_cast<std::size_t>(cfg.d_w)) {
        candidates.emplace_back(gap, std::min(A[i].start, B[j].start), i, j);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<bool> used_a(A.size(), false), used_b(B.size(), false);
  report.cond2.assign(T, false);
  for (const auto& [gap, first, i, j] : candidates) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = true;
    for (const Span* s : {&A[i], &B[j]}) {
      for (std::size_t t = s->start; t <= s->end && t < T; ++t) report.cond2[t] = true;
    }
    const std::size_t lo = std::max(A[i].start, B[j].start);
    const std::size_t hi = std::min(A[i].end, B[j].end);
    if (lo <= hi && hi - lo + 1 >= static_cast<std::size_t>(cfg.d_c)) report.periods.push_back({lo, hi, {}, {}});
  }
  std::sort(report.periods.begin(), report.periods.end(),
            [](const Period& a, const Period& b) { return a.start < b.start; });

  const auto coint_a = coverage(pr_tw.cointegrated, T);
  const auto coint_b = coverage(vol_tw.cointegrated, T);
  const auto pers_a = coverage(pr_tw.persistent, T);
  const auto pers_b = coverage(vol_tw.persistent, T);
  report.cond1.resize(T);
  report.cond3.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    report.cond1[t] = coint_a[t] && coint_b[t];
    report.cond3[t] = pers_a[t] && pers_b[t];
  }
  return report;
}

MementumReport match_and_intersect(const CointSpans& pr_tw, const CointSpans& vol_tw, const DetectorConfig& cfg) {
  return match_and_intersect(PairSpans{pr_tw, pr_tw}, PairSpans{vol_tw, vol_tw}, cfg);
}

PairSpans pair_spans(const RankPath& path, const DetectorConfig& cfg) {
  const CointSpans raw = coint_spans(to_intervals(path, {}));
  PairSpans out;
  out.cointegrated = merge_falls(raw, cfg.d_f);
  out.persistent = cfg.filter_first ? merge_falls(persistence_filter(raw, cfg.d_c, cfg.d_p), cfg.d_f)
                                   : persistence_filter(out.cointegrated, cfg.d_c, cfg.d_p);
  out.cointegrated.horizon = out.persistent.horizon = path.size();
  return out;
}

MementumReport detect(const RankPath& pr_tw, const RankPath& vol_tw, const std::vector<Date>& dates,
                      const DetectorConfig& cfg) {
  cfg.validate();
  if (pr_tw.size() != vol_tw.size()) {
    throw ValidationError("rank paths differ in length: " + std::to_string(pr_tw.size()) + " vs " +
                          std::to_string(vol_tw.size()));
  }
  if (!dates.empty() && dates.size() != pr_tw.size()) throw ValidationError("calendar length differs from rank paths");
  MementumReport report = match_and_intersect(pair_spans(pr_tw, cfg), pair_spans(vol_tw, cfg), cfg);
  report.dates = dates;
  if (!dates.empty()) {
    for (auto& p : report.periods) {
      p.start_date = dates[p.start];
      p.end_date = dates[p.end];
    }
  }
  return report;
}

}  // namespace mementum
