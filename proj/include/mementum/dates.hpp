#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mementum {

using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Returns nullopt on
/// anything else, including impossible dates such as 2021-02-30.
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date d);

bool is_weekend(Date d);

/// Weekdays only, starting at `first` (rolled forward if it is a weekend).
std::vector<Date> weekday_calendar(Date first, std::size_t count);

}  // namespace mementum
