#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace stance {

using Date = std::chrono::year_month_day;
using Month = std::chrono::year_month;

/// Parses `YYYY-MM-DD`, also accepting a trailing ISO-8601 time part (`T...`).
std::optional<Date> parse_date(std::string_view s);
std::string format_date(const Date& d);

/// Parses `YYYY-MM`.
std::optional<Month> parse_month(std::string_view s);
std::string format_month(const Month& m);

/// Inclusive bounds; an absent side is unbounded.
struct DateRange {
  std::optional<Date> from;
  std::optional<Date> to;

  bool contains(const Date& d) const {
    return (!from || *from <= d) && (!to || d <= *to);
  }
};

inline Date first_day(const Month& m) { return m / std::chrono::day{1}; }
inline Date last_day(const Month& m) { return m / std::chrono::last; }

}  // namespace stance
