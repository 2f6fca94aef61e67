#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace spaceprofiler {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

inline constexpr int kMinutesPerBin = 5;
inline constexpr int kBinsPerDay = 24 * 60 / kMinutesPerBin;  // 288

/// Closed date interval [first, last].
struct DateSpan {
  Date first;
  Date last;

  std::int64_t days() const { return (last - first).count() + 1; }
  bool contains(Date d) const { return d >= first && d <= last; }
  friend bool operator==(const DateSpan&, const DateSpan&) = default;
};

/// Parses `YYYY-MM-DD`. Returns nullopt on malformed or invalid dates.
std::optional<Date> parse_date(std::string_view text);

/// Parses `YYYY-MM-DDTHH:MM[:SS][Z]`; a single space may replace `T`.
/// Timestamps are read in the single configured zone, so a trailing `Z` is
/// accepted and ignored.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Parses `HH:MM` into minutes after midnight.
std::optional<int> parse_time_of_day(std::string_view text);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);
std::string format_time_of_day(int minutes);

inline Date date_of(Timestamp t) {
  return std::chrono::floor<std::chrono::days>(t);
}

/// 5-minute bin index of a timestamp within its day, 0..287.
inline int bin_of(Timestamp t) {
  auto since_midnight = t - std::chrono::floor<std::chrono::days>(t);
  return static_cast<int>(
      std::chrono::duration_cast<std::chrono::minutes>(since_midnight)
          .count() /
      kMinutesPerBin);
}

inline bool is_bin_aligned(Timestamp t) {
  return t.time_since_epoch().count() % (kMinutesPerBin * 60) == 0;
}

}  // namespace spaceprofiler
