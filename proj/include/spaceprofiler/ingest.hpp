#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spaceprofiler/date.hpp"
#include "spaceprofiler/error.hpp"

namespace spaceprofiler {

enum class PoiType {
  playground,
  precinct_pavilion,
  multi_purpose_court,
  link_way,
  community_garden,
};

inline constexpr std::array<PoiType, 5> kPoiTypes = {
    PoiType::playground, PoiType::precinct_pavilion,
    PoiType::multi_purpose_court, PoiType::link_way,
    PoiType::community_garden};

std::string_view to_string(PoiType t);
std::optional<PoiType> parse_poi_type(std::string_view s);

struct Reading {
  Timestamp time;
  std::int64_t count = 0;
};

/// One sensor's count stream. Readings are strictly increasing in time and
/// aligned to 5-minute boundaries; absent slots are simply missing.
struct SensorSeries {
  std::string sensor_id;
  std::optional<PoiType> poi_type;
  std::vector<Reading> readings;
  DateSpan expected_span;
};

enum class TemporalLabel : std::uint8_t {
  mon,
  tue,
  wed,
  thu,
  fri,
  sat,
  sun,
  school_holiday,
  public_holiday,
};

inline constexpr std::size_t kTemporalLabelCount = 9;

std::string_view to_string(TemporalLabel label);

/// Public holidays and school-holiday ranges for a study period.
/// School ranges are kept sorted and merged.
struct Calendar {
  DateSpan span;
  std::vector<DateSpan> school_holidays;
  std::vector<Date> public_holidays;

  /// Sorts and merges overlapping or adjacent school ranges; sorts and
  /// deduplicates public holidays.
  void normalize();

  static Calendar load(const std::filesystem::path& path);
  static Calendar parse(std::istream& in, const std::string& source = "<calendar>");
  void write(std::ostream& out) const;

  /// Singapore 2017 study period, 2017-05-01 .. 2017-12-30, with that
  /// year's gazetted public holidays and MOE school-holiday terms.
  static Calendar singapore_2017();
};

/// Label for each date of a span, stored densely from `span.first`.
class DayLabels {
 public:
  DayLabels() = default;
  DayLabels(DateSpan span, std::vector<TemporalLabel> labels);

  const DateSpan& span() const noexcept { return span_; }
  std::optional<TemporalLabel> find(Date d) const;
  TemporalLabel at(Date d) const;
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<TemporalLabel>& labels() const noexcept { return labels_; }

 private:
  DateSpan span_{};
  std::vector<TemporalLabel> labels_;
};

/// Reads `sensor_id,timestamp,count` rows (header required). Series come back
/// sorted by sensor id, readings sorted by time.
std::vector<SensorSeries> parse_readings(std::istream& in, DateSpan expected_span);

struct ValidityResult {
  std::vector<SensorSeries> valid;
  std::vector<std::string> excluded_ids;
};

inline constexpr double kDefaultMinValidFraction = 0.10;

/// Number of present readings inside the sensor's expected span.
std::size_t present_samples(const SensorSeries& s);

/// Keeps sensors whose present readings cover at least `min_fraction` of
/// days(expected_span) * 288 slots.
ValidityResult filter_validity(const std::vector<SensorSeries>& series,
                               double min_fraction = kDefaultMinValidFraction);

/// Labels every date in `span`. Public holiday beats school holiday beats the
/// weekday name. Holidays outside the span are ignored with a warning.
DayLabels label_days(const Calendar& calendar, DateSpan span,
                     WarningLog* log = nullptr);

struct NormalizedReading {
  Timestamp time;
  double value = 0.0;
};

struct NormalizedSeries {
  std::string sensor_id;
  std::vector<NormalizedReading> readings;
};

/// Min-max normalisation over the sensor's whole history. A constant series
/// maps to all zeros and logs a degenerate-range warning.
NormalizedSeries normalize_counts(const SensorSeries& series,
                                  WarningLog* log = nullptr);

}  // namespace spaceprofiler
