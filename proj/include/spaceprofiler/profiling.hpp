#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spaceprofiler/ingest.hpp"

namespace spaceprofiler {

/// Generic day types the nine temporal labels aggregate into.
enum class DayType : std::uint8_t { weekday, weekend, school_holiday };

inline constexpr std::array<DayType, 3> kDayTypes = {
    DayType::weekday, DayType::weekend, DayType::school_holiday};

/// "Weekday", "Weekend", "SchoolHoliday".
std::string_view to_string(DayType t);
/// File-name form: "weekday", "weekend", "school_holiday".
std::string_view slug(DayType t);
std::optional<DayType> parse_day_type(std::string_view s);

/// Per-bin running sum and present-sample count for one temporal label.
struct LabelProfile {
  std::vector<double> sum = std::vector<double>(kBinsPerDay, 0.0);
  std::vector<std::uint32_t> support = std::vector<std::uint32_t>(kBinsPerDay, 0);

  double mean(std::size_t bin) const {
    return support[bin] > 0 ? sum[bin] / support[bin] : 0.0;
  }
  bool empty() const;
};

using LabelProfiles = std::array<LabelProfile, kTemporalLabelCount>;

/// Average daily 288-bin profile of one sensor for one generic day type.
/// `bins[i]` is meaningful only where `support[i] > 0`.
struct DayTypeProfile {
  std::string sensor_id;
  DayType label = DayType::weekday;
  std::vector<double> bins = std::vector<double>(kBinsPerDay, 0.0);
  std::vector<std::uint32_t> support = std::vector<std::uint32_t>(kBinsPerDay, 0);

  bool empty() const;
};

/// Accumulates each reading into (label of its date, time-of-day bin).
/// Readings dated outside the labelled span are skipped with a warning.
LabelProfiles daily_windows(const NormalizedSeries& series, const DayLabels& labels,
                            WarningLog* log = nullptr);

/// Weekday = support-weighted mean of Mon..Fri, Weekend = Sat+Sun,
/// SchoolHoliday passes through; PublicHoliday is dropped.
/// Throws insufficient_data when all five weekday labels are empty.
std::array<DayTypeProfile, 3> generic_profiles(const std::string& sensor_id,
                                               const LabelProfiles& label_profiles);

/// Completes empty bins by linear interpolation between the nearest
/// non-empty neighbours; leading/trailing gaps take the nearest value.
std::vector<double> fill_gaps(const DayTypeProfile& profile);

struct SensorProfiles {
  std::string sensor_id;
  std::array<DayTypeProfile, 3> by_day_type;

  const DayTypeProfile& operator[](DayType t) const {
    return by_day_type[static_cast<std::size_t>(t)];
  }
};

/// normalize_counts -> daily_windows -> generic_profiles for every sensor,
/// parallel over sensors. Output order follows the input.
std::vector<SensorProfiles> build_profiles(const std::vector<SensorSeries>& series,
                                           const DayLabels& labels,
                                           WarningLog* log = nullptr);

namespace serial {
std::vector<SensorProfiles> build_profiles(const std::vector<SensorSeries>& series,
                                           const DayLabels& labels,
                                           WarningLog* log = nullptr);
}  // namespace serial

/// CSV with columns sensor_id,label,b000..b287. Values are written with
/// enough digits to round-trip.
void write_profiles_csv(std::ostream& out, std::span<const DayTypeProfile> profiles,
                        bool fill_empty = true);
std::vector<DayTypeProfile> read_profiles_csv(std::istream& in);

}  // namespace spaceprofiler
