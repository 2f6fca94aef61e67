#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spaceprofiler/ingest.hpp"
#include "spaceprofiler/profiling.hpp"
#include "spaceprofiler/staticfeat.hpp"

namespace spaceprofiler {

/// A planted utilisation pattern. On a date whose generic day type is t the
/// expected normalised utilisation in bin b is base_curve[b] * multipliers[t].
struct ArchetypeSpec {
  std::string name;
  std::vector<double> base_curve;              // 288 bins in [0, 1]
  std::array<double, 3> multipliers{1.0, 1.0, 1.0};  // indexed by DayType
  double noise_sd = 0.05;
  double dropout_rate = 0.05;

  void validate() const;
  std::vector<double> effective_curve(DayType t) const;
};

/// Piecewise-linear 288-bin curve through 25 hourly knots (00:00 .. 24:00),
/// rescaled so its mean equals `target_mean`.
std::vector<double> curve_from_hourly_knots(std::span<const double> knots, double target_mean);

struct SynthConfig {
  std::vector<ArchetypeSpec> archetypes;
  std::vector<int> sensors_per_archetype;
  Calendar calendar;  // span and holidays
  std::uint64_t seed = 42;
  std::int64_t max_count = 1000;

  void validate() const;
};

struct GroundTruth {
  std::vector<std::string> sensor_ids;
  std::vector<int> archetype;
  /// Per day type, archetypes with identical effective curves share a label.
  std::array<std::vector<int>, 3> day_type_labels;
  std::array<int, 3> cluster_counts{};
};

struct SyntheticDataset {
  std::vector<SensorSeries> series;
  StaticFeatureTable static_features;
  GroundTruth truth;
};

/// Deterministic per seed. Each reading is the archetype curve for the date's
/// day type plus clipped Gaussian noise, scaled by max_count and rounded; a
/// reading is dropped with probability dropout_rate. Two calibration readings
/// (0 and max_count, never dropped) land on the first public holiday in the
/// span, or the first date if there is none, so min-max normalisation maps
/// counts back to curve units. Public holidays use the Weekend multiplier.
SyntheticDataset synth_generate(const SynthConfig& config);

/// Five archetypes whose weekday means sit at 0.385, 0.230, 0.162, 0.058 and
/// 0.0105, collapsing to four distinct weekend patterns and five
/// school-holiday patterns.
std::vector<ArchetypeSpec> default_archetypes(double noise_sd = 0.05, double dropout_rate = 0.05);

/// 47 sensors over the Singapore 2017 calendar.
SynthConfig default_synth_config(std::uint64_t seed = 42);

void write_readings_csv(std::ostream& out, std::span<const SensorSeries> series);
/// CSV: sensor_id,archetype,label_wd,label_we,label_sh.
void write_labels_csv(std::ostream& out, const GroundTruth& truth,
                      std::span<const ArchetypeSpec> archetypes);

}  // namespace spaceprofiler
