#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spaceprofiler/activeness.hpp"
#include "spaceprofiler/error.hpp"
#include "spaceprofiler/ingest.hpp"

namespace spaceprofiler {

enum class FeatureKind { distance, count };

struct FeatureInfo {
  std::string_view column;    // CSV header name
  std::string_view group;     // transportation / commercial / density / other
  std::string_view label;     // human-readable
  FeatureKind kind;
};

inline constexpr std::size_t kStaticFeatureCount = 12;

inline constexpr std::array<FeatureInfo, kStaticFeatureCount> kStaticFeatures{{
    {"bus_stop_1", "transportation", "1st nearest bus stop (m)", FeatureKind::distance},
    {"bus_stop_2", "transportation", "2nd nearest bus stop (m)", FeatureKind::distance},
    {"shop_1", "commercial", "1st nearest shop (m)", FeatureKind::distance},
    {"shop_2", "commercial", "2nd nearest shop (m)", FeatureKind::distance},
    {"food_1", "commercial", "1st nearest food amenity (m)", FeatureKind::distance},
    {"food_2", "commercial", "2nd nearest food amenity (m)", FeatureKind::distance},
    {"grocery_1", "commercial", "1st nearest grocery (m)", FeatureKind::distance},
    {"grocery_2", "commercial", "2nd nearest grocery (m)", FeatureKind::distance},
    {"housing_blocks", "density", "housing blocks within 100 m", FeatureKind::count},
    {"housing_units", "density", "housing units within 100 m", FeatureKind::count},
    {"topology", "other", "surrounding buildings", FeatureKind::count},
    {"pathways", "other", "connected pathways within 50 m", FeatureKind::count},
}};

struct StaticRow {
  std::string sensor_id;
  PoiType poi_type = PoiType::playground;
  std::array<double, kStaticFeatureCount> values{};
};

struct StaticFeatureTable {
  std::vector<StaticRow> rows;

  const StaticRow* find(std::string_view sensor_id) const;
};

/// Reads the static-feature CSV: `sensor_id,poi_type` plus the twelve
/// feature columns, in any order. Rows of excluded sensors are dropped.
/// A missing column is a schema error; an incomplete or invalid row is
/// rejected with a warning.
StaticFeatureTable load_static(std::istream& in, std::span<const std::string> excluded_ids,
                               WarningLog* log = nullptr);

void write_static_csv(std::ostream& out, const StaticFeatureTable& table);

/// Column-wise min-max over all rows, then distance columns become 1 - x so
/// the nearest amenity scores 1.0.
StaticFeatureTable normalize_static(const StaticFeatureTable& table, WarningLog* log = nullptr);

struct FeatureComparison {
  std::string_view feature;
  double active_mean = 0.0;
  double less_active_mean = 0.0;
  bool significant = false;
};

struct TypeComparison {
  PoiType poi_type = PoiType::playground;
  int active_count = 0;
  int less_active_count = 0;
  std::vector<FeatureComparison> features;
};

struct StaticComparison {
  double margin = 0.0;
  std::vector<TypeComparison> types;
  std::vector<std::string> notes;
};

/// Per PoI type and feature, mean of active vs less-active sensors. A
/// feature is significant when active_mean > less_active_mean + margin.
/// Types lacking either group are omitted and noted.
StaticComparison group_compare(const StaticFeatureTable& normalized,
                               std::span<const PoIVerdict> verdicts, double margin = 0.0,
                               WarningLog* log = nullptr);

}  // namespace spaceprofiler
