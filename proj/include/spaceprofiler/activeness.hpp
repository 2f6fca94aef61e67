#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spaceprofiler/error.hpp"
#include "spaceprofiler/ingest.hpp"
#include "spaceprofiler/profiling.hpp"

namespace spaceprofiler {

inline constexpr int kCategoryCount = 5;

/// Lower edges of categories 1..4 on mean normalised utilisation. A mean at
/// or above edge[i] and below edge[i-1] falls in category i+1; anything below
/// the last edge is category 5.
struct CategoryBounds {
  std::array<double, kCategoryCount - 1> lower_edges{0.30, 0.20, 0.10, 0.03};

  void validate() const;
  friend bool operator==(const CategoryBounds&, const CategoryBounds&) = default;
};

/// Category ordinal 1 (most active) .. 5 (least active).
int categorize(double mean, const CategoryBounds& bounds = {});

/// Mean over members of each member's 288-bin profile mean. Clusters without
/// members are left out with a warning.
std::map<int, double> cluster_mean(std::span<const int> assignments,
                                   std::span<const std::vector<double>> profiles, int k,
                                   WarningLog* log = nullptr);

enum class Verdict { active, less_active };
std::string_view to_string(Verdict v);

struct PoIVerdict {
  std::string sensor_id;
  std::optional<PoiType> poi_type;
  std::array<int, 3> categories{};  // indexed by DayType
  Verdict verdict = Verdict::less_active;
};

inline constexpr int kActiveCategoryLimit = 3;
inline constexpr int kActiveDayTypesRequired = 2;

/// Active iff at least two of the three day-type categories are <= 3.
/// Throws domain error when a day type is missing or out of range.
Verdict classify_poi(std::span<const std::optional<int>> categories);

PoIVerdict classify_poi(const std::string& sensor_id, std::optional<PoiType> poi_type,
                        const std::array<std::optional<int>, 3>& categories);

/// CSV: sensor_id,poi_type,cat_wd,cat_we,cat_sh,verdict.
void write_verdicts_csv(std::ostream& out, std::span<const PoIVerdict> verdicts);

}  // namespace spaceprofiler
