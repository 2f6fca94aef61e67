#include "spaceprofiler/activeness.hpp"

#include <numeric>
#include <ostream>

namespace spaceprofiler {

void CategoryBounds::validate() const {
  for (std::size_t i = 0; i < lower_edges.size(); ++i) {
    if (!(lower_edges[i] > 0.0 && lower_edges[i] < 1.0)) {
      throw Error(ErrorKind::config, "category bounds must lie strictly inside (0, 1)");
    }
    if (i > 0 && !(lower_edges[i] < lower_edges[i - 1])) {
      throw Error(ErrorKind::config, "category bounds must be strictly decreasing");
    }
  }
}

int categorize(double mean, const CategoryBounds& bounds) {
  for (std::size_t i = 0; i < bounds.lower_edges.size(); ++i) {
    if (mean >= bounds.lower_edges[i]) return static_cast<int>(i) + 1;
  }
  return kCategoryCount;
}

std::map<int, double> cluster_mean(std::span<const int> assignments,
                                   std::span<const std::vector<double>> profiles, int k,
                                   WarningLog* log) {
  if (assignments.size() != profiles.size()) {
    throw Error(ErrorKind::dimension, "every assigned sensor needs a profile");
  }
  std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const int c = assignments[i];
    if (c < 0 || c >= k) throw Error(ErrorKind::domain, "cluster index out of range");
    const auto& p = profiles[i];
    if (p.empty()) throw Error(ErrorKind::dimension, "empty profile");
    sums[static_cast<std::size_t>(c)] +=
        std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
    ++counts[static_cast<std::size_t>(c)];
  }
  std::map<int, double> out;
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      warn(log, "cluster " + std::to_string(c) + " has no members; excluded");
      continue;
    }
    out[c] = sums[static_cast<std::size_t>(c)] / counts[static_cast<std::size_t>(c)];
  }
  return out;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::active ? "active" : "less_active";
}

Verdict classify_poi(std::span<const std::optional<int>> categories) {
  if (categories.size() != kDayTypes.size()) {
    throw Error(ErrorKind::domain, "expected one category per day type");
  }
  int qualifying = 0;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const auto& c = categories[i];
    if (!c) {
      throw Error(ErrorKind::domain, "missing category for " +
                                         std::string(to_string(kDayTypes[i])));
    }
    if (*c < 1 || *c > kCategoryCount) throw Error(ErrorKind::domain, "category out of range");
    if (*c <= kActiveCategoryLimit) ++qualifying;
  }
  return qualifying >= kActiveDayTypesRequired ? Verdict::active : Verdict::less_active;
}

PoIVerdict classify_poi(const std::string& sensor_id, std::optional<PoiType> poi_type,
                        const std::array<std::optional<int>, 3>& categories) {
  PoIVerdict v;
  v.sensor_id = sensor_id;
  v.poi_type = poi_type;
  try {
    v.verdict = classify_poi(categories);
  } catch (const Error& e) {
    throw Error(e.kind(), "sensor " + sensor_id + ": " + e.what());
  }
  for (std::size_t i = 0; i < 3; ++i) v.categories[i] = *categories[i];
  return v;
}

void write_verdicts_csv(std::ostream& out, std::span<const PoIVerdict> verdicts) {
  out << "sensor_id,poi_type,cat_wd,cat_we,cat_sh,verdict\n";
  for (const PoIVerdict& v : verdicts) {
    out << v.sensor_id << ',' << (v.poi_type ? to_string(*v.poi_type) : "unknown") << ','
        << v.categories[0] << ',' << v.categories[1] << ',' << v.categories[2] << ','
        << to_string(v.verdict) << '\n';
  }
}

}  // namespace spaceprofiler
