#include "spaceprofiler/staticfeat.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "spaceprofiler/config_text.hpp"

namespace spaceprofiler {

const StaticRow* StaticFeatureTable::find(std::string_view sensor_id) const {
  for (const StaticRow& r : rows) {
    if (r.sensor_id == sensor_id) return &r;
  }
  return nullptr;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> f;
  while (true) {
    const auto c = line.find(',');
    std::string_view field = line.substr(0, c);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    f.push_back(field);
    if (c == std::string_view::npos) break;
    line.remove_prefix(c + 1);
  }
  return f;
}

}  // namespace

StaticFeatureTable load_static(std::istream& in, std::span<const std::string> excluded_ids,
                               WarningLog* log) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::schema, "static features: missing header");
  const auto header = split_csv(line);
  auto column_of = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorKind::schema, "static features: missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column_of("sensor_id");
  const std::size_t type_col = column_of("poi_type");
  std::array<std::size_t, kStaticFeatureCount> feature_cols{};
  for (std::size_t f = 0; f < kStaticFeatureCount; ++f) feature_cols[f] = column_of(kStaticFeatures[f].column);

  const std::set<std::string, std::less<>> excluded(excluded_ids.begin(), excluded_ids.end());
  std::set<std::string, std::less<>> seen;
  StaticFeatureTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    const std::string where = "static features line " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      warn(log, where + ": expected " + std::to_string(header.size()) + " fields; row rejected");
      continue;
    }
    const std::string id(fields[id_col]);
    if (id.empty()) {
      warn(log, where + ": empty sensor_id; row rejected");
      continue;
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::duplicate, where + ": duplicate sensor_id " + id);
    }
    if (excluded.count(id) != 0) continue;
    auto type = parse_poi_type(fields[type_col]);
    if (!type) {
      warn(log, where + ": unknown poi_type '" + std::string(fields[type_col]) + "'; row rejected");
      continue;
    }
    StaticRow row{id, *type, {}};
    bool ok = true;
    for (std::size_t f = 0; f < kStaticFeatureCount && ok; ++f) {
      const std::string_view cell = fields[feature_cols[f]];
      const std::string_view name = kStaticFeatures[f].column;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty()) {
        warn(log, where + ": sensor " + id + " missing " + std::string(name) + "; row rejected");
        ok = false;
      } else if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        warn(log, where + ": sensor " + id + " has non-numeric " + std::string(name) + "; row rejected");
        ok = false;
      } else if (v < 0.0) {
        warn(log, where + ": sensor " + id + " has negative " + std::string(name) + "; row rejected");
        ok = false;
      } else if (kStaticFeatures[f].kind == FeatureKind::count && std::floor(v) != v) {
        warn(log, where + ": sensor " + id + " has non-integral count " + std::string(name) +
                      "; row rejected");
        ok = false;
      }
      row.values[f] = v;
    }
    if (ok) table.rows.push_back(std::move(row));
  }
  return table;
}

void write_static_csv(std::ostream& out, const StaticFeatureTable& table) {
  out << "sensor_id,poi_type";
  for (const auto& f : kStaticFeatures) out << ',' << f.column;
  out << '\n';
  for (const StaticRow& r : table.rows) {
    out << r.sensor_id << ',' << to_string(r.poi_type);
    for (double v : r.values) out << ',' << format_config_number(v);
    out << '\n';
  }
}

StaticFeatureTable normalize_static(const StaticFeatureTable& table, WarningLog* log) {
  StaticFeatureTable out = table;
  if (table.rows.empty()) return out;
  for (std::size_t f = 0; f < kStaticFeatureCount; ++f) {
    double lo = table.rows.front().values[f];
    double hi = lo;
    for (const StaticRow& r : table.rows) {
      lo = std::min(lo, r.values[f]);
      hi = std::max(hi, r.values[f]);
    }
    const double range = hi - lo;
    const bool invert = kStaticFeatures[f].kind == FeatureKind::distance;
    if (range <= 0.0) {
      warn(log, "static feature " + std::string(kStaticFeatures[f].column) +
                    " is constant; degenerate range");
    }
    for (StaticRow& r : out.rows) {
      const double scaled = range > 0.0 ? (r.values[f] - lo) / range : 0.0;
      r.values[f] = invert ? 1.0 - scaled : scaled;
    }
  }
  return out;
}

StaticComparison group_compare(const StaticFeatureTable& normalized,
                               std::span<const PoIVerdict> verdicts, double margin,
                               WarningLog* log) {
  std::map<std::string, Verdict, std::less<>> verdict_of;
  for (const PoIVerdict& v : verdicts) verdict_of[v.sensor_id] = v.verdict;

  struct Acc {
    std::array<double, kStaticFeatureCount> active{};
    std::array<double, kStaticFeatureCount> less{};
    int n_active = 0;
    int n_less = 0;
  };
  std::map<PoiType, Acc> acc;
  // Summation in id order keeps the means bit-identical under row shuffles.
  std::vector<const StaticRow*> ordered;
  for (const StaticRow& r : normalized.rows) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const StaticRow* a, const StaticRow* b) { return a->sensor_id < b->sensor_id; });
  for (const StaticRow* row : ordered) {
    const StaticRow& r = *row;
    auto it = verdict_of.find(r.sensor_id);
    if (it == verdict_of.end()) {
      warn(log, "sensor " + r.sensor_id + " has static features but no verdict; skipped");
      continue;
    }
    Acc& a = acc[r.poi_type];
    auto& target = it->second == Verdict::active ? a.active : a.less;
    (it->second == Verdict::active ? a.n_active : a.n_less) += 1;
    for (std::size_t f = 0; f < kStaticFeatureCount; ++f) target[f] += r.values[f];
  }

  StaticComparison out;
  out.margin = margin;
  for (PoiType t : kPoiTypes) {
    auto it = acc.find(t);
    const std::string name(to_string(t));
    if (it == acc.end()) {
      out.notes.push_back(name + ": no sensors; omitted");
      continue;
    }
    const Acc& a = it->second;
    if (a.n_active == 0 || a.n_less == 0) {
      out.notes.push_back(name + ": all " + std::to_string(a.n_active + a.n_less) +
                          " sensors are " + (a.n_active == 0 ? "less active" : "active") +
                          "; omitted");
      continue;
    }
    TypeComparison tc;
    tc.poi_type = t;
    tc.active_count = a.n_active;
    tc.less_active_count = a.n_less;
    for (std::size_t f = 0; f < kStaticFeatureCount; ++f) {
      FeatureComparison fc;
      fc.feature = kStaticFeatures[f].column;
      fc.active_mean = a.active[f] / a.n_active;
      fc.less_active_mean = a.less[f] / a.n_less;
      fc.significant = fc.active_mean > fc.less_active_mean + margin;
      tc.features.push_back(fc);
    }
    out.types.push_back(std::move(tc));
  }
  return out;
}

}  // namespace spaceprofiler
