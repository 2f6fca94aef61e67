#include "spaceprofiler/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spaceprofiler/config_text.hpp"
#include "spaceprofiler/plots.hpp"
#include "spaceprofiler/profiling.hpp"

namespace spaceprofiler {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, kSessionCount> kSessionKeys{"f1", "f2", "f3", "f4"};

SessionSpec parse_session(const std::string& text, const std::string& name,
                          const std::string& where) {
  const auto dash = text.find('-');
  std::optional<int> a, b;
  if (dash != std::string::npos) {
    a = parse_time_of_day(std::string_view(text).substr(0, dash));
    b = parse_time_of_day(std::string_view(text).substr(dash + 1));
  }
  if (!a || !b) throw Error(ErrorKind::config, where + ": expected HH:MM-HH:MM, got '" + text + "'");
  return {name, *a, *b};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

template <class F>
void write_file(const fs::path& path, F&& body) {
  std::ostringstream buf;
  body(buf);
  write_text(path, buf.str());
}

}  // namespace

PipelineConfig PipelineConfig::parse(std::istream& in, const fs::path& base_dir,
                                     const std::string& source) {
  const TextConfig cfg = TextConfig::parse(in, source);
  PipelineConfig c;
  if (auto v = cfg.get_string("input.readings")) c.readings = resolve(base_dir, *v);
  if (auto v = cfg.get_string("input.static")) c.static_features = resolve(base_dir, *v);
  if (auto v = cfg.get_string("input.calendar")) c.calendar = resolve(base_dir, *v);
  if (auto v = cfg.get_number("filter.min_valid_fraction")) c.min_valid_fraction = *v;
  if (auto v = cfg.get_integer("wied.window_bins")) c.wied_window = static_cast<int>(*v);
  for (std::size_t s = 0; s < kSessionCount; ++s) {
    const std::string key = std::string("sessions.") + kSessionKeys[s];
    if (auto v = cfg.get_string(key)) {
      c.sessions[s] = parse_session(*v, c.sessions[s].name, source + ": " + key);
    }
  }
  if (auto v = cfg.get_number("weights.w1")) c.w1 = *v;
  if (auto v = cfg.get_number("weights.w2")) c.w2 = *v;
  if (auto v = cfg.get_integer("kmeans.seed")) {
    if (*v < 0) throw Error(ErrorKind::config, source + ": kmeans.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = cfg.get_number_array("kmeans.k_range")) {
    if (v->size() != 2 || std::floor((*v)[0]) != (*v)[0] || std::floor((*v)[1]) != (*v)[1]) {
      throw Error(ErrorKind::config, source + ": kmeans.k_range must be [min, max] integers");
    }
    c.k_range = KRange{static_cast<int>((*v)[0]), static_cast<int>((*v)[1])};
  }
  if (auto v = cfg.get_number_array("categories.bounds")) {
    if (v->size() != c.categories.lower_edges.size()) {
      throw Error(ErrorKind::config, source + ": categories.bounds needs 4 values");
    }
    std::copy(v->begin(), v->end(), c.categories.lower_edges.begin());
  }
  if (auto v = cfg.get_number("significance.margin")) c.margin = *v;
  if (auto v = cfg.get_string("output.dir")) c.output_dir = resolve(base_dir, *v);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  return parse(in, path.parent_path(), path.string());
}

void PipelineConfig::write(std::ostream& out) const {
  auto num = [](double v) { return format_config_number(v); };
  out << "[input]\n";
  out << "readings = " << quote_config_string(readings.string()) << "\n";
  out << "static = " << quote_config_string(static_features.string()) << "\n";
  if (!calendar.empty()) out << "calendar = " << quote_config_string(calendar.string()) << "\n";
  out << "\n[filter]\nmin_valid_fraction = " << num(min_valid_fraction) << "\n";
  out << "\n[wied]\nwindow_bins = " << wied_window << "\n";
  out << "\n[sessions]\n";
  for (std::size_t s = 0; s < kSessionCount; ++s) {
    out << kSessionKeys[s] << " = "
        << quote_config_string(format_time_of_day(sessions[s].start_minute) + "-" +
                               format_time_of_day(sessions[s].end_minute))
        << "\n";
  }
  out << "\n[weights]\nw1 = " << num(w1) << "\nw2 = " << num(w2) << "\n";
  out << "\n[kmeans]\nseed = " << seed << "\n";
  if (k_range) out << "k_range = [" << k_range->min << ", " << k_range->max << "]\n";
  out << "\n[categories]\nbounds = [";
  for (std::size_t i = 0; i < categories.lower_edges.size(); ++i) {
    out << (i ? ", " : "") << num(categories.lower_edges[i]);
  }
  out << "]\n";
  out << "\n[significance]\nmargin = " << num(margin) << "\n";
  out << "\n[output]\ndir = " << quote_config_string(output_dir.string()) << "\n";
}

void PipelineConfig::validate() const {
  if (!(min_valid_fraction >= 0.0 && min_valid_fraction <= 1.0)) {
    throw Error(ErrorKind::config, "filter.min_valid_fraction must lie in [0, 1]");
  }
  if (wied_window < 0) throw Error(ErrorKind::config, "wied.window_bins must be >= 0");
  validate_sessions(sessions);
  if (!(w1 >= 0.0 && w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-9) {
    throw Error(ErrorKind::config, "weights.w1 and weights.w2 must be >= 0 and sum to 1");
  }
  if (k_range && (k_range->min < 2 || k_range->max < k_range->min)) {
    throw Error(ErrorKind::config, "kmeans.k_range must satisfy 2 <= min <= max");
  }
  categories.validate();
  if (!(margin >= 0.0)) throw Error(ErrorKind::config, "significance.margin must be >= 0");
}

ClusterConfig PipelineConfig::cluster_config() const {
  ClusterConfig c;
  c.kernel = Kernel::wied(wied_window);
  c.sessions = sessions;
  c.w1 = w1;
  c.w2 = w2;
  c.k_range = k_range;
  c.seed = seed;
  return c;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  WarningLog log;
  const Calendar calendar = config.calendar.empty() ? Calendar::singapore_2017()
                                                    : Calendar::load(config.calendar);

  std::vector<SensorSeries> series;
  {
    std::ifstream in(config.readings);
    if (!in) throw Error(ErrorKind::io, "cannot open readings " + config.readings.string());
    try {
      series = parse_readings(in, calendar.span);
    } catch (const Error& e) {
      throw Error(e.kind(), config.readings.string() + ": " + e.what());
    }
  }
  std::ifstream static_in(config.static_features);
  if (!static_in) {
    throw Error(ErrorKind::io, "cannot open static features " + config.static_features.string());
  }

  PipelineResult result;
  ValidityResult validity = filter_validity(series, config.min_valid_fraction);
  series.clear();
  result.excluded_ids = validity.excluded_ids;
  for (const std::string& id : result.excluded_ids) {
    log.warn("sensor " + id + " below validity threshold; excluded");
  }
  const StaticFeatureTable static_table = load_static(static_in, result.excluded_ids, &log);

  const DayLabels labels = label_days(calendar, calendar.span, &log);
  const std::vector<SensorProfiles> all_profiles = build_profiles(validity.valid, labels, &log);

  // Verdicts need all three day types, so a sensor missing one is dropped.
  std::array<std::vector<DayTypeProfile>, 3> per_type;
  for (const SensorProfiles& sp : all_profiles) {
    std::vector<std::string> missing;
    for (DayType t : kDayTypes) {
      if (sp[t].empty()) missing.emplace_back(to_string(t));
    }
    if (!missing.empty()) {
      std::string what;
      for (const auto& m : missing) what += (what.empty() ? "" : ", ") + m;
      log.warn("sensor " + sp.sensor_id + " has no " + what + " data; dropped from clustering");
      result.dropped_ids.push_back(sp.sensor_id);
      continue;
    }
    result.sensor_ids.push_back(sp.sensor_id);
    for (DayType t : kDayTypes) per_type[static_cast<std::size_t>(t)].push_back(sp[t]);
  }

  const ClusterConfig cluster_config = config.cluster_config();
  std::array<WarningLog, 3> type_logs;
  std::array<std::future<ClusterModel>, 3> futures;
  for (std::size_t t = 0; t < 3; ++t) {
    futures[t] = std::async(std::launch::async, [&, t] {
      try {
        return cluster_pipeline(per_type[t], cluster_config, &type_logs[t]);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(to_string(kDayTypes[t])) + ": " + e.what());
      }
    });
  }
  for (std::size_t t = 0; t < 3; ++t) {
    DayTypeOutcome& out = result.day_types[t];
    out.model = futures[t].get();
  }
  for (std::size_t t = 0; t < 3; ++t) {
    for (const std::string& m : type_logs[t].messages()) {
      log.warn(std::string(to_string(kDayTypes[t])) + ": " + m);
    }
    DayTypeOutcome& out = result.day_types[t];
    out.cluster_means = cluster_mean(out.model.assignments, out.model.profiles, out.model.k, &log);
    for (const auto& [c, mean] : out.cluster_means) {
      out.cluster_categories[c] = categorize(mean, config.categories);
    }
  }

  for (std::size_t i = 0; i < result.sensor_ids.size(); ++i) {
    const std::string& id = result.sensor_ids[i];
    std::array<std::optional<int>, 3> cats;
    for (std::size_t t = 0; t < 3; ++t) {
      const DayTypeOutcome& out = result.day_types[t];
      auto it = out.cluster_categories.find(out.model.assignments[i]);
      if (it != out.cluster_categories.end()) cats[t] = it->second;
    }
    std::optional<PoiType> type;
    if (const StaticRow* row = static_table.find(id)) {
      type = row->poi_type;
    } else {
      log.warn("sensor " + id + " has no static feature row");
    }
    result.verdicts.push_back(classify_poi(id, type, cats));
  }

  // Only sensors that reached a verdict take part in the comparison.
  StaticFeatureTable compared;
  const std::set<std::string, std::less<>> clustered(result.sensor_ids.begin(),
                                                     result.sensor_ids.end());
  for (const StaticRow& r : static_table.rows) {
    if (clustered.count(r.sensor_id) != 0) {
      compared.rows.push_back(r);
    } else if (std::find(result.dropped_ids.begin(), result.dropped_ids.end(), r.sensor_id) ==
               result.dropped_ids.end()) {
      log.warn("static row for unknown sensor " + r.sensor_id + " ignored");
    }
  }
  result.static_normalized = normalize_static(compared, &log);
  result.comparison = group_compare(result.static_normalized, result.verdicts, config.margin, &log);
  result.warnings = log.messages();
  return result;
}

std::string report_json(const PipelineResult& result, const PipelineConfig& config) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;

  ordered_json cfg;
  cfg["readings"] = config.readings.filename().string();
  cfg["static"] = config.static_features.filename().string();
  cfg["calendar"] = config.calendar.empty() ? "builtin:singapore_2017"
                                            : config.calendar.filename().string();
  cfg["min_valid_fraction"] = config.min_valid_fraction;
  cfg["wied_window_bins"] = config.wied_window;
  ordered_json sessions = ordered_json::object();
  for (std::size_t s = 0; s < kSessionCount; ++s) {
    sessions[kSessionKeys[s]] = format_time_of_day(config.sessions[s].start_minute) + "-" +
                                format_time_of_day(config.sessions[s].end_minute);
  }
  cfg["sessions"] = sessions;
  cfg["weights"] = {{"w1", config.w1}, {"w2", config.w2}};
  cfg["seed"] = config.seed;
  cfg["k_range"] = config.k_range ? ordered_json{config.k_range->min, config.k_range->max}
                                  : ordered_json("auto");
  cfg["category_bounds"] = config.categories.lower_edges;
  cfg["significance_margin"] = config.margin;
  j["config"] = cfg;

  j["sensors"] = {{"clustered", result.sensor_ids.size()},
                  {"excluded", result.excluded_ids},
                  {"dropped", result.dropped_ids}};

  ordered_json day_types = ordered_json::array();
  for (std::size_t t = 0; t < 3; ++t) {
    const DayTypeOutcome& out = result.day_types[t];
    const ClusterModel& m = out.model;
    ordered_json d;
    d["day_type"] = to_string(kDayTypes[t]);
    d["k"] = m.k;
    ordered_json db = ordered_json::object();
    for (const auto& [k, score] : m.db_scores) db[std::to_string(k)] = score;
    d["db_scores"] = db;
    d["eigenvalues"] = std::vector<double>(m.eigenvalues.data(), m.eigenvalues.data() + m.eigenvalues.size());
    ordered_json clusters = ordered_json::array();
    for (const auto& [c, mean] : out.cluster_means) {
      std::vector<std::string> members;
      for (std::size_t i = 0; i < m.ids.size(); ++i) {
        if (m.assignments[i] == c) members.push_back(m.ids[i]);
      }
      clusters.push_back({{"cluster", c},
                          {"size", members.size()},
                          {"mean", mean},
                          {"category", out.cluster_categories.at(c)},
                          {"members", members}});
    }
    d["clusters"] = clusters;
    day_types.push_back(d);
  }
  j["day_types"] = day_types;

  ordered_json verdicts = ordered_json::array();
  std::map<std::string, std::array<int, 2>> summary;
  for (const PoIVerdict& v : result.verdicts) {
    const std::string type = v.poi_type ? std::string(to_string(*v.poi_type)) : "unknown";
    verdicts.push_back({{"sensor_id", v.sensor_id},
                        {"poi_type", type},
                        {"categories",
                         {{"Weekday", v.categories[0]},
                          {"Weekend", v.categories[1]},
                          {"SchoolHoliday", v.categories[2]}}},
                        {"verdict", to_string(v.verdict)}});
    summary[type][v.verdict == Verdict::active ? 0 : 1] += 1;
  }
  j["verdicts"] = verdicts;
  ordered_json by_type = ordered_json::array();
  for (const auto& [type, counts] : summary) {
    by_type.push_back({{"poi_type", type}, {"active", counts[0]}, {"less_active", counts[1]}});
  }
  j["verdict_summary"] = by_type;

  ordered_json cmp;
  cmp["margin"] = result.comparison.margin;
  ordered_json types = ordered_json::array();
  for (const TypeComparison& tc : result.comparison.types) {
    ordered_json features = ordered_json::array();
    std::vector<std::string> significant;
    for (const FeatureComparison& f : tc.features) {
      features.push_back({{"feature", f.feature},
                          {"active_mean", f.active_mean},
                          {"less_active_mean", f.less_active_mean},
                          {"significant", f.significant}});
      if (f.significant) significant.emplace_back(f.feature);
    }
    types.push_back({{"poi_type", to_string(tc.poi_type)},
                     {"active_count", tc.active_count},
                     {"less_active_count", tc.less_active_count},
                     {"significant_features", significant},
                     {"features", features}});
  }
  cmp["types"] = types;
  cmp["notes"] = result.comparison.notes;
  j["static_comparison"] = cmp;
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

const std::vector<std::string>& audit_matrix_names() {
  static const std::vector<std::string> names{
      "utilization", "session_f1", "session_f2", "session_f3", "session_f4", "affinity",
      "degree",      "laplacian",  "embedding",  "eigenvalues"};
  return names;
}

fs::path audit_matrix_path(const fs::path& bundle, DayType t, const std::string& name) {
  const auto& names = audit_matrix_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::config, "unknown matrix '" + name + "' (expected one of " + all + ")");
  }
  return bundle / "audit" / (std::string(slug(t)) + "_" + name + ".csv");
}

void write_bundle(const PipelineResult& result, const PipelineConfig& config, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "audit", ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + (dir / "audit").string() + ": " + ec.message());
  const fs::path marker = dir / ".incomplete";
  write_text(marker, "bundle write in progress or failed\n");

  write_file(dir / "config.toml", [&](std::ostream& o) { config.write(o); });
  write_file(dir / "verdicts.csv", [&](std::ostream& o) { write_verdicts_csv(o, result.verdicts); });
  write_file(dir / "static_normalized.csv",
             [&](std::ostream& o) { write_static_csv(o, result.static_normalized); });

  for (std::size_t t = 0; t < 3; ++t) {
    const DayType dt = kDayTypes[t];
    const ClusterModel& m = result.day_types[t].model;
    std::vector<DayTypeProfile> filled;
    for (std::size_t i = 0; i < m.ids.size(); ++i) {
      DayTypeProfile p;
      p.sensor_id = m.ids[i];
      p.label = dt;
      p.bins = m.profiles[i];
      p.support.assign(kBinsPerDay, 1);
      filled.push_back(std::move(p));
    }
    write_file(dir / ("profiles_" + std::string(slug(dt)) + ".csv"),
               [&](std::ostream& o) { write_profiles_csv(o, filled); });

    auto matrix = [&](const std::string& name, const Eigen::MatrixXd& values) {
      write_file(audit_matrix_path(dir, dt, name),
                 [&](std::ostream& o) { write_matrix_csv(o, m.ids, values); });
    };
    matrix("utilization", m.utilization.values);
    for (std::size_t s = 0; s < kSessionCount; ++s) {
      matrix("session_" + std::string(kSessionKeys[s]), m.session_similarity[s].values);
    }
    matrix("affinity", m.affinity.values);
    matrix("degree", m.degree.asDiagonal().toDenseMatrix());
    matrix("laplacian", m.laplacian);
    write_file(audit_matrix_path(dir, dt, "embedding"), [&](std::ostream& o) {
      o << "id";
      for (Eigen::Index c = 0; c < m.embedding.cols(); ++c) o << ",u" << c + 1;
      o << '\n';
      for (Eigen::Index r = 0; r < m.embedding.rows(); ++r) {
        o << m.ids[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < m.embedding.cols(); ++c) {
          o << ',' << format_config_number(m.embedding(r, c));
        }
        o << '\n';
      }
    });
    write_file(audit_matrix_path(dir, dt, "eigenvalues"), [&](std::ostream& o) {
      o << "index,eigenvalue\n";
      for (Eigen::Index i = 0; i < m.eigenvalues.size(); ++i) {
        o << i + 1 << ',' << format_config_number(m.eigenvalues(i)) << '\n';
      }
    });
  }

  write_text(dir / "report.json", report_json(result, config));
  emit_plots(dir);
  fs::remove(marker, ec);
}

}  // namespace spaceprofiler
