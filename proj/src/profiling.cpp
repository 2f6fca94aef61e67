#include "spaceprofiler/profiling.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "spaceprofiler/config_text.hpp"

namespace spaceprofiler {

std::string_view to_string(DayType t) {
  switch (t) {
    case DayType::weekday: return "Weekday";
    case DayType::weekend: return "Weekend";
    case DayType::school_holiday: return "SchoolHoliday";
  }
  return "unknown";
}

std::string_view slug(DayType t) {
  switch (t) {
    case DayType::weekday: return "weekday";
    case DayType::weekend: return "weekend";
    case DayType::school_holiday: return "school_holiday";
  }
  return "unknown";
}

std::optional<DayType> parse_day_type(std::string_view s) {
  for (DayType t : kDayTypes) {
    if (s == to_string(t) || s == slug(t)) return t;
  }
  return std::nullopt;
}

bool LabelProfile::empty() const {
  return std::all_of(support.begin(), support.end(), [](auto s) { return s == 0; });
}

bool DayTypeProfile::empty() const {
  return std::all_of(support.begin(), support.end(), [](auto s) { return s == 0; });
}

LabelProfiles daily_windows(const NormalizedSeries& series, const DayLabels& labels,
                            WarningLog* log) {
  LabelProfiles out;
  std::size_t outside = 0;
  for (const NormalizedReading& r : series.readings) {
    const auto label = labels.find(date_of(r.time));
    if (!label) {
      ++outside;
      continue;
    }
    LabelProfile& p = out[static_cast<std::size_t>(*label)];
    const auto bin = static_cast<std::size_t>(bin_of(r.time));
    p.sum[bin] += r.value;
    ++p.support[bin];
  }
  if (outside > 0) {
    warn(log, "sensor " + series.sensor_id + ": " + std::to_string(outside) +
                  " readings outside the labelled span skipped");
  }
  return out;
}

namespace {

DayTypeProfile pool(const std::string& sensor_id, DayType type,
                    const LabelProfiles& lp, std::initializer_list<TemporalLabel> members) {
  DayTypeProfile p;
  p.sensor_id = sensor_id;
  p.label = type;
  for (std::size_t b = 0; b < kBinsPerDay; ++b) {
    double sum = 0.0;
    std::uint32_t support = 0;
    for (TemporalLabel l : members) {
      sum += lp[static_cast<std::size_t>(l)].sum[b];
      support += lp[static_cast<std::size_t>(l)].support[b];
    }
    p.support[b] = support;
    p.bins[b] = support > 0 ? sum / support : 0.0;
  }
  return p;
}

}  // namespace

std::array<DayTypeProfile, 3> generic_profiles(const std::string& sensor_id,
                                               const LabelProfiles& lp) {
  using L = TemporalLabel;
  std::array<DayTypeProfile, 3> out{
      pool(sensor_id, DayType::weekday, lp, {L::mon, L::tue, L::wed, L::thu, L::fri}),
      pool(sensor_id, DayType::weekend, lp, {L::sat, L::sun}),
      pool(sensor_id, DayType::school_holiday, lp, {L::school_holiday}),
  };
  if (out[0].empty()) {
    throw Error(ErrorKind::insufficient_data,
                "sensor " + sensor_id + ": no weekday samples (Mon..Fri all empty)");
  }
  return out;
}

std::vector<double> fill_gaps(const DayTypeProfile& profile) {
  const std::size_t n = profile.bins.size();
  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < n; ++i) {
    if (profile.support[i] > 0) present.push_back(i);
  }
  if (present.empty()) {
    throw Error(ErrorKind::insufficient_data, "sensor " + profile.sensor_id + ": " +
                                                  std::string(to_string(profile.label)) +
                                                  " profile has no samples");
  }
  std::vector<double> out(profile.bins);
  for (std::size_t i = 0; i < present.front(); ++i) out[i] = profile.bins[present.front()];
  for (std::size_t i = present.back() + 1; i < n; ++i) out[i] = profile.bins[present.back()];
  for (std::size_t k = 0; k + 1 < present.size(); ++k) {
    const std::size_t a = present[k], b = present[k + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      out[i] = profile.bins[a] + t * (profile.bins[b] - profile.bins[a]);
    }
  }
  return out;
}

namespace {

SensorProfiles profile_one(const SensorSeries& s, const DayLabels& labels, WarningLog& log) {
  const NormalizedSeries norm = normalize_counts(s, &log);
  return {s.sensor_id, generic_profiles(s.sensor_id, daily_windows(norm, labels, &log))};
}

}  // namespace

std::vector<SensorProfiles> build_profiles(const std::vector<SensorSeries>& series,
                                           const DayLabels& labels, WarningLog* log) {
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<SensorProfiles> out(series.size());
  std::vector<WarningLog> logs(series.size());
  std::vector<std::string> errors(series.size());
  std::vector<ErrorKind> error_kinds(series.size(), ErrorKind::numeric);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      out[u] = profile_one(series[u], labels, logs[u]);
    } catch (const Error& e) {
      errors[u] = e.what();
      error_kinds[u] = e.kind();
    }
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!errors[i].empty()) throw Error(error_kinds[i], errors[i]);
    if (log != nullptr) log->append(logs[i]);
  }
  return out;
}

namespace serial {

std::vector<SensorProfiles> build_profiles(const std::vector<SensorSeries>& series,
                                           const DayLabels& labels, WarningLog* log) {
  std::vector<SensorProfiles> out;
  out.reserve(series.size());
  WarningLog local;
  for (const SensorSeries& s : series) out.push_back(profile_one(s, labels, local));
  if (log != nullptr) log->append(local);
  return out;
}

}  // namespace serial

void write_profiles_csv(std::ostream& out, std::span<const DayTypeProfile> profiles,
                        bool fill_empty) {
  out << "sensor_id,label";
  char buf[16];
  for (int b = 0; b < kBinsPerDay; ++b) {
    std::snprintf(buf, sizeof buf, ",b%03d", b);
    out << buf;
  }
  out << '\n';
  for (const DayTypeProfile& p : profiles) {
    std::vector<double> values = fill_empty && !p.empty() ? fill_gaps(p) : p.bins;
    out << p.sensor_id << ',' << to_string(p.label);
    for (std::size_t b = 0; b < values.size(); ++b) {
      out << ',';
      if (fill_empty || p.support[b] > 0) out << format_config_number(values[b]);
    }
    out << '\n';
  }
}

std::vector<DayTypeProfile> read_profiles_csv(std::istream& in) {
  std::vector<DayTypeProfile> out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing profile header");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto c = rest.find(',');
      fields.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (fields.size() != 2 + kBinsPerDay) throw ParseError(line_no, "expected 290 fields");
    DayTypeProfile p;
    p.sensor_id = std::string(fields[0]);
    auto dt = parse_day_type(fields[1]);
    if (!dt) throw ParseError(line_no, "unknown day type '" + std::string(fields[1]) + "'");
    p.label = *dt;
    for (std::size_t b = 0; b < kBinsPerDay; ++b) {
      const std::string_view f = fields[2 + b];
      if (f.empty()) continue;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw ParseError(line_no, "bad value in bin " + std::to_string(b));
      }
      p.bins[b] = v;
      p.support[b] = 1;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace spaceprofiler
