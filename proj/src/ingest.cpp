#include "spaceprofiler/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "spaceprofiler/config_text.hpp"

namespace spaceprofiler {

std::string_view to_string(PoiType t) {
  switch (t) {
    case PoiType::playground: return "playground";
    case PoiType::precinct_pavilion: return "precinct_pavilion";
    case PoiType::multi_purpose_court: return "multi_purpose_court";
    case PoiType::link_way: return "link_way";
    case PoiType::community_garden: return "community_garden";
  }
  return "unknown";
}

std::optional<PoiType> parse_poi_type(std::string_view s) {
  for (PoiType t : kPoiTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(TemporalLabel label) {
  switch (label) {
    case TemporalLabel::mon: return "Mon";
    case TemporalLabel::tue: return "Tue";
    case TemporalLabel::wed: return "Wed";
    case TemporalLabel::thu: return "Thu";
    case TemporalLabel::fri: return "Fri";
    case TemporalLabel::sat: return "Sat";
    case TemporalLabel::sun: return "Sun";
    case TemporalLabel::school_holiday: return "SchoolHoliday";
    case TemporalLabel::public_holiday: return "PublicHoliday";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Calendar

void Calendar::normalize() {
  std::sort(school_holidays.begin(), school_holidays.end(),
            [](const DateSpan& a, const DateSpan& b) { return a.first < b.first; });
  std::vector<DateSpan> merged;
  for (const DateSpan& r : school_holidays) {
    if (!merged.empty() && r.first <= merged.back().last + std::chrono::days{1}) {
      merged.back().last = std::max(merged.back().last, r.last);
    } else {
      merged.push_back(r);
    }
  }
  school_holidays = std::move(merged);
  std::sort(public_holidays.begin(), public_holidays.end());
  public_holidays.erase(std::unique(public_holidays.begin(), public_holidays.end()),
                        public_holidays.end());
}

Calendar Calendar::parse(std::istream& in, const std::string& source) {
  const TextConfig cfg = TextConfig::parse(in, source);
  auto need_date = [&](std::string_view key) {
    auto text = cfg.get_string(key);
    if (!text) throw Error(ErrorKind::config, source + ": missing " + std::string(key));
    auto d = parse_date(*text);
    if (!d) throw Error(ErrorKind::config, source + ": bad date for " + std::string(key) + ": " + *text);
    return *d;
  };
  Calendar cal;
  cal.span = {need_date("span.start"), need_date("span.end")};
  if (cal.span.last < cal.span.first) {
    throw Error(ErrorKind::config, source + ": span.end before span.start");
  }
  for (const std::string& s : cfg.get_string_array("holidays.public").value_or(std::vector<std::string>{})) {
    auto d = parse_date(s);
    if (!d) throw Error(ErrorKind::config, source + ": bad public holiday date " + s);
    cal.public_holidays.push_back(*d);
  }
  for (const std::string& s : cfg.get_string_array("holidays.school").value_or(std::vector<std::string>{})) {
    const auto slash = s.find('/');
    std::optional<Date> a, b;
    if (slash != std::string::npos) {
      a = parse_date(std::string_view(s).substr(0, slash));
      b = parse_date(std::string_view(s).substr(slash + 1));
    }
    if (!a || !b || *b < *a) {
      throw Error(ErrorKind::config, source + ": bad school holiday range " + s +
                                         " (expected YYYY-MM-DD/YYYY-MM-DD)");
    }
    cal.school_holidays.push_back({*a, *b});
  }
  cal.normalize();
  return cal;
}

Calendar Calendar::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open calendar " + path.string());
  return parse(in, path.string());
}

void Calendar::write(std::ostream& out) const {
  out << "[span]\n";
  out << "start = " << quote_config_string(format_date(span.first)) << "\n";
  out << "end = " << quote_config_string(format_date(span.last)) << "\n\n";
  out << "[holidays]\n";
  out << "public = [\n";
  for (Date d : public_holidays) out << "  " << quote_config_string(format_date(d)) << ",\n";
  out << "]\n";
  out << "school = [\n";
  for (const DateSpan& r : school_holidays) {
    out << "  " << quote_config_string(format_date(r.first) + "/" + format_date(r.last)) << ",\n";
  }
  out << "]\n";
}

Calendar Calendar::singapore_2017() {
  using namespace std::chrono;
  auto d = [](int y, unsigned m, unsigned dd) {
    return Date{year_month_day{year{y}, month{m}, day{dd}}};
  };
  Calendar cal;
  cal.span = {d(2017, 5, 1), d(2017, 12, 30)};
  cal.public_holidays = {
      d(2017, 5, 1),   // Labour Day
      d(2017, 5, 10),  // Vesak Day
      d(2017, 6, 26),  // Hari Raya Puasa (observed)
      d(2017, 8, 9),   // National Day
      d(2017, 9, 1),   // Hari Raya Haji
      d(2017, 10, 18), // Deepavali
      d(2017, 12, 25), // Christmas Day
  };
  cal.school_holidays = {
      {d(2017, 5, 27), d(2017, 6, 25)},
      {d(2017, 9, 2), d(2017, 9, 10)},
      {d(2017, 11, 18), d(2017, 12, 31)},
  };
  cal.normalize();
  return cal;
}

// ---------------------------------------------------------------------------
// DayLabels

DayLabels::DayLabels(DateSpan span, std::vector<TemporalLabel> labels)
    : span_(span), labels_(std::move(labels)) {
  if (static_cast<std::int64_t>(labels_.size()) != span_.days()) {
    throw Error(ErrorKind::dimension, "day label count does not match span length");
  }
}

std::optional<TemporalLabel> DayLabels::find(Date d) const {
  if (labels_.empty() || !span_.contains(d)) return std::nullopt;
  return labels_[static_cast<std::size_t>((d - span_.first).count())];
}

TemporalLabel DayLabels::at(Date d) const {
  auto l = find(d);
  if (!l) throw Error(ErrorKind::domain, "date " + format_date(d) + " outside labelled span");
  return *l;
}

DayLabels label_days(const Calendar& calendar, DateSpan span, WarningLog* log) {
  if (span.last < span.first) throw Error(ErrorKind::domain, "empty date span");
  std::vector<TemporalLabel> labels;
  labels.reserve(static_cast<std::size_t>(span.days()));
  for (Date d = span.first; d <= span.last; d += std::chrono::days{1}) {
    // c_encoding: Sunday = 0.
    const unsigned wd = std::chrono::weekday{d}.c_encoding();
    labels.push_back(wd == 0 ? TemporalLabel::sun
                             : static_cast<TemporalLabel>(wd - 1));
  }
  auto slot = [&](Date d) -> TemporalLabel& {
    return labels[static_cast<std::size_t>((d - span.first).count())];
  };
  for (const DateSpan& r : calendar.school_holidays) {
    if (r.last < span.first || r.first > span.last) {
      warn(log, "school holiday " + format_date(r.first) + "/" + format_date(r.last) +
                    " outside span; ignored");
      continue;
    }
    const Date a = std::max(r.first, span.first);
    const Date b = std::min(r.last, span.last);
    for (Date d = a; d <= b; d += std::chrono::days{1}) slot(d) = TemporalLabel::school_holiday;
  }
  for (Date d : calendar.public_holidays) {
    if (!span.contains(d)) {
      warn(log, "public holiday " + format_date(d) + " outside span; ignored");
      continue;
    }
    slot(d) = TemporalLabel::public_holiday;
  }
  return DayLabels(span, std::move(labels));
}

// ---------------------------------------------------------------------------
// Readings

namespace {

struct RawRow {
  Timestamp time;
  std::int64_t count;
  std::size_t line;
};

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<SensorSeries> parse_readings(std::istream& in, DateSpan expected_span) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header row");
  ++line_no;
  if (trim_view(line) != "sensor_id,timestamp,count") {
    throw ParseError(line_no, "expected header 'sensor_id,timestamp,count'");
  }

  std::map<std::string, std::vector<RawRow>, std::less<>> groups;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim_view(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 3 fields");
    }
    const std::string_view id = trim_view(row.substr(0, c1));
    const std::string_view ts = trim_view(row.substr(c1 + 1, c2 - c1 - 1));
    const std::string_view cnt = trim_view(row.substr(c2 + 1));
    if (id.empty()) throw ParseError(line_no, "empty sensor_id");
    auto time = parse_timestamp(ts);
    if (!time) throw ParseError(line_no, "malformed timestamp '" + std::string(ts) + "'");
    if (!is_bin_aligned(*time)) {
      throw ParseError(line_no, "timestamp not on a 5-minute boundary: " + std::string(ts));
    }
    std::int64_t count = 0;
    auto [ptr, ec] = std::from_chars(cnt.data(), cnt.data() + cnt.size(), count);
    if (cnt.empty() || ec != std::errc{} || ptr != cnt.data() + cnt.size()) {
      throw ParseError(line_no, "malformed count '" + std::string(cnt) + "'");
    }
    if (count < 0) {
      throw Error(ErrorKind::domain, "line " + std::to_string(line_no) +
                                         ": negative count " + std::to_string(count));
    }
    auto it = groups.find(id);
    if (it == groups.end()) it = groups.emplace(std::string(id), std::vector<RawRow>{}).first;
    it->second.push_back({*time, count, line_no});
  }

  std::vector<SensorSeries> out;
  out.reserve(groups.size());
  for (auto& [id, rows] : groups) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.time < b.time; });
    SensorSeries s;
    s.sensor_id = id;
    s.expected_span = expected_span;
    s.readings.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].time == rows[i - 1].time) {
        throw Error(ErrorKind::duplicate,
                    "line " + std::to_string(rows[i].line) + ": duplicate reading for " + id +
                        " at " + format_timestamp(rows[i].time) + " (first at line " +
                        std::to_string(rows[i - 1].line) + ")");
      }
      s.readings.push_back({rows[i].time, rows[i].count});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t present_samples(const SensorSeries& s) {
  return static_cast<std::size_t>(std::count_if(
      s.readings.begin(), s.readings.end(),
      [&](const Reading& r) { return s.expected_span.contains(date_of(r.time)); }));
}

ValidityResult filter_validity(const std::vector<SensorSeries>& series, double min_fraction) {
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
    throw Error(ErrorKind::config, "min_valid_fraction must lie in [0, 1]");
  }
  ValidityResult result;
  for (const SensorSeries& s : series) {
    const double expected = static_cast<double>(s.expected_span.days()) * kBinsPerDay;
    const double fraction =
        expected > 0 ? static_cast<double>(present_samples(s)) / expected : 0.0;
    if (fraction >= min_fraction) {
      result.valid.push_back(s);
    } else {
      result.excluded_ids.push_back(s.sensor_id);
    }
  }
  std::sort(result.excluded_ids.begin(), result.excluded_ids.end());
  return result;
}

NormalizedSeries normalize_counts(const SensorSeries& series, WarningLog* log) {
  NormalizedSeries out;
  out.sensor_id = series.sensor_id;
  out.readings.reserve(series.readings.size());
  if (series.readings.empty()) return out;
  auto [lo_it, hi_it] = std::minmax_element(
      series.readings.begin(), series.readings.end(),
      [](const Reading& a, const Reading& b) { return a.count < b.count; });
  const double lo = static_cast<double>(lo_it->count);
  const double range = static_cast<double>(hi_it->count) - lo;
  if (range <= 0.0) {
    warn(log, "sensor " + series.sensor_id + ": constant counts, degenerate range; normalised to 0");
  }
  for (const Reading& r : series.readings) {
    const double v = range > 0.0 ? (static_cast<double>(r.count) - lo) / range : 0.0;
    out.readings.push_back({r.time, v});
  }
  return out;
}

}  // namespace spaceprofiler
