#include <doctest.h>

#include <random>
#include <sstream>

#include "spaceprofiler/ingest.hpp"

using namespace spaceprofiler;
using namespace std::chrono;

namespace {

DateSpan span_of(const char* a, const char* b) { return {*parse_date(a), *parse_date(b)}; }

SensorSeries series_with(int present, DateSpan span) {
  SensorSeries s;
  s.sensor_id = "x";
  s.expected_span = span;
  Timestamp t{span.first};
  for (int i = 0; i < present; ++i) s.readings.push_back({t + minutes{5 * i}, 1});
  return s;
}

}  // namespace

TEST_CASE("dates and timestamps") {
  CHECK(format_date(*parse_date("2017-05-01")) == "2017-05-01");
  CHECK_FALSE(parse_date("2017-02-30"));
  CHECK_FALSE(parse_date("2017-5-1"));
  auto t = parse_timestamp("2017-05-01T06:05:00Z");
  REQUIRE(t);
  CHECK(bin_of(*t) == 73);
  CHECK(parse_timestamp("2017-05-01 06:05") == t);
  CHECK_FALSE(is_bin_aligned(*parse_timestamp("2017-05-01T06:07:00")));
  CHECK(parse_time_of_day("23:59") == 1439);
  CHECK_FALSE(parse_time_of_day("24:00"));
}

TEST_CASE("parse_readings groups by sensor and sorts by time") {
  std::istringstream in(
      "sensor_id,timestamp,count\n"
      "s1,2017-05-01T00:05:00,4\n"
      "s2,2017-05-01T00:00:00,1\n"
      "s1,2017-05-01T00:00:00,3\n");
  auto series = parse_readings(in, span_of("2017-05-01", "2017-05-02"));
  REQUIRE(series.size() == 2);
  CHECK(series[0].sensor_id == "s1");
  CHECK(series[0].readings.size() == 2);
  CHECK(series[0].readings[0].count == 3);
  CHECK(series[1].readings.size() == 1);
}

TEST_CASE("parse_readings header only gives no series") {
  std::istringstream in("sensor_id,timestamp,count\n");
  CHECK(parse_readings(in, span_of("2017-05-01", "2017-05-02")).empty());
}

TEST_CASE("parse_readings errors") {
  const DateSpan span = span_of("2017-05-01", "2017-05-02");
  SUBCASE("negative count is a domain error") {
    std::istringstream in("sensor_id,timestamp,count\ns1,2017-05-01T00:00:00,-3\n");
    try {
      parse_readings(in, span);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }
  SUBCASE("malformed row reports its line") {
    std::istringstream in("sensor_id,timestamp,count\ns1,2017-05-01T00:00:00,1\ns1,nonsense,2\n");
    try {
      parse_readings(in, span);
      FAIL("no throw");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("duplicate timestamp") {
    std::istringstream in(
        "sensor_id,timestamp,count\ns1,2017-05-01T00:00:00,1\ns1,2017-05-01T00:00:00,2\n");
    try {
      parse_readings(in, span);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::duplicate);
    }
  }
  SUBCASE("misaligned timestamp") {
    std::istringstream in("sensor_id,timestamp,count\ns1,2017-05-01T00:03:00,1\n");
    CHECK_THROWS_AS(parse_readings(in, span), ParseError);
  }
  SUBCASE("missing header") {
    std::istringstream in("s1,2017-05-01T00:00:00,1\n");
    CHECK_THROWS_AS(parse_readings(in, span), ParseError);
  }
}

TEST_CASE("filter_validity threshold") {
  const DateSpan span = span_of("2017-05-01", "2017-05-10");  // 2880 slots
  std::vector<SensorSeries> all{series_with(291, span), series_with(285, span)};
  all[0].sensor_id = "b_ok";   // 10.1%
  all[1].sensor_id = "a_low";  // 9.9%
  auto r = filter_validity(all, 0.10);
  REQUIRE(r.valid.size() == 1);
  CHECK(r.valid[0].sensor_id == "b_ok");
  CHECK(r.excluded_ids == std::vector<std::string>{"a_low"});

  auto again = filter_validity(r.valid, 0.10);
  CHECK(again.valid.size() == r.valid.size());
  CHECK(again.excluded_ids.empty());

  auto empty = filter_validity({}, 0.10);
  CHECK(empty.valid.empty());
  CHECK(empty.excluded_ids.empty());
}

TEST_CASE("filter_validity excluded list is sorted") {
  const DateSpan span = span_of("2017-05-01", "2017-05-01");
  std::vector<SensorSeries> all;
  for (const char* id : {"z", "m", "a"}) {
    auto s = series_with(1, span);
    s.sensor_id = id;
    all.push_back(s);
  }
  CHECK(filter_validity(all, 0.5).excluded_ids == std::vector<std::string>{"a", "m", "z"});
}

TEST_CASE("label_days override order") {
  const Calendar cal = Calendar::singapore_2017();
  WarningLog log;
  const DayLabels labels = label_days(cal, cal.span, &log);
  CHECK(labels.size() == 244);
  CHECK(labels.at(*parse_date("2017-05-01")) == TemporalLabel::public_holiday);
  CHECK(labels.at(*parse_date("2017-06-07")) == TemporalLabel::school_holiday);
  CHECK(labels.at(*parse_date("2017-11-14")) == TemporalLabel::tue);
  CHECK(labels.at(*parse_date("2017-06-26")) == TemporalLabel::public_holiday);  // inside school range
  CHECK(labels.at(*parse_date("2017-05-06")) == TemporalLabel::sat);
  CHECK_FALSE(labels.find(*parse_date("2017-12-31")));
  CHECK(log.empty());
}

TEST_CASE("label_days warns on holidays outside the span") {
  Calendar cal;
  cal.span = span_of("2017-05-01", "2017-05-31");
  cal.public_holidays = {*parse_date("2017-01-01")};
  cal.school_holidays = {span_of("2017-03-01", "2017-03-05")};
  WarningLog log;
  auto labels = label_days(cal, cal.span, &log);
  CHECK(log.messages().size() == 2);
  for (auto l : labels.labels()) CHECK(l != TemporalLabel::public_holiday);
}

TEST_CASE("calendar round trip and merge") {
  Calendar cal = Calendar::singapore_2017();
  cal.school_holidays.push_back(span_of("2017-06-20", "2017-06-30"));
  cal.normalize();
  std::stringstream buf;
  cal.write(buf);
  const Calendar back = Calendar::parse(buf);
  CHECK(back.span == cal.span);
  CHECK(back.public_holidays == cal.public_holidays);
  REQUIRE(back.school_holidays.size() == cal.school_holidays.size());
  for (std::size_t i = 1; i < back.school_holidays.size(); ++i) {
    CHECK(back.school_holidays[i - 1].last < back.school_holidays[i].first);
  }
}

TEST_CASE("normalize_counts") {
  SensorSeries s = series_with(3, span_of("2017-05-01", "2017-05-01"));
  auto values = [](const NormalizedSeries& n) {
    std::vector<double> v;
    for (auto& r : n.readings) v.push_back(r.value);
    return v;
  };
  SUBCASE("endpoints") {
    s.readings[0].count = 0;
    s.readings[1].count = 5;
    s.readings[2].count = 10;
    CHECK(values(normalize_counts(s)) == std::vector<double>{0.0, 0.5, 1.0});
  }
  SUBCASE("hand evaluation") {
    s.readings[0].count = 2;
    s.readings[1].count = 4;
    s.readings[2].count = 8;
    auto v = values(normalize_counts(s));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(1.0 / 3.0));
    CHECK(v[2] == 1.0);
  }
  SUBCASE("constant series") {
    for (auto& r : s.readings) r.count = 7;
    WarningLog log;
    CHECK(values(normalize_counts(s, &log)) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(log.messages().size() == 1);
  }
}

TEST_CASE("normalize_counts keeps range and argmax/argmin") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    SensorSeries s = series_with(40, span_of("2017-05-01", "2017-05-01"));
    for (auto& r : s.readings) r.count = static_cast<std::int64_t>(rng() % 500);
    auto n = normalize_counts(s);
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 0; i < s.readings.size(); ++i) {
      CHECK(n.readings[i].value >= 0.0);
      CHECK(n.readings[i].value <= 1.0);
      if (s.readings[i].count > s.readings[imax].count) imax = i;
      if (s.readings[i].count < s.readings[imin].count) imin = i;
    }
    CHECK(n.readings[imax].value == 1.0);
    CHECK(n.readings[imin].value == 0.0);
  }
}
