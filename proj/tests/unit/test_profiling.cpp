#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "spaceprofiler/profiling.hpp"

using namespace spaceprofiler;
using namespace std::chrono;

namespace {

Date d(const char* s) { return *parse_date(s); }

DayLabels plain_labels(DateSpan span) {
  Calendar cal;
  cal.span = span;
  return label_days(cal, span);
}

void add_day(NormalizedSeries& s, Date day, double value) {
  for (int b = 0; b < kBinsPerDay; ++b) s.readings.push_back({Timestamp{day} + minutes{5 * b}, value});
}

}  // namespace

TEST_CASE("daily_windows single Monday") {
  const DateSpan span{d("2017-05-01"), d("2017-05-07")};
  NormalizedSeries s{"a", {}};
  add_day(s, d("2017-05-01"), 0.4);
  auto p = daily_windows(s, plain_labels(span));
  const auto& mon = p[static_cast<std::size_t>(TemporalLabel::mon)];
  for (int b = 0; b < kBinsPerDay; ++b) {
    CHECK(mon.mean(static_cast<std::size_t>(b)) == doctest::Approx(0.4));
    CHECK(mon.support[static_cast<std::size_t>(b)] == 1);
  }
  CHECK(p[static_cast<std::size_t>(TemporalLabel::tue)].empty());
}

TEST_CASE("daily_windows two Tuesdays average") {
  const DateSpan span{d("2017-05-01"), d("2017-05-14")};
  NormalizedSeries s{"a", {}};
  s.readings.push_back({Timestamp{d("2017-05-02")}, 0.2});
  s.readings.push_back({Timestamp{d("2017-05-09")}, 0.6});
  auto p = daily_windows(s, plain_labels(span));
  CHECK(p[static_cast<std::size_t>(TemporalLabel::tue)].mean(0) == doctest::Approx(0.4));
}

TEST_CASE("daily_windows skips readings outside the span") {
  const DateSpan span{d("2017-05-01"), d("2017-05-07")};
  NormalizedSeries s{"a", {{Timestamp{d("2017-06-01")}, 0.5}}};
  WarningLog log;
  auto p = daily_windows(s, plain_labels(span), &log);
  CHECK_FALSE(log.empty());
  for (const auto& lp : p) CHECK(lp.empty());
}

TEST_CASE("generic_profiles aggregation") {
  LabelProfiles lp;
  SUBCASE("identical weekdays pass through") {
    for (int l = 0; l < 5; ++l) {
      for (int b = 0; b < kBinsPerDay; ++b) {
        lp[l].sum[b] = 0.3 * 2;
        lp[l].support[b] = 2;
      }
    }
    auto g = generic_profiles("a", lp);
    for (double v : g[0].bins) CHECK(v == doctest::Approx(0.3));
  }
  SUBCASE("support-weighted weekend") {
    lp[0].sum[0] = 0.1;
    lp[0].support[0] = 1;
    auto& sat = lp[static_cast<std::size_t>(TemporalLabel::sat)];
    auto& sun = lp[static_cast<std::size_t>(TemporalLabel::sun)];
    sat.sum[0] = 0.2 * 10;
    sat.support[0] = 10;
    sun.sum[0] = 0.6 * 30;
    sun.support[0] = 30;
    auto g = generic_profiles("a", lp);
    CHECK(g[1].bins[0] == doctest::Approx(0.5));
    CHECK(g[1].support[0] == 40);
  }
  SUBCASE("public holiday is dropped") {
    lp[0].sum[0] = 0.1;
    lp[0].support[0] = 1;
    auto& ph = lp[static_cast<std::size_t>(TemporalLabel::public_holiday)];
    ph.sum[5] = 0.9;
    ph.support[5] = 1;
    auto g = generic_profiles("a", lp);
    for (const auto& p : g) CHECK(p.support[5] == 0);
    CHECK(g[1].empty());
    CHECK(g[2].empty());
  }
  SUBCASE("no weekday data") {
    try {
      generic_profiles("a", lp);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::insufficient_data);
    }
  }
}

TEST_CASE("equal support gives the unweighted weekday mean") {
  LabelProfiles lp;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> expect(kBinsPerDay, 0.0);
  for (int l = 0; l < 5; ++l) {
    for (int b = 0; b < kBinsPerDay; ++b) {
      const double v = u(rng);
      lp[l].sum[b] = 4 * v;
      lp[l].support[b] = 4;
      expect[b] += v / 5;
    }
  }
  auto g = generic_profiles("a", lp);
  for (int b = 0; b < kBinsPerDay; ++b) CHECK(g[0].bins[b] == doctest::Approx(expect[b]));
}

TEST_CASE("fill_gaps interpolates linearly") {
  DayTypeProfile p;
  p.bins[10] = 0.2;
  p.support[10] = 1;
  p.bins[14] = 0.6;
  p.support[14] = 1;
  auto f = fill_gaps(p);
  REQUIRE(f.size() == static_cast<std::size_t>(kBinsPerDay));
  CHECK(f[0] == doctest::Approx(0.2));
  CHECK(f[12] == doctest::Approx(0.4));
  CHECK(f[13] == doctest::Approx(0.5));
  CHECK(f[287] == doctest::Approx(0.6));
}

TEST_CASE("build_profiles: full span, 288 bins, date order irrelevant, parallel matches serial") {
  Calendar cal = Calendar::singapore_2017();
  const DayLabels labels = label_days(cal, cal.span);
  std::mt19937_64 rng(11);
  std::vector<SensorSeries> series;
  for (int s = 0; s < 6; ++s) {
    SensorSeries ss;
    ss.sensor_id = "s" + std::to_string(s);
    ss.expected_span = cal.span;
    for (Date day = cal.span.first; day <= cal.span.last; day += days{1}) {
      for (int b = 0; b < kBinsPerDay; b += 3) {
        if (rng() % 7 == 0) continue;
        ss.readings.push_back({Timestamp{day} + minutes{5 * b}, static_cast<std::int64_t>(rng() % 100)});
      }
    }
    series.push_back(std::move(ss));
  }
  const auto par = build_profiles(series, labels);
  const auto ser = serial::build_profiles(series, labels);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    for (DayType t : kDayTypes) {
      CHECK(par[i][t].bins.size() == 288);
      CHECK(par[i][t].bins == ser[i][t].bins);
      CHECK(par[i][t].support == ser[i][t].support);
      for (double v : par[i][t].bins) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }

  // Reversing reading order within a sensor (same multiset of dates) changes nothing
  // once the profile sums are compared with tolerance.
  auto norm = normalize_counts(series[0]);
  auto forward = daily_windows(norm, labels);
  std::reverse(norm.readings.begin(), norm.readings.end());
  auto backward = daily_windows(norm, labels);
  for (std::size_t l = 0; l < kTemporalLabelCount; ++l) {
    CHECK(forward[l].support == backward[l].support);
    for (int b = 0; b < kBinsPerDay; ++b) {
      CHECK(forward[l].sum[b] == doctest::Approx(backward[l].sum[b]).epsilon(1e-12));
    }
  }
}

TEST_CASE("profiles csv round trip") {
  DayTypeProfile p;
  p.sensor_id = "s9";
  p.label = DayType::weekend;
  for (int b = 0; b < kBinsPerDay; ++b) {
    p.bins[b] = b / 287.0 / 3.0;
    p.support[b] = 1;
  }
  std::stringstream buf;
  write_profiles_csv(buf, std::span<const DayTypeProfile>(&p, 1));
  auto back = read_profiles_csv(buf);
  REQUIRE(back.size() == 1);
  CHECK(back[0].sensor_id == "s9");
  CHECK(back[0].label == DayType::weekend);
  CHECK(back[0].bins == p.bins);
}
