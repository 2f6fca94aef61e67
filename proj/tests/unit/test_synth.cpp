#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spaceprofiler/synth.hpp"

using namespace spaceprofiler;

namespace {

SynthConfig small_config(double noise, double dropout, std::uint64_t seed = 42) {
  SynthConfig c = default_synth_config(seed);
  c.archetypes = default_archetypes(noise, dropout);
  c.sensors_per_archetype = {2, 2, 2, 2, 2};
  return c;
}

}  // namespace

TEST_CASE("noiseless synth reproduces the archetype curves") {
  SynthConfig c = small_config(0.0, 0.0);
  const auto ds = synth_generate(c);
  const auto labels = label_days(c.calendar, c.calendar.span);
  const auto profiles = build_profiles(ds.series, labels);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& arch = c.archetypes[static_cast<std::size_t>(ds.truth.archetype[i])];
    for (DayType t : kDayTypes) {
      const auto curve = arch.effective_curve(t);
      const auto& p = profiles[i][t];
      for (int b = 0; b < kBinsPerDay; ++b) {
        // counts are rounded to 1/max_count
        CHECK(std::abs(p.bins[b] - curve[b]) <= 0.5 / c.max_count + 1e-12);
      }
    }
  }
}

TEST_CASE("heavy dropout falls below the validity threshold") {
  SynthConfig c = small_config(0.05, 0.95);
  const auto ds = synth_generate(c);
  const auto r = filter_validity(ds.series, 0.10);
  CHECK(r.valid.empty());
  CHECK(r.excluded_ids.size() == ds.series.size());
}

TEST_CASE("default fixture: 47 sensors, all valid, planted counts 5/4/5") {
  const auto ds = synth_generate(default_synth_config(42));
  CHECK(ds.series.size() == 47);
  CHECK(ds.static_features.rows.size() == 47);
  CHECK(filter_validity(ds.series, 0.10).excluded_ids.empty());
  CHECK(ds.truth.cluster_counts == std::array<int, 3>{5, 4, 5});
}

TEST_CASE("synth output is deterministic and parses back") {
  SynthConfig c = default_synth_config(42);
  c.archetypes = default_archetypes();
  c.sensors_per_archetype = {10, 10, 10, 10, 10};
  auto render = [&] {
    const auto ds = synth_generate(c);
    std::ostringstream r, s, l;
    write_readings_csv(r, ds.series);
    write_static_csv(s, ds.static_features);
    write_labels_csv(l, ds.truth, c.archetypes);
    return r.str() + s.str() + l.str();
  };
  const std::string first = render();
  CHECK(first == render());

  const auto ds = synth_generate(c);
  std::stringstream r;
  write_readings_csv(r, ds.series);
  const auto back = parse_readings(r, c.calendar.span);
  REQUIRE(back.size() == ds.series.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].sensor_id == ds.series[i].sensor_id);
    REQUIRE(back[i].readings.size() == ds.series[i].readings.size());
    for (std::size_t j = 0; j < back[i].readings.size(); ++j) {
      CHECK(back[i].readings[j].count >= 0);
    }
  }
  std::stringstream s;
  write_static_csv(s, ds.static_features);
  CHECK(load_static(s, {}).rows.size() == 50);
}

TEST_CASE("generated per-bin means track the curve (law of large numbers)") {
  // No dropout and a mid-range curve so clipping is negligible.
  SynthConfig c = small_config(0.05, 0.0, 7);
  const auto ds = synth_generate(c);
  const auto labels = label_days(c.calendar, c.calendar.span);
  const auto profiles = build_profiles(ds.series, labels);
  const auto& arch = c.archetypes[0];
  const auto curve = arch.effective_curve(DayType::weekday);
  const auto& p = profiles[0][DayType::weekday];
  // Many bins are tested at once, so a few 3-sigma excursions are expected
  // (more than 4 of ~160 has probability below 1e-3).
  int checked = 0, within3 = 0;
  for (int b = 0; b < kBinsPerDay; ++b) {
    if (curve[b] < 0.2 || curve[b] > 0.8) continue;
    const double se = 0.05 / std::sqrt(static_cast<double>(p.support[b]));
    const double z = std::abs(p.bins[b] - curve[b]) / se;
    CHECK(z <= 5.0);
    if (z <= 3.0) ++within3;
    ++checked;
  }
  CHECK(checked > 100);
  CHECK(checked - within3 <= 4);
}

TEST_CASE("synth config validation") {
  SynthConfig c = small_config(0.05, 0.05);
  SUBCASE("short span") {
    c.calendar.span.last = c.calendar.span.first + std::chrono::days{20};
    try {
      synth_generate(c);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }
  SUBCASE("one archetype") {
    c.archetypes.resize(1);
    c.sensors_per_archetype.resize(1);
    CHECK_THROWS_AS(synth_generate(c), Error);
  }
  SUBCASE("bad dropout") {
    c.archetypes[0].dropout_rate = 1.0;
    CHECK_THROWS_AS(synth_generate(c), Error);
  }
}
