#include "spaceprofiler/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "spaceprofiler/activeness.hpp"

namespace spaceprofiler {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Distribution code is written out so streams match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long long integer(long long lo, long long hi) {
    return lo + static_cast<long long>(uniform() * static_cast<double>(hi - lo + 1));
  }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

DayType day_type_of(TemporalLabel l) {
  switch (l) {
    case TemporalLabel::sat:
    case TemporalLabel::sun:
    case TemporalLabel::public_holiday: return DayType::weekend;
    case TemporalLabel::school_holiday: return DayType::school_holiday;
    default: return DayType::weekday;
  }
}

double curve_mean(const std::vector<double>& c) {
  return std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
}

}  // namespace

void ArchetypeSpec::validate() const {
  if (base_curve.size() != static_cast<std::size_t>(kBinsPerDay)) {
    throw Error(ErrorKind::config, "archetype " + name + ": base curve needs 288 bins");
  }
  for (double v : base_curve) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::config, "archetype " + name + ": curve outside [0, 1]");
  }
  for (double m : multipliers) {
    if (!(m >= 0.0)) throw Error(ErrorKind::config, "archetype " + name + ": negative multiplier");
  }
  if (!(noise_sd >= 0.0)) throw Error(ErrorKind::config, "archetype " + name + ": noise_sd < 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorKind::config, "archetype " + name + ": dropout_rate outside [0, 1)");
  }
}

std::vector<double> ArchetypeSpec::effective_curve(DayType t) const {
  std::vector<double> out(base_curve);
  const double m = multipliers[static_cast<std::size_t>(t)];
  for (double& v : out) v = std::clamp(v * m, 0.0, 1.0);
  return out;
}

std::vector<double> curve_from_hourly_knots(std::span<const double> knots, double target_mean) {
  if (knots.size() != 25) throw Error(ErrorKind::config, "need 25 hourly knots (00:00 .. 24:00)");
  std::vector<double> curve(kBinsPerDay);
  constexpr int bins_per_hour = 60 / kMinutesPerBin;
  for (int b = 0; b < kBinsPerDay; ++b) {
    const int h = b / bins_per_hour;
    const double t = static_cast<double>(b % bins_per_hour) / bins_per_hour;
    curve[static_cast<std::size_t>(b)] = knots[h] + t * (knots[h + 1] - knots[h]);
  }
  const double mean = curve_mean(curve);
  if (mean > 0.0) {
    for (double& v : curve) v = std::min(1.0, v * target_mean / mean);
  }
  return curve;
}

void SynthConfig::validate() const {
  if (archetypes.size() < 2) throw Error(ErrorKind::config, "synth needs at least 2 archetypes");
  if (sensors_per_archetype.size() != archetypes.size()) {
    throw Error(ErrorKind::config, "sensors_per_archetype must have one entry per archetype");
  }
  for (int n : sensors_per_archetype) {
    if (n < 1) throw Error(ErrorKind::config, "each archetype needs at least one sensor");
  }
  for (const auto& a : archetypes) a.validate();
  if (calendar.span.days() < 28) {
    throw Error(ErrorKind::config, "synthetic span must cover at least 4 weeks, got " +
                                       std::to_string(calendar.span.days()) + " days");
  }
  if (max_count < 1) throw Error(ErrorKind::config, "max_count must be positive");
}

SyntheticDataset synth_generate(const SynthConfig& config) {
  config.validate();
  const DayLabels labels = label_days(config.calendar, config.calendar.span);
  const DateSpan span = config.calendar.span;

  Date calibration_day = span.first;
  for (Date d = span.first; d <= span.last; d += std::chrono::days{1}) {
    if (labels.at(d) == TemporalLabel::public_holiday) {
      calibration_day = d;
      break;
    }
  }

  const int total = std::accumulate(config.sensors_per_archetype.begin(),
                                    config.sensors_per_archetype.end(), 0);
  const int width = std::max(2, static_cast<int>(std::to_string(total).size()));

  // Archetype-level facts shared by all of its sensors.
  std::vector<std::array<std::vector<double>, 3>> curves;
  std::vector<bool> archetype_active;
  for (const auto& a : config.archetypes) {
    std::array<std::vector<double>, 3> c{a.effective_curve(DayType::weekday),
                                         a.effective_curve(DayType::weekend),
                                         a.effective_curve(DayType::school_holiday)};
    std::array<std::optional<int>, 3> cats;
    for (std::size_t t = 0; t < 3; ++t) cats[t] = categorize(curve_mean(c[t]));
    archetype_active.push_back(classify_poi(cats) == Verdict::active);
    curves.push_back(std::move(c));
  }

  SyntheticDataset out;
  GroundTruth& truth = out.truth;
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<int> group(config.archetypes.size());
    int next = 0;
    for (std::size_t a = 0; a < config.archetypes.size(); ++a) {
      group[a] = -1;
      for (std::size_t b = 0; b < a; ++b) {
        if (curves[a][t] == curves[b][t]) {
          group[a] = group[b];
          break;
        }
      }
      if (group[a] < 0) group[a] = next++;
    }
    truth.cluster_counts[t] = next;
    for (std::size_t a = 0; a < config.archetypes.size(); ++a) {
      for (int s = 0; s < config.sensors_per_archetype[a]; ++s) truth.day_type_labels[t].push_back(group[a]);
    }
  }

  int index = 0;
  for (std::size_t a = 0; a < config.archetypes.size(); ++a) {
    const ArchetypeSpec& arch = config.archetypes[a];
    for (int s = 0; s < config.sensors_per_archetype[a]; ++s, ++index) {
      std::string id = std::to_string(index + 1);
      id = "s" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
      truth.sensor_ids.push_back(id);
      truth.archetype.push_back(static_cast<int>(a));

      Rng rng(splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1)));
      SensorSeries series;
      series.sensor_id = id;
      series.expected_span = span;
      for (Date d = span.first; d <= span.last; d += std::chrono::days{1}) {
        const auto& curve = curves[a][static_cast<std::size_t>(day_type_of(labels.at(d)))];
        for (int b = 0; b < kBinsPerDay; ++b) {
          const Timestamp ts = Timestamp{d} + std::chrono::minutes{b * kMinutesPerBin};
          const bool calibration = d == calibration_day && (b == 36 || b == 37);
          // Draw both variates unconditionally so the stream does not depend
          // on which readings are dropped.
          const double noise = arch.noise_sd > 0.0 ? arch.noise_sd * rng.normal() : 0.0;
          const bool dropped = rng.uniform() < arch.dropout_rate;
          if (calibration) {
            series.readings.push_back({ts, b == 36 ? config.max_count : 0});
            continue;
          }
          if (dropped) continue;
          const double v = std::clamp(curve[static_cast<std::size_t>(b)] + noise, 0.0, 1.0);
          series.readings.push_back(
              {ts, std::llround(v * static_cast<double>(config.max_count))});
        }
      }
      out.series.push_back(std::move(series));

      // Static features: active archetypes sit nearer shops and food, with
      // denser housing and more pathways. Bus stops are drawn alike.
      Rng frng(splitmix64(config.seed ^ 0x5A17Cull ^ splitmix64(static_cast<std::uint64_t>(index) + 1)));
      const bool active = archetype_active[a];
      StaticRow row;
      row.sensor_id = id;
      static constexpr std::array<PoiType, 4> cycle{PoiType::playground, PoiType::precinct_pavilion,
                                                    PoiType::multi_purpose_court, PoiType::link_way};
      row.poi_type = cycle[static_cast<std::size_t>(index) % cycle.size()];
      if (a + 1 == config.archetypes.size() && s < 2) row.poi_type = PoiType::community_garden;
      auto pair = [&](std::size_t f, double lo, double hi) {
        row.values[f] = std::round(frng.uniform(lo, hi));
        row.values[f + 1] = row.values[f] + std::round(frng.uniform(10.0, 150.0));
      };
      pair(0, 60.0, 400.0);
      if (active) {
        pair(2, 30.0, 150.0);
        pair(4, 20.0, 120.0);
        pair(6, 30.0, 150.0);
        row.values[8] = static_cast<double>(frng.integer(5, 10));
        row.values[9] = static_cast<double>(frng.integer(500, 1200));
        row.values[10] = static_cast<double>(frng.integer(3, 6));
        row.values[11] = static_cast<double>(frng.integer(4, 8));
      } else {
        pair(2, 120.0, 400.0);
        pair(4, 100.0, 350.0);
        pair(6, 120.0, 400.0);
        row.values[8] = static_cast<double>(frng.integer(1, 6));
        row.values[9] = static_cast<double>(frng.integer(100, 600));
        row.values[10] = static_cast<double>(frng.integer(1, 4));
        row.values[11] = static_cast<double>(frng.integer(1, 4));
      }
      out.static_features.rows.push_back(row);
    }
  }
  return out;
}

std::vector<ArchetypeSpec> default_archetypes(double noise_sd, double dropout_rate) {
  // Hourly knots 00:00 .. 24:00; night hours stay at zero.
  const std::array<double, 25> busy{0, 0, 0, 0, 0, 0, .10, .40, .55, .50, .45, .45, .50,
                                    .45, .45, .55, .70, .85, .90, .85, .75, .55, .30, .10, 0};
  const std::array<double, 25> afternoon{0, 0, 0, 0, 0, 0, 0, .05, .10, .10, .15, .30, .55,
                                         .70, .75, .70, .60, .45, .35, .30, .25, .15, .05, 0, 0};
  const std::array<double, 25> morning{0, 0, 0, 0, 0, 0, .30, .60, .70, .55, .40, .25, .15,
                                       .10, .08, .08, .10, .12, .12, .10, .05, 0, 0, 0, 0};
  const std::array<double, 25> evening_burst{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, .05, .10,
                                             .05, 0, 0, 0, 0, 0, 0, .40, .50, .20, 0, 0};
  const std::array<double, 25> quiet{0, 0, 0, 0, 0, 0, 0, 0, .03, .03, .03, .03, .03,
                                     .03, .03, .03, .03, .03, .03, 0, 0, 0, 0, 0, 0};
  auto make = [&](std::string name, std::span<const double> knots, double mean,
                  std::array<double, 3> mult) {
    ArchetypeSpec a;
    a.name = std::move(name);
    a.base_curve = curve_from_hourly_knots(knots, mean);
    a.multipliers = mult;
    a.noise_sd = noise_sd;
    a.dropout_rate = dropout_rate;
    return a;
  };
  return {
      make("busy", busy, 0.3850, {1.0, 0.905, 0.979}),
      make("afternoon", afternoon, 0.2301, {1.0, 0.74, 0.93}),
      make("morning", morning, 0.1621, {1.0, 0.47, 0.70}),
      make("evening_burst", evening_burst, 0.0577, {1.0, 0.0, 1.0}),
      make("quiet", quiet, 0.0105, {1.0, 0.0, 1.43}),
  };
}

SynthConfig default_synth_config(std::uint64_t seed) {
  SynthConfig c;
  c.archetypes = default_archetypes();
  c.sensors_per_archetype = {10, 10, 9, 9, 9};
  c.calendar = Calendar::singapore_2017();
  c.seed = seed;
  return c;
}

void write_readings_csv(std::ostream& out, std::span<const SensorSeries> series) {
  out << "sensor_id,timestamp,count\n";
  std::string buf;
  buf.reserve(1 << 20);
  char num[32];
  for (const SensorSeries& s : series) {
    Date current{};
    std::string date_prefix;
    for (const Reading& r : s.readings) {
      const Date d = date_of(r.time);
      if (date_prefix.empty() || d != current) {
        current = d;
        date_prefix = format_date(d) + "T";
      }
      const auto secs = (r.time - Timestamp{d}).count();
      const int hh = static_cast<int>(secs / 3600), mm = static_cast<int>(secs / 60 % 60);
      buf += s.sensor_id;
      buf += ',';
      buf += date_prefix;
      buf += static_cast<char>('0' + hh / 10);
      buf += static_cast<char>('0' + hh % 10);
      buf += ':';
      buf += static_cast<char>('0' + mm / 10);
      buf += static_cast<char>('0' + mm % 10);
      buf += ":00,";
      auto [ptr, ec] = std::to_chars(num, num + sizeof num, r.count);
      (void)ec;
      buf.append(num, ptr);
      buf += '\n';
      if (buf.size() > (1 << 20) - 128) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_labels_csv(std::ostream& out, const GroundTruth& truth,
                      std::span<const ArchetypeSpec> archetypes) {
  out << "sensor_id,archetype,label_wd,label_we,label_sh\n";
  for (std::size_t i = 0; i < truth.sensor_ids.size(); ++i) {
    const int a = truth.archetype[i];
    out << truth.sensor_ids[i] << ','
        << (static_cast<std::size_t>(a) < archetypes.size() ? archetypes[static_cast<std::size_t>(a)].name
                                                            : std::to_string(a))
        << ',' << truth.day_type_labels[0][i] << ',' << truth.day_type_labels[1][i] << ','
        << truth.day_type_labels[2][i] << '\n';
  }
}

}  // namespace spaceprofiler
