#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "spaceprofiler/config_text.hpp"
#include "spaceprofiler/pipeline.hpp"
#include "spaceprofiler/plots.hpp"
#include "spaceprofiler/synth.hpp"

using namespace spaceprofiler;
namespace fs = std::filesystem;

namespace {

fs::path make_fixture(const std::string& name, std::uint64_t seed = 42) {
  const fs::path dir = oracle::scratch_dir(name);
  SynthConfig c = default_synth_config(seed);
  const auto ds = synth_generate(c);
  std::ofstream(dir / "readings.csv") << [&] {
    std::ostringstream o;
    write_readings_csv(o, ds.series);
    return o.str();
  }();
  std::ofstream(dir / "static.csv") << [&] {
    std::ostringstream o;
    write_static_csv(o, ds.static_features);
    return o.str();
  }();
  std::ofstream cal(dir / "calendar.toml");
  c.calendar.write(cal);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

}  // namespace

TEST_CASE("text config subset") {
  const auto c = TextConfig::parse(
      "# comment\n[a]\nname = \"x # y\"  # trailing\nn = 3\nf = -0.25\nflag = true\n"
      "list = [\n  \"p\",\n  \"q\",\n]\nnums = [1, 2.5]\n");
  CHECK(c.get_string("a.name") == "x # y");
  CHECK(c.get_integer("a.n") == 3);
  CHECK(c.get_number("a.f") == -0.25);
  CHECK(c.get_bool("a.flag") == true);
  CHECK(c.get_string_array("a.list") == std::vector<std::string>{"p", "q"});
  CHECK(c.get_number_array("a.nums") == std::vector<double>{1, 2.5});
  CHECK_FALSE(c.get_string("a.missing"));
  CHECK_THROWS_AS(c.get_string("a.n"), Error);
  CHECK_THROWS_AS(c.get_integer("a.f"), Error);
  CHECK_THROWS_AS(TextConfig::parse("[a\n"), Error);
  CHECK_THROWS_AS(TextConfig::parse("k = \"open\n"), Error);
}

TEST_CASE("pipeline config defaults and round trip") {
  PipelineConfig c;
  CHECK(c.min_valid_fraction == 0.10);
  CHECK(c.w1 == 0.5);
  CHECK(c.w2 == 0.5);
  CHECK(c.sessions == default_sessions());
  CHECK(c.categories == CategoryBounds{});

  c.readings = "/data/r.csv";
  c.static_features = "/data/s.csv";
  c.calendar = "/data/cal.toml";
  c.min_valid_fraction = 0.15;
  c.wied_window = 3;
  c.sessions[0].start_minute = 5 * 60 + 30;
  c.w1 = 0.3;
  c.w2 = 0.7;
  c.seed = 9007199254740991ULL;
  c.k_range = KRange{3, 7};
  c.categories.lower_edges = {0.4, 0.25, 0.1, 0.01};
  c.margin = 0.05;
  c.output_dir = "/tmp/out";
  std::stringstream buf;
  c.write(buf);
  const auto back = PipelineConfig::parse(buf);
  CHECK(back == c);
}

TEST_CASE("pipeline config rejects bad values") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return PipelineConfig::parse(in);
  };
  CHECK_THROWS_AS(parse("[weights]\nw1 = 0.5\nw2 = 0.6\n"), Error);
  CHECK_THROWS_AS(parse("[sessions]\nf1 = \"06:00-12:00\"\n"), Error);
  CHECK_THROWS_AS(parse("[sessions]\nf1 = \"6am\"\n"), Error);
  CHECK_THROWS_AS(parse("[kmeans]\nk_range = [1, 4]\n"), Error);
  CHECK_THROWS_AS(parse("[filter]\nmin_valid_fraction = 1.5\n"), Error);
  CHECK_THROWS_AS(parse("[categories]\nbounds = [0.1, 0.2, 0.3, 0.4]\n"), Error);
}

TEST_CASE("run_pipeline on the synthetic fixture, bundle, plots, determinism") {
  const fs::path dir = make_fixture("pipeline");
  PipelineConfig c;
  c.readings = dir / "readings.csv";
  c.static_features = dir / "static.csv";
  c.calendar = dir / "calendar.toml";
  const auto r = run_pipeline(c);
  CHECK(r.sensor_ids.size() == 47);
  CHECK(r.day_types[0].model.k == 5);
  CHECK(r.day_types[1].model.k == 4);
  CHECK(r.day_types[2].model.k == 5);
  CHECK(r.verdicts.size() == 47);
  // Weekend carries no Category 2 cluster in this fixture.
  for (const auto& [cluster, cat] : r.day_types[1].cluster_categories) CHECK(cat != 2);

  write_bundle(r, c, dir / "out");
  CHECK_FALSE(fs::exists(dir / "out" / ".incomplete"));
  for (const char* f : {"report.json", "verdicts.csv", "profiles_weekday.csv", "profiles_weekend.csv",
                        "profiles_school_holiday.csv", "plots/activeness.svg", "plots/static_features.svg",
                        "plots/profiles_weekday.svg", "plots/eigenvectors_weekend.svg",
                        "plots/clusters_school_holiday.svg", "audit/weekday_laplacian.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / "out" / f), f);
  }
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  CHECK(report["schema_version"] == kReportSchemaVersion);
  CHECK(report["day_types"][1]["k"] == 4);

  const auto r2 = run_pipeline(c);
  CHECK(report_json(r, c) == report_json(r2, c));

  // The weekend cluster grid leaves the Category 2 cell blank.
  const std::string grid = slurp(dir / "out" / "plots" / "clusters_weekend.svg");
  CHECK(grid.find("Category 2") != std::string::npos);
  CHECK(grid.find("#f4f4f4") != std::string::npos);

  // Matrices exported for audit read back with the right shape.
  std::ifstream in(audit_matrix_path(dir / "out", DayType::weekday, "affinity"));
  const auto m = read_matrix_csv(in);
  CHECK(m.values.rows() == 47);
  CHECK(m.values.isApprox(m.values.transpose()));

  // Config round trip yields an equivalent run.
  std::stringstream buf;
  c.write(buf);
  const auto reloaded = PipelineConfig::parse(buf);
  CHECK(report_json(run_pipeline(reloaded), reloaded) == report_json(r, c));
}

TEST_CASE("run_pipeline error paths") {
  const fs::path dir = make_fixture("pipeline_errors");
  PipelineConfig c;
  c.readings = dir / "readings.csv";
  c.static_features = dir / "missing_static.csv";
  try {
    run_pipeline(c);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
    CHECK(std::string(e.what()).find("missing_static.csv") != std::string::npos);
  }
}

TEST_CASE("emit_plots lists missing artifacts") {
  const fs::path dir = oracle::scratch_dir("plots_missing");
  try {
    emit_plots(dir);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("report.json") != std::string::npos);
  }
  std::ofstream(dir / "report.json") << R"({"day_types": [{"day_type": "Weekday", "clusters": []}]})";
  try {
    emit_plots(dir);
    FAIL("no throw");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("clusters for Weekday") != std::string::npos);
    CHECK(msg.find("clusters for Weekend") != std::string::npos);
    CHECK(msg.find("verdicts") != std::string::npos);
  }
}
