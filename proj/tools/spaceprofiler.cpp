#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spaceprofiler/pipeline.hpp"
#include "spaceprofiler/plots.hpp"
#include "spaceprofiler/synth.hpp"

namespace fs = std::filesystem;
using namespace spaceprofiler;

namespace {

enum class Verbosity { quiet, normal, verbose };
Verbosity verbosity = Verbosity::normal;

void info(const std::string& msg) {
  if (verbosity != Verbosity::quiet) std::cerr << msg << '\n';
}

void write_or_throw(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorKind::io, "failed writing " + path.string());
}

template <class F>
void write_with(const fs::path& path, F&& body) {
  std::ostringstream buf;
  body(buf);
  write_or_throw(path, buf.str());
}

int cmd_synth(std::uint64_t seed, const fs::path& out, double noise_sd, double dropout) {
  SynthConfig cfg = default_synth_config(seed);
  cfg.archetypes = default_archetypes(noise_sd, dropout);
  const SyntheticDataset ds = synth_generate(cfg);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + out.string() + ": " + ec.message());
  write_with(out / "readings.csv", [&](std::ostream& o) { write_readings_csv(o, ds.series); });
  write_with(out / "static.csv", [&](std::ostream& o) { write_static_csv(o, ds.static_features); });
  write_with(out / "labels.csv",
             [&](std::ostream& o) { write_labels_csv(o, ds.truth, cfg.archetypes); });
  write_with(out / "calendar.toml", [&](std::ostream& o) { cfg.calendar.write(o); });
  PipelineConfig pc;
  pc.readings = "readings.csv";
  pc.static_features = "static.csv";
  pc.calendar = "calendar.toml";
  pc.seed = seed;
  pc.output_dir = "report";
  write_with(out / "config.toml", [&](std::ostream& o) { pc.write(o); });
  info("synth: " + std::to_string(ds.series.size()) + " sensors written to " + out.string());
  return 0;
}

int cmd_run(const fs::path& config_path, const std::string& out_flag,
            const std::optional<double>& min_valid) {
  PipelineConfig cfg = PipelineConfig::load(config_path);
  if (min_valid) cfg.min_valid_fraction = *min_valid;
  if (!out_flag.empty()) {
    cfg.output_dir = out_flag;
  } else if (const char* env = std::getenv("SPACEPROFILER_OUT"); env != nullptr && *env != '\0') {
    cfg.output_dir = env;
  }
  const PipelineResult result = run_pipeline(cfg);
  write_bundle(result, cfg, cfg.output_dir);
  for (const std::string& w : result.warnings) {
    if (verbosity == Verbosity::verbose) std::cerr << "warning: " << w << '\n';
  }
  if (verbosity == Verbosity::normal && !result.warnings.empty()) {
    std::cerr << result.warnings.size() << " warning(s); see report.json or use --verbose\n";
  }
  std::ostringstream summary;
  summary << "run: " << result.sensor_ids.size() << " sensors clustered, k =";
  for (const auto& d : result.day_types) summary << ' ' << d.model.k;
  summary << " (Weekday/Weekend/SchoolHoliday); report in " << cfg.output_dir.string();
  info(summary.str());
  return 0;
}

int cmd_plot(const fs::path& bundle) {
  const auto files = emit_plots(bundle);
  info("plot: " + std::to_string(files.size()) + " SVG files in " + (bundle / "plots").string());
  if (verbosity == Verbosity::verbose) {
    for (const auto& f : files) std::cerr << "  " << f.string() << '\n';
  }
  return 0;
}

int cmd_inspect(const fs::path& bundle, const std::string& matrix, const std::string& day_type) {
  auto dt = parse_day_type(day_type);
  if (!dt) throw Error(ErrorKind::config, "unknown day type '" + day_type + "'");
  const fs::path path = audit_matrix_path(bundle, *dt, matrix);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::cout << in.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spaceprofiler: public-space utilisation profiling from PoI sensor counts"};
  app.require_subcommand(1);
  bool quiet = false, verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only print errors");
  app.add_flag("-v,--verbose", verbose, "Print every warning");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with planted clusters");
  std::uint64_t seed = 42;
  std::string synth_out;
  double noise_sd = 0.05, dropout = 0.05;
  synth->add_option("--seed", seed, "Random seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--noise-sd", noise_sd, "Gaussian noise on normalised utilisation")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  synth->add_option("--dropout", dropout, "Probability of a missing reading")
      ->capture_default_str()->check(CLI::Range(0.0, 0.999999));

  auto* run = app.add_subcommand("run", "Run the full profiling pipeline");
  std::string config_path, run_out;
  std::optional<double> min_valid;
  run->add_option("--config", config_path, "Pipeline config file")->required();
  run->add_option("--out", run_out, "Output directory (overrides SPACEPROFILER_OUT and output.dir)");
  run->add_option("--min-valid-fraction", min_valid, "Validity threshold (default 0.10)")
      ->check(CLI::Range(0.0, 1.0));

  auto* plot = app.add_subcommand("plot", "Render SVG plots from a report bundle");
  std::string plot_bundle;
  plot->add_option("--bundle", plot_bundle, "Report directory")->required();

  auto* inspect = app.add_subcommand("inspect", "Print an intermediate matrix as CSV");
  std::string inspect_bundle, matrix, day_type = "weekday";
  std::string names;
  for (const auto& n : audit_matrix_names()) names += (names.empty() ? "" : ", ") + n;
  inspect->add_option("--bundle", inspect_bundle, "Report directory")->required();
  inspect->add_option("--matrix", matrix, "One of: " + names)->required();
  inspect->add_option("--day-type", day_type, "weekday, weekend or school_holiday")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  verbosity = quiet ? Verbosity::quiet : verbose ? Verbosity::verbose : Verbosity::normal;

  try {
    if (*synth) return cmd_synth(seed, synth_out, noise_sd, dropout);
    if (*run) return cmd_run(config_path, run_out, min_valid);
    if (*plot) return cmd_plot(plot_bundle);
    if (*inspect) return cmd_inspect(inspect_bundle, matrix, day_type);
  } catch (const Error& e) {
    std::cerr << "spaceprofiler: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spaceprofiler: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
