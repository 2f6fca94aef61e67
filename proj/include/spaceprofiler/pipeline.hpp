#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spaceprofiler/activeness.hpp"
#include "spaceprofiler/error.hpp"
#include "spaceprofiler/ingest.hpp"
#include "spaceprofiler/spectral.hpp"
#include "spaceprofiler/staticfeat.hpp"

namespace spaceprofiler {

inline constexpr int kReportSchemaVersion = 1;

struct PipelineConfig {
  std::filesystem::path readings;
  std::filesystem::path static_features;
  std::filesystem::path calendar;  // empty: built-in Singapore 2017 calendar
  double min_valid_fraction = kDefaultMinValidFraction;
  int wied_window = 2;
  SessionSet sessions = default_sessions();
  double w1 = 0.5;
  double w2 = 0.5;
  std::uint64_t seed = 42;
  std::optional<KRange> k_range;
  CategoryBounds categories;
  double margin = 0.0;
  std::filesystem::path output_dir = "out";

  /// Relative paths in the file resolve against `base_dir`.
  static PipelineConfig parse(std::istream& in, const std::filesystem::path& base_dir = {},
                              const std::string& source = "<config>");
  static PipelineConfig load(const std::filesystem::path& path);
  /// Writes every key, so parse(write(c)) == c.
  void write(std::ostream& out) const;
  void validate() const;

  ClusterConfig cluster_config() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct DayTypeOutcome {
  ClusterModel model;
  std::map<int, double> cluster_means;
  std::map<int, int> cluster_categories;
};

struct PipelineResult {
  std::vector<std::string> sensor_ids;  // clustered sensors
  std::vector<std::string> excluded_ids;
  std::vector<std::string> dropped_ids;  // valid but lacking a day type
  std::array<DayTypeOutcome, 3> day_types;
  std::vector<PoIVerdict> verdicts;
  StaticFeatureTable static_normalized;
  StaticComparison comparison;
  std::vector<std::string> warnings;
};

/// ingest -> validity filter -> profiling -> per-day-type clustering (run
/// concurrently) -> activeness -> static comparison. Nothing is written.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Deterministic JSON report.
std::string report_json(const PipelineResult& result, const PipelineConfig& config);

/// Writes report.json, verdicts.csv, per-day-type profiles and the audit
/// matrices under `dir`. A `.incomplete` marker stays behind if writing
/// fails part way.
void write_bundle(const PipelineResult& result, const PipelineConfig& config,
                  const std::filesystem::path& dir);

/// Names accepted by read_audit_matrix: utilization, session_f1..session_f4,
/// affinity, degree, laplacian, embedding, eigenvalues.
const std::vector<std::string>& audit_matrix_names();
std::filesystem::path audit_matrix_path(const std::filesystem::path& bundle, DayType t,
                                        const std::string& name);

}  // namespace spaceprofiler
