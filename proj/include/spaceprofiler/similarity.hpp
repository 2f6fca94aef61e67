#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spaceprofiler/date.hpp"
#include "spaceprofiler/error.hpp"

namespace spaceprofiler {

/// A daytime session [start, end] in minutes after midnight, end inclusive.
struct SessionSpec {
  std::string name;
  int start_minute = 0;
  int end_minute = 0;

  friend bool operator==(const SessionSpec&, const SessionSpec&) = default;
};

inline constexpr std::size_t kSessionCount = 4;
using SessionSet = std::array<SessionSpec, kSessionCount>;

/// morning 06:00-10:59, afternoon 11:00-13:59, evening 14:00-17:59,
/// night 18:00-23:59.
SessionSet default_sessions();

/// Throws config error if a session lies outside the day, is inverted, or
/// overlaps another.
void validate_sessions(std::span<const SessionSpec> sessions);

/// Bins whose start time falls inside the session.
std::span<const double> session_slice(std::span<const double> profile,
                                      const SessionSpec& session);

struct Kernel {
  enum class Kind { wied, euclidean, manhattan, minkowski };

  Kind kind = Kind::wied;
  int window_bins = 2;  // wied only
  double p = 3.0;       // minkowski only

  static Kernel wied(int window_bins) { return {Kind::wied, window_bins, 3.0}; }
  static Kernel euclidean() { return {Kind::euclidean, 0, 2.0}; }
  static Kernel manhattan() { return {Kind::manhattan, 0, 1.0}; }
  static Kernel minkowski(double p = 3.0) { return {Kind::minkowski, 0, p}; }

  std::string name() const;
};

/// Windowed distance: each bin of one segment is matched to the closest value
/// of the other segment within +/- `window_bins` (clamped at the ends), the
/// per-bin gaps are averaged, and the two directions are averaged so the
/// result is symmetric. `window_bins == 0` is the mean absolute difference.
double wied_distance(std::span<const double> a, std::span<const double> b, int window_bins);

/// Length-normalised distances. euclidean: sqrt(mean d^2); manhattan:
/// mean |d|; minkowski: (mean |d|^p)^(1/p); wied: wied_distance.
double kernel_distance(std::span<const double> a, std::span<const double> b,
                       const Kernel& kernel);

/// 1 / (1 + dist).
double to_similarity(double dist);

/// Pairwise similarity with zero diagonal. `values(a, b)` for a != b is
/// to_similarity(kernel_distance(a, b)).
struct SimilarityMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return ids.size(); }
};

/// Builds the matrix over the full profiles, or over one session's bins when
/// `session` is given. Pairs are computed in parallel.
SimilarityMatrix similarity_matrix(const std::vector<std::string>& ids,
                                   const std::vector<std::vector<double>>& profiles,
                                   const Kernel& kernel,
                                   const std::optional<SessionSpec>& session = std::nullopt);

namespace serial {
SimilarityMatrix similarity_matrix(const std::vector<std::string>& ids,
                                   const std::vector<std::vector<double>>& profiles,
                                   const Kernel& kernel,
                                   const std::optional<SessionSpec>& session = std::nullopt);
}  // namespace serial

/// Square CSV: header `id,<id_1>,...,<id_n>`, then one row per id.
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& values);

struct LabelledMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};
LabelledMatrix read_matrix_csv(std::istream& in);

}  // namespace spaceprofiler
