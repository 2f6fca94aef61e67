#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spaceprofiler/error.hpp"
#include "spaceprofiler/profiling.hpp"
#include "spaceprofiler/similarity.hpp"

namespace spaceprofiler {

/// A = (w1/4)(S_f1 + S_f2 + S_f3 + S_f4) + w2 * S_U, with w1 + w2 = 1.
struct AffinityMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
  double w1 = 0.5;
  double w2 = 0.5;

  std::size_t size() const noexcept { return ids.size(); }
};

/// Throws alignment error when the matrices disagree on ids or size, and
/// config error when the weights are negative or do not sum to 1.
AffinityMatrix affinity(const SimilarityMatrix& utilization,
                        std::span<const SimilarityMatrix> sessions, double w1, double w2);

/// Weighted degree, D_ii = sum_j A_ij, returned as the diagonal vector.
/// A node with zero degree raises isolated_node naming the sensor.
Eigen::VectorXd degree(const AffinityMatrix& a);

/// I - D^{-1/2} A D^{-1/2}.
Eigen::MatrixXd laplacian(const AffinityMatrix& a, const Eigen::VectorXd& degree);

struct Embedding {
  Eigen::VectorXd eigenvalues;  // ascending, size k_max
  Eigen::MatrixXd vectors;      // n x k_max, column i solves (D - A) u = lambda_i D u
};

/// Smallest `k_max` generalised eigenpairs, obtained from the symmetric
/// normalised Laplacian (L v = lambda v, u = D^{-1/2} v). Each column u is
/// sign-fixed so its largest-magnitude entry is positive.
Embedding embed(const Eigen::MatrixXd& laplacian, const Eigen::VectorXd& degree, int k_max);

/// First `k` columns of `vectors` with each row scaled to unit length.
Eigen::MatrixXd row_normalized(const Eigen::MatrixXd& vectors, int k);

struct KMeansResult {
  std::vector<int> assignments;
  Eigen::MatrixXd centroids;  // k x dims
  double inertia = 0.0;
};

inline constexpr int kKMeansMaxIterations = 300;
inline constexpr int kKMeansRestarts = 10;

/// Lloyd's algorithm with k-means++ seeding, `restarts` seeded runs keeping
/// the lowest inertia. Stops at an assignment fixed point or after
/// kKMeansMaxIterations. Empty clusters are re-seeded with the point farthest
/// from its centroid, so every cluster ends non-empty. Fully determined by
/// `seed`.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int restarts = kKMeansRestarts);

/// Mean over clusters of max_{j != i} (s_i + s_j) / d(c_i, c_j), where s is
/// the mean member distance to the centroid. nullopt if two centroids
/// coincide or a cluster is empty.
std::optional<double> davies_bouldin(const Eigen::MatrixXd& points,
                                     std::span<const int> assignments, int k);

struct KRange {
  int min = 2;
  int max = 10;

  friend bool operator==(const KRange&, const KRange&) = default;
};

/// [2, min(10, n - 1)].
KRange default_k_range(std::size_t n);

struct KSelection {
  int k = 0;
  std::map<int, double> db_scores;
  std::vector<int> skipped;
  KMeansResult clustering;  // k-means result for the chosen k
};

inline constexpr double kEigenvalueTieTolerance = 1e-8;
inline constexpr double kDaviesBouldinTieTolerance = 1e-9;

/// Runs k-means on the row-normalised first k columns for every candidate k
/// and picks the lowest Davies-Bouldin score; scores within
/// kDaviesBouldinTieTolerance of the best tie, and the smallest such k wins.
/// Degenerate candidates are skipped with a warning; if all are degenerate,
/// throws numeric error.
KSelection select_k(const Eigen::MatrixXd& vectors, KRange range, std::uint64_t seed,
                    WarningLog* log = nullptr);

/// As above, and additionally skips any k with lambda_k == lambda_{k+1}
/// (within kEigenvalueTieTolerance): the first k columns are then not unique.
KSelection select_k(const Embedding& embedding, KRange range, std::uint64_t seed,
                    WarningLog* log = nullptr);

/// Relabels clusters 0, 1, ... in order of first occurrence.
std::vector<int> canonical_labels(std::span<const int> assignments);

struct ClusterConfig {
  Kernel kernel = Kernel::wied(2);
  SessionSet sessions = default_sessions();
  double w1 = 0.5;
  double w2 = 0.5;
  std::optional<KRange> k_range;  // default_k_range(n) when unset
  std::uint64_t seed = 42;
};

struct SpectralResult {
  Eigen::VectorXd degree;
  Eigen::MatrixXd laplacian;
  Embedding embedding;
  KSelection selection;
  std::vector<int> assignments;  // canonical
};

/// Degree -> Laplacian -> embedding -> k selection -> k-means.
SpectralResult spectral_cluster(const AffinityMatrix& a, KRange range, std::uint64_t seed,
                                WarningLog* log = nullptr);

struct ClusterModel {
  DayType label = DayType::weekday;
  std::vector<std::string> ids;
  int k = 0;
  std::vector<int> assignments;
  Eigen::MatrixXd embedding;
  Eigen::VectorXd eigenvalues;
  std::map<int, double> db_scores;
  std::uint64_t seed = 0;

  // Intermediates kept for audit export.
  std::vector<std::vector<double>> profiles;  // gap-filled, row per sensor
  SimilarityMatrix utilization;
  std::array<SimilarityMatrix, kSessionCount> session_similarity;
  AffinityMatrix affinity;
  Eigen::VectorXd degree;
  Eigen::MatrixXd laplacian;
};

/// Clusters one generic day type end to end. Needs at least 3 sensors.
ClusterModel cluster_pipeline(const std::vector<DayTypeProfile>& profiles,
                              const ClusterConfig& config, WarningLog* log = nullptr);

}  // namespace spaceprofiler
