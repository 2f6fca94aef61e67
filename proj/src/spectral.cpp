#include "spaceprofiler/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace spaceprofiler {

AffinityMatrix affinity(const SimilarityMatrix& utilization,
                        std::span<const SimilarityMatrix> sessions, double w1, double w2) {
  if (sessions.size() != kSessionCount) {
    throw Error(ErrorKind::alignment, "expected 4 session matrices, got " +
                                          std::to_string(sessions.size()));
  }
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-9) {
    throw Error(ErrorKind::config, "weights must be non-negative and sum to 1 (w1=" +
                                       std::to_string(w1) + ", w2=" + std::to_string(w2) + ")");
  }
  const auto n = static_cast<Eigen::Index>(utilization.size());
  if (utilization.values.rows() != n || utilization.values.cols() != n) {
    throw Error(ErrorKind::alignment, "utilisation matrix shape does not match its ids");
  }
  for (const SimilarityMatrix& s : sessions) {
    if (s.ids != utilization.ids || s.values.rows() != n || s.values.cols() != n) {
      throw Error(ErrorKind::alignment, "session matrix ids or shape differ from utilisation matrix");
    }
  }
  AffinityMatrix a;
  a.ids = utilization.ids;
  a.w1 = w1;
  a.w2 = w2;
  Eigen::MatrixXd session_sum = Eigen::MatrixXd::Zero(n, n);
  for (const SimilarityMatrix& s : sessions) session_sum += s.values;
  a.values = (w1 / 4.0) * session_sum + w2 * utilization.values;
  return a;
}

Eigen::VectorXd degree(const AffinityMatrix& a) {
  const Eigen::Index n = a.values.rows();
  if (a.values.cols() != n) throw Error(ErrorKind::dimension, "affinity matrix is not square");
  Eigen::VectorXd d = a.values.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(d(i) > 0.0)) {
      const std::string id =
          static_cast<std::size_t>(i) < a.ids.size() ? a.ids[i] : "#" + std::to_string(i);
      throw Error(ErrorKind::isolated_node, "sensor " + id + " has zero degree (isolated node)");
    }
  }
  return d;
}

Eigen::MatrixXd laplacian(const AffinityMatrix& a, const Eigen::VectorXd& degree) {
  const Eigen::Index n = a.values.rows();
  if (degree.size() != n) throw Error(ErrorKind::dimension, "degree size does not match affinity");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(degree(i) > 0.0)) {
      const std::string id =
          static_cast<std::size_t>(i) < a.ids.size() ? a.ids[i] : "#" + std::to_string(i);
      throw Error(ErrorKind::isolated_node, "sensor " + id + " has zero degree (isolated node)");
    }
  }
  const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
  Eigen::MatrixXd l = -(inv_sqrt.asDiagonal() * a.values * inv_sqrt.asDiagonal());
  l.diagonal().array() += 1.0;
  // Symmetrise away rounding so the symmetric solver sees an exact mirror.
  return 0.5 * (l + l.transpose());
}

Embedding embed(const Eigen::MatrixXd& laplacian, const Eigen::VectorXd& degree, int k_max) {
  const Eigen::Index n = laplacian.rows();
  if (laplacian.cols() != n || degree.size() != n) {
    throw Error(ErrorKind::dimension, "Laplacian and degree sizes differ");
  }
  if (k_max < 1 || k_max > n) {
    throw Error(ErrorKind::config, "k_max must lie in [1, n] (k_max=" + std::to_string(k_max) +
                                       ", n=" + std::to_string(n) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  auto condition_report = [&] {
    std::ostringstream os;
    os << "n=" << n << ", degree range [" << degree.minCoeff() << ", " << degree.maxCoeff()
       << "], degree ratio " << degree.maxCoeff() / degree.minCoeff();
    return os.str();
  };
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numeric, "eigensolver did not converge: " + condition_report());
  }

  Embedding e;
  e.eigenvalues = solver.eigenvalues().head(k_max);
  const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
  const Eigen::VectorXd sqrt_d = degree.array().sqrt();
  e.vectors = inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(k_max);
  for (Eigen::Index c = 0; c < e.vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    e.vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (e.vectors(arg, c) < 0.0) e.vectors.col(c) *= -1.0;
  }

  // (D - A) u = D^{1/2} L D^{1/2} u must equal lambda D u.
  for (Eigen::Index c = 0; c < e.vectors.cols(); ++c) {
    const Eigen::VectorXd u = e.vectors.col(c);
    const Eigen::VectorXd lhs = sqrt_d.asDiagonal() * (laplacian * (sqrt_d.asDiagonal() * u));
    const Eigen::VectorXd rhs = e.eigenvalues(c) * (degree.asDiagonal() * u);
    const double residual = (lhs - rhs).norm();
    if (!(residual <= 1e-8 * u.norm())) {
      throw Error(ErrorKind::numeric, "eigenpair " + std::to_string(c) + " residual " +
                                          std::to_string(residual) + " exceeds tolerance: " +
                                          condition_report());
    }
  }
  return e;
}

Eigen::MatrixXd row_normalized(const Eigen::MatrixXd& vectors, int k) {
  if (k < 1 || k > vectors.cols()) throw Error(ErrorKind::config, "k exceeds embedding width");
  Eigen::MatrixXd out = vectors.leftCols(k);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (norm > 0.0) out.row(r) /= norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// k-means

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Eigen::Index first = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
  centers.row(0) = x.row(first);
  chosen[static_cast<std::size_t>(first)] = true;
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (d2(i) > 0.0 && acc >= target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2(i) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every point coincides with a centre; take the next unused index.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

int nearest(const Eigen::MatrixXd& centers, const Eigen::RowVectorXd& p, double* dist2) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (centers.row(c) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(centers.rows());
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd dist2(n);

  for (int iter = 0; iter < kKMeansMaxIterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = nearest(centers, x.row(i), &dist2(i));
      if (c != assign[static_cast<std::size_t>(i)]) {
        assign[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    // Re-seed empty clusters with the point farthest from its centroid,
    // taken from a cluster that can spare it.
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assign) ++sizes[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = assign[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(owner)] > 1 && dist2(i) > far_d) {
          far_d = dist2(i);
          far = i;
        }
      }
      --sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
      assign[static_cast<std::size_t>(far)] = c;
      ++sizes[static_cast<std::size_t>(c)];
      dist2(far) = 0.0;
      centers.row(c) = x.row(far);
      changed = true;
    }
    if (!changed && iter > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    for (Eigen::Index i = 0; i < n; ++i) sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) = sums.row(c) / sizes[static_cast<std::size_t>(c)];
  }

  KMeansResult r;
  r.assignments = std::move(assign);
  r.centroids = std::move(centers);
  r.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r.inertia += (x.row(i) - r.centroids.row(r.assignments[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw Error(ErrorKind::config, "k must be at least 1");
  if (n < k) {
    throw Error(ErrorKind::config, "k-means needs n >= k (n=" + std::to_string(n) +
                                       ", k=" + std::to_string(k) + ")");
  }
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KMeansResult run = lloyd(points, plus_plus_seeds(points, k, rng));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

std::optional<double> davies_bouldin(const Eigen::MatrixXd& points,
                                     std::span<const int> assignments, int k) {
  if (static_cast<Eigen::Index>(assignments.size()) != points.rows()) {
    throw Error(ErrorKind::dimension, "assignment count does not match point count");
  }
  if (k < 2) return std::nullopt;
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, points.cols());
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const int c = assignments[i];
    if (c < 0 || c >= k) throw Error(ErrorKind::domain, "cluster index out of range");
    centroids.row(c) += points.row(static_cast<Eigen::Index>(i));
    ++sizes[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    if (sizes[static_cast<std::size_t>(c)] == 0) return std::nullopt;
    centroids.row(c) /= sizes[static_cast<std::size_t>(c)];
  }
  Eigen::VectorXd scatter = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const int c = assignments[i];
    scatter(c) += (points.row(static_cast<Eigen::Index>(i)) - centroids.row(c)).norm();
  }
  for (int c = 0; c < k; ++c) scatter(c) /= sizes[static_cast<std::size_t>(c)];

  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double sep = (centroids.row(i) - centroids.row(j)).norm();
      if (!(sep > 1e-12)) return std::nullopt;
      worst = std::max(worst, (scatter(i) + scatter(j)) / sep);
    }
    total += worst;
  }
  return total / k;
}

KRange default_k_range(std::size_t n) {
  return {2, static_cast<int>(std::min<std::size_t>(10, n > 0 ? n - 1 : 0))};
}

namespace {

KSelection select_k_impl(const Eigen::MatrixXd& vectors, const Eigen::VectorXd* eigenvalues,
                         KRange range, std::uint64_t seed, WarningLog* log) {
  const auto n = static_cast<int>(vectors.rows());
  if (range.min < 2 || range.max > n - 1 || range.min > range.max) {
    throw Error(ErrorKind::config, "k range [" + std::to_string(range.min) + ", " +
                                       std::to_string(range.max) + "] must lie within [2, " +
                                       std::to_string(n - 1) + "]");
  }
  if (range.max > vectors.cols()) {
    throw Error(ErrorKind::config, "embedding has fewer columns than the largest candidate k");
  }
  const int count = range.max - range.min + 1;
  // Cutting a repeated eigenvalue leaves the first k columns an arbitrary
  // basis choice, so such a k has no well-defined embedding.
  std::vector<char> split(static_cast<std::size_t>(count), 0);
  if (eigenvalues != nullptr) {
    for (int i = 0; i < count; ++i) {
      const int k = range.min + i;
      if (k < eigenvalues->size() &&
          std::abs((*eigenvalues)(k) - (*eigenvalues)(k - 1)) <= kEigenvalueTieTolerance) {
        split[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
  std::vector<std::optional<double>> scores(static_cast<std::size_t>(count));
  std::vector<KMeansResult> runs(static_cast<std::size_t>(count));

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    if (split[static_cast<std::size_t>(i)]) continue;
    const int k = range.min + i;
    const Eigen::MatrixXd points = row_normalized(vectors, k);
    runs[static_cast<std::size_t>(i)] = kmeans(points, k, seed);
    scores[static_cast<std::size_t>(i)] =
        davies_bouldin(points, runs[static_cast<std::size_t>(i)].assignments, k);
  }

  KSelection sel;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    const int k = range.min + i;
    if (split[static_cast<std::size_t>(i)]) {
      sel.skipped.push_back(k);
      warn(log, "k=" + std::to_string(k) + ": eigenvalues " + std::to_string(k) + " and " +
                    std::to_string(k + 1) + " coincide, embedding not unique; skipped");
      continue;
    }
    const auto& s = scores[static_cast<std::size_t>(i)];
    if (!s) {
      sel.skipped.push_back(k);
      warn(log, "k=" + std::to_string(k) + ": degenerate k-means result (coincident centroids); skipped");
      continue;
    }
    sel.db_scores[k] = *s;
    best = std::min(best, *s);
  }
  if (sel.db_scores.empty()) {
    throw Error(ErrorKind::numeric, "every candidate k produced a degenerate clustering");
  }
  // Scores within rounding noise of the minimum count as ties; smallest k wins.
  for (const auto& [k, s] : sel.db_scores) {
    if (s <= best + kDaviesBouldinTieTolerance) {
      sel.k = k;
      sel.clustering = runs[static_cast<std::size_t>(k - range.min)];
      break;
    }
  }
  return sel;
}

}  // namespace

KSelection select_k(const Eigen::MatrixXd& vectors, KRange range, std::uint64_t seed,
                    WarningLog* log) {
  return select_k_impl(vectors, nullptr, range, seed, log);
}

KSelection select_k(const Embedding& embedding, KRange range, std::uint64_t seed,
                    WarningLog* log) {
  return select_k_impl(embedding.vectors, &embedding.eigenvalues, range, seed, log);
}

std::vector<int> canonical_labels(std::span<const int> assignments) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(assignments.size());
  for (int a : assignments) {
    auto [it, inserted] = remap.emplace(a, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

SpectralResult spectral_cluster(const AffinityMatrix& a, KRange range, std::uint64_t seed,
                                WarningLog* log) {
  SpectralResult r;
  r.degree = degree(a);
  r.laplacian = laplacian(a, r.degree);
  // One extra eigenpair tells whether the largest candidate splits a tie.
  const int width = std::min<int>(range.max + 1, static_cast<int>(a.size()));
  r.embedding = embed(r.laplacian, r.degree, width);
  r.selection = select_k(r.embedding, range, seed, log);
  r.assignments = canonical_labels(r.selection.clustering.assignments);
  return r;
}

ClusterModel cluster_pipeline(const std::vector<DayTypeProfile>& profiles,
                              const ClusterConfig& config, WarningLog* log) {
  if (profiles.size() < 3) {
    throw Error(ErrorKind::insufficient_data, "clustering needs at least 3 sensors, got " +
                                                  std::to_string(profiles.size()));
  }
  validate_sessions(config.sessions);
  ClusterModel m;
  m.label = profiles.front().label;
  m.seed = config.seed;
  for (const DayTypeProfile& p : profiles) {
    if (p.label != m.label) throw Error(ErrorKind::alignment, "profiles mix day types");
    m.ids.push_back(p.sensor_id);
    m.profiles.push_back(fill_gaps(p));
  }

  m.utilization = similarity_matrix(m.ids, m.profiles, config.kernel);
  for (std::size_t s = 0; s < kSessionCount; ++s) {
    m.session_similarity[s] =
        similarity_matrix(m.ids, m.profiles, config.kernel, config.sessions[s]);
  }
  m.affinity = affinity(m.utilization, m.session_similarity, config.w1, config.w2);

  const KRange range = config.k_range.value_or(default_k_range(profiles.size()));
  SpectralResult r = spectral_cluster(m.affinity, range, config.seed, log);
  m.degree = std::move(r.degree);
  m.laplacian = std::move(r.laplacian);
  m.embedding = std::move(r.embedding.vectors);
  m.eigenvalues = std::move(r.embedding.eigenvalues);
  m.db_scores = std::move(r.selection.db_scores);
  m.k = r.selection.k;
  m.assignments = std::move(r.assignments);
  return m;
}

}  // namespace spaceprofiler
