#include "spaceprofiler/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "spaceprofiler/config_text.hpp"
#include "spaceprofiler/error.hpp"

namespace spaceprofiler {

SessionSet default_sessions() {
  return {SessionSpec{"morning", 6 * 60, 10 * 60 + 59},
          SessionSpec{"afternoon", 11 * 60, 13 * 60 + 59},
          SessionSpec{"evening", 14 * 60, 17 * 60 + 59},
          SessionSpec{"night", 18 * 60, 23 * 60 + 59}};
}

void validate_sessions(std::span<const SessionSpec> sessions) {
  for (const SessionSpec& s : sessions) {
    if (s.start_minute < 0 || s.end_minute >= 24 * 60 || s.end_minute < s.start_minute) {
      throw Error(ErrorKind::config, "session '" + s.name + "' must satisfy 00:00 <= start <= end <= 23:59");
    }
    if (s.end_minute / kMinutesPerBin < (s.start_minute + kMinutesPerBin - 1) / kMinutesPerBin) {
      throw Error(ErrorKind::config, "session '" + s.name + "' contains no 5-minute bin");
    }
  }
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    for (std::size_t j = i + 1; j < sessions.size(); ++j) {
      const auto& a = sessions[i];
      const auto& b = sessions[j];
      if (a.start_minute <= b.end_minute && b.start_minute <= a.end_minute) {
        throw Error(ErrorKind::config, "sessions '" + a.name + "' and '" + b.name + "' overlap");
      }
    }
  }
}

std::span<const double> session_slice(std::span<const double> profile,
                                      const SessionSpec& session) {
  const std::size_t first =
      static_cast<std::size_t>((session.start_minute + kMinutesPerBin - 1) / kMinutesPerBin);
  const std::size_t last = static_cast<std::size_t>(session.end_minute / kMinutesPerBin);
  if (profile.empty() || last < first || first >= profile.size()) return {};
  return profile.subspan(first, std::min(last, profile.size() - 1) - first + 1);
}

std::string Kernel::name() const {
  switch (kind) {
    case Kind::wied: return "wied(W=" + std::to_string(window_bins) + ")";
    case Kind::euclidean: return "euclidean";
    case Kind::manhattan: return "manhattan";
    case Kind::minkowski: return "minkowski(p=" + format_config_number(p) + ")";
  }
  return "unknown";
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::dimension, "segment lengths differ: " + std::to_string(a.size()) +
                                          " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw Error(ErrorKind::dimension, "empty segment");
}

double directed_window_distance(std::span<const double> a, std::span<const double> b,
                                std::ptrdiff_t w) {
  const auto t = static_cast<std::ptrdiff_t>(a.size());
  double total = 0.0;
  for (std::ptrdiff_t j = 0; j < t; ++j) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j - w);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(t - 1, j + w);
    double best = std::abs(a[j] - b[j]);
    for (std::ptrdiff_t k = lo; k <= hi; ++k) best = std::min(best, std::abs(a[j] - b[k]));
    total += best;
  }
  return total / static_cast<double>(t);
}

}  // namespace

double wied_distance(std::span<const double> a, std::span<const double> b, int window_bins) {
  check_lengths(a, b);
  if (window_bins < 0 || static_cast<std::size_t>(window_bins) >= a.size()) {
    throw Error(ErrorKind::domain, "window of " + std::to_string(window_bins) +
                                       " bins needs 0 <= W < segment length " +
                                       std::to_string(a.size()));
  }
  if (window_bins == 0) return directed_window_distance(a, b, 0);
  return 0.5 * (directed_window_distance(a, b, window_bins) +
                directed_window_distance(b, a, window_bins));
}

double kernel_distance(std::span<const double> a, std::span<const double> b,
                       const Kernel& kernel) {
  if (kernel.kind == Kernel::Kind::wied) return wied_distance(a, b, kernel.window_bins);
  check_lengths(a, b);
  const double t = static_cast<double>(a.size());
  double acc = 0.0;
  switch (kernel.kind) {
    case Kernel::Kind::euclidean:
      for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
      return std::sqrt(acc / t);
    case Kernel::Kind::manhattan:
      for (std::size_t j = 0; j < a.size(); ++j) acc += std::abs(a[j] - b[j]);
      return acc / t;
    case Kernel::Kind::minkowski:
      if (!(kernel.p >= 1.0)) throw Error(ErrorKind::config, "minkowski p must be >= 1");
      for (std::size_t j = 0; j < a.size(); ++j) acc += std::pow(std::abs(a[j] - b[j]), kernel.p);
      return std::pow(acc / t, 1.0 / kernel.p);
    case Kernel::Kind::wied:
      break;
  }
  return 0.0;
}

double to_similarity(double dist) {
  if (!(dist >= 0.0)) throw Error(ErrorKind::domain, "distance must be non-negative");
  return 1.0 / (1.0 + dist);
}

namespace {

std::vector<std::span<const double>> segments(const std::vector<std::string>& ids,
                                              const std::vector<std::vector<double>>& profiles,
                                              const Kernel& kernel,
                                              const std::optional<SessionSpec>& session) {
  if (ids.size() != profiles.size()) {
    throw Error(ErrorKind::dimension, "id count does not match profile count");
  }
  if (profiles.size() < 2) throw Error(ErrorKind::dimension, "need at least 2 profiles");
  std::vector<std::span<const double>> segs;
  segs.reserve(profiles.size());
  for (const auto& p : profiles) {
    if (p.size() != profiles.front().size()) {
      throw Error(ErrorKind::dimension, "profiles differ in length");
    }
    segs.push_back(session ? session_slice(p, *session) : std::span<const double>(p));
  }
  if (segs.front().empty()) throw Error(ErrorKind::dimension, "empty segment");
  if (kernel.kind == Kernel::Kind::wied &&
      (kernel.window_bins < 0 || static_cast<std::size_t>(kernel.window_bins) >= segs.front().size())) {
    throw Error(ErrorKind::domain, "WIED window must be smaller than the segment length");
  }
  return segs;
}

}  // namespace

SimilarityMatrix similarity_matrix(const std::vector<std::string>& ids,
                                   const std::vector<std::vector<double>>& profiles,
                                   const Kernel& kernel,
                                   const std::optional<SessionSpec>& session) {
  const auto segs = segments(ids, profiles, kernel, session);
  const auto n = static_cast<std::ptrdiff_t>(segs.size());
  SimilarityMatrix m{ids, Eigen::MatrixXd::Zero(n, n)};
  // Each (a, b) cell is written by exactly one iteration.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    for (std::ptrdiff_t b = a + 1; b < n; ++b) {
      const double s = to_similarity(kernel_distance(segs[a], segs[b], kernel));
      m.values(a, b) = s;
      m.values(b, a) = s;
    }
  }
  return m;
}

namespace serial {

SimilarityMatrix similarity_matrix(const std::vector<std::string>& ids,
                                   const std::vector<std::vector<double>>& profiles,
                                   const Kernel& kernel,
                                   const std::optional<SessionSpec>& session) {
  const auto segs = segments(ids, profiles, kernel, session);
  const auto n = static_cast<Eigen::Index>(segs.size());
  SimilarityMatrix m{ids, Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      m.values(a, b) = to_similarity(kernel_distance(segs[a], segs[b], kernel));
    }
  }
  return m;
}

}  // namespace serial

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& values) {
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out << (static_cast<std::size_t>(r) < ids.size() ? ids[r] : std::to_string(r));
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << ',' << format_config_number(values(r, c));
    out << '\n';
  }
}

LabelledMatrix read_matrix_csv(std::istream& in) {
  auto split = [](std::string_view line) {
    std::vector<std::string_view> f;
    while (true) {
      const auto c = line.find(',');
      f.push_back(line.substr(0, c));
      if (c == std::string_view::npos) break;
      line.remove_prefix(c + 1);
    }
    return f;
  };
  LabelledMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing matrix header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  for (std::size_t i = 1; i < header.size(); ++i) m.ids.emplace_back(header[i]);
  const auto cols = static_cast<Eigen::Index>(m.ids.size());
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (static_cast<Eigen::Index>(f.size()) != cols + 1) throw ParseError(line_no, "wrong field count");
    std::vector<double> row;
    for (std::size_t i = 1; i < f.size(); ++i) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f[i].data(), f[i].data() + f[i].size(), v);
      if (ec != std::errc{} || ptr != f[i].data() + f[i].size()) throw ParseError(line_no, "bad number");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  m.values.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m.values(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return m;
}

}  // namespace spaceprofiler
