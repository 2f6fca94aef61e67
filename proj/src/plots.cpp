#include "spaceprofiler/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spaceprofiler/error.hpp"
#include "spaceprofiler/profiling.hpp"
#include "spaceprofiler/similarity.hpp"

namespace spaceprofiler {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf"};
// Category 1 (most active) .. 5.
constexpr std::array<const char*, 5> kCategoryFill{"#1a9641", "#a6d96a", "#ffffbf", "#fdae61",
                                                   "#d7191c"};

std::string fmt(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke = "none") {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
          << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
          << "\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double width = 1.0) {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
          << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(width) << "\"/>\n";
  }
  void text(double x, double y, std::string_view s, double size = 11,
            std::string_view anchor = "start", std::string_view fill = "#222") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << fmt(size, 1)
          << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill
          << "\" font-family=\"sans-serif\">" << escape(s) << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                double width, double opacity = 1.0) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width)
          << "\" stroke-opacity=\"" << fmt(opacity) << "\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt(x) << ',' << fmt(y) << ' ';
    body_ << "\"/>\n";
  }

  std::string str() const {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w_, 0) << "\" height=\""
      << fmt(h_, 0) << "\" viewBox=\"0 0 " << fmt(w_, 0) << ' ' << fmt(h_, 0) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
    return o.str();
  }

 private:
  double w_, h_;
  std::ostringstream body_;
};

struct Panel {
  double x, y, w, h;
  double px(double bin) const { return x + w * bin / (kBinsPerDay - 1); }
  double py(double v) const { return y + h * (1.0 - std::clamp(v, 0.0, 1.0)); }

  void frame(Svg& svg, double ymax) const {
    svg.rect(x, y, w, h, "none", "#999");
    for (int hour = 0; hour <= 24; hour += 6) {
      const double gx = x + w * hour / 24.0;
      svg.line(gx, y + h, gx, y + h + 3, "#999");
      svg.text(gx, y + h + 14, (hour < 10 ? "0" : "") + std::to_string(hour) + ":00", 9, "middle");
    }
    svg.text(x - 4, y + 4, fmt(ymax), 9, "end");
    svg.text(x - 4, y + h, "0", 9, "end");
  }

  std::vector<std::pair<double, double>> curve(const std::vector<double>& bins, double ymax) const {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t b = 0; b < bins.size(); ++b) pts.emplace_back(px(static_cast<double>(b)), py(bins[b] / ymax));
    return pts;
  }
};

struct DayTypeData {
  DayType type;
  json report;  // entry of report["day_types"]
  std::map<std::string, std::vector<double>> profiles;
  LabelledMatrix embedding;
  std::vector<std::string> embedding_ids;
  std::map<std::string, int> cluster_of;
};

void save(const fs::path& path, const Svg& svg, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << svg.str();
  out.close();
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
  written.push_back(path);
}

std::vector<double> mean_curve(const std::vector<const std::vector<double>*>& members) {
  std::vector<double> m(kBinsPerDay, 0.0);
  for (const auto* p : members) {
    for (std::size_t b = 0; b < m.size() && b < p->size(); ++b) m[b] += (*p)[b];
  }
  for (double& v : m) v /= static_cast<double>(std::max<std::size_t>(1, members.size()));
  return m;
}

void plot_profiles(const DayTypeData& d, const fs::path& out, std::vector<fs::path>& written) {
  Svg svg(820, 420);
  Panel p{60, 40, 720, 320};
  double ymax = 0.05;
  for (const auto& [id, bins] : d.profiles) ymax = std::max(ymax, *std::max_element(bins.begin(), bins.end()));
  ymax = std::ceil(ymax * 10.0) / 10.0;
  svg.text(410, 22, "Average daily profiles: " + std::string(to_string(d.type)), 14, "middle");
  p.frame(svg, ymax);
  for (const auto& c : d.report["clusters"]) {
    const int cluster = c["cluster"].get<int>();
    const char* colour = kPalette[static_cast<std::size_t>(cluster) % kPalette.size()];
    std::vector<const std::vector<double>*> members;
    for (const auto& id : c["members"]) {
      auto it = d.profiles.find(id.get<std::string>());
      if (it == d.profiles.end()) continue;
      members.push_back(&it->second);
      svg.polyline(p.curve(it->second, ymax), colour, 0.6, 0.25);
    }
    svg.polyline(p.curve(mean_curve(members), ymax), colour, 2.2);
  }
  double lx = 60;
  for (const auto& c : d.report["clusters"]) {
    const int cluster = c["cluster"].get<int>();
    const char* colour = kPalette[static_cast<std::size_t>(cluster) % kPalette.size()];
    svg.rect(lx, 392, 12, 12, colour);
    svg.text(lx + 16, 402,
             "cluster " + std::to_string(cluster) + " (n=" + std::to_string(c["size"].get<int>()) +
                 ", mean " + fmt(c["mean"].get<double>(), 4) + ")",
             10);
    lx += 150;
  }
  save(out / ("profiles_" + std::string(slug(d.type)) + ".svg"), svg, written);
}

std::string diverging(double v, double vmax) {
  const double t = vmax > 0.0 ? std::clamp(v / vmax, -1.0, 1.0) : 0.0;
  int r = 255, g = 255, b = 255;
  if (t > 0) {
    g = b = static_cast<int>(std::lround(255 * (1.0 - t)));
  } else {
    r = g = static_cast<int>(std::lround(255 * (1.0 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

void plot_eigenvectors(const DayTypeData& d, const fs::path& out, std::vector<fs::path>& written) {
  const auto& e = d.embedding;
  const auto n = e.values.rows();
  const auto k = e.values.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return d.cluster_of.at(d.embedding_ids[static_cast<std::size_t>(a)]) <
           d.cluster_of.at(d.embedding_ids[static_cast<std::size_t>(b)]);
  });
  const double cell_w = 40, cell_h = std::max(6.0, std::min(16.0, 600.0 / std::max<double>(1, n)));
  const double left = 90, top = 50;
  Svg svg(left + cell_w * k + 120, top + cell_h * n + 40);
  svg.text(left, 24, "Eigenvectors: " + std::string(to_string(d.type)) + " (rows grouped by cluster)", 14);
  const double vmax = e.values.cwiseAbs().maxCoeff();
  for (Eigen::Index c = 0; c < k; ++c) {
    svg.text(left + cell_w * (c + 0.5), top - 6, e.ids[static_cast<std::size_t>(c)], 10, "middle");
  }
  int previous = -1;
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index row = order[static_cast<std::size_t>(r)];
    const std::string& id = d.embedding_ids[static_cast<std::size_t>(row)];
    const int cluster = d.cluster_of.at(id);
    const double y = top + cell_h * r;
    if (cluster != previous && r > 0) svg.line(left - 4, y, left + cell_w * k, y, "#000", 1.5);
    previous = cluster;
    if (cell_h >= 9) svg.text(left - 6, y + cell_h - 2, id, cell_h - 2, "end");
    for (Eigen::Index c = 0; c < k; ++c) {
      svg.rect(left + cell_w * c, y, cell_w, cell_h, diverging(e.values(row, c), vmax));
    }
    svg.rect(left + cell_w * k + 6, y, 8, cell_h,
             kPalette[static_cast<std::size_t>(cluster) % kPalette.size()]);
  }
  save(out / ("eigenvectors_" + std::string(slug(d.type)) + ".svg"), svg, written);
}

void plot_categories(const DayTypeData& d, const fs::path& out, std::vector<fs::path>& written) {
  const double cell = 200, gap = 20, left = 40, top = 60;
  Svg svg(left + 5 * (cell + gap), top + cell + 80);
  svg.text(left, 26, "Clusters by activeness category: " + std::string(to_string(d.type)), 14);
  std::map<int, std::vector<json>> by_category;
  for (const auto& c : d.report["clusters"]) by_category[c["category"].get<int>()].push_back(c);
  double ymax = 0.05;
  for (const auto& [id, bins] : d.profiles) ymax = std::max(ymax, *std::max_element(bins.begin(), bins.end()));
  ymax = std::ceil(ymax * 10.0) / 10.0;
  for (int cat = 1; cat <= 5; ++cat) {
    const double x = left + (cat - 1) * (cell + gap);
    svg.text(x + cell / 2, top - 10, "Category " + std::to_string(cat), 12, "middle");
    auto it = by_category.find(cat);
    if (it == by_category.end()) {
      svg.rect(x, top, cell, cell, "#f4f4f4", "#ccc");
      continue;
    }
    Panel p{x, top, cell, cell};
    p.frame(svg, ymax);
    double ly = top + cell + 32;
    for (const json& c : it->second) {
      const int cluster = c["cluster"].get<int>();
      const char* colour = kPalette[static_cast<std::size_t>(cluster) % kPalette.size()];
      std::vector<const std::vector<double>*> members;
      for (const auto& id : c["members"]) {
        auto pit = d.profiles.find(id.get<std::string>());
        if (pit == d.profiles.end()) continue;
        members.push_back(&pit->second);
        svg.polyline(p.curve(pit->second, ymax), colour, 0.5, 0.3);
      }
      svg.polyline(p.curve(mean_curve(members), ymax), colour, 2.0);
      svg.text(x, ly, "cluster " + std::to_string(cluster) + ": mean " + fmt(c["mean"].get<double>(), 4) +
                          ", n=" + std::to_string(c["size"].get<int>()),
               10, "start", colour);
      ly += 14;
    }
  }
  save(out / ("clusters_" + std::string(slug(d.type)) + ".svg"), svg, written);
}

void plot_activeness(const json& report, const fs::path& out, std::vector<fs::path>& written) {
  std::vector<json> rows(report["verdicts"].begin(), report["verdicts"].end());
  std::stable_sort(rows.begin(), rows.end(), [](const json& a, const json& b) {
    if (a["poi_type"] != b["poi_type"]) return a["poi_type"].get<std::string>() < b["poi_type"].get<std::string>();
    return a["verdict"].get<std::string>() < b["verdict"].get<std::string>();
  });
  const double cell = 24, left = 220, top = 70;
  Svg svg(left + 3 * cell + 140, top + cell * static_cast<double>(rows.size()) + 60);
  svg.text(20, 24, "PoI activeness per day type", 14);
  const std::array<const char*, 3> heads{"WD", "WE", "SH"};
  const std::array<const char*, 3> keys{"Weekday", "Weekend", "SchoolHoliday"};
  for (std::size_t t = 0; t < 3; ++t) svg.text(left + cell * (t + 0.5), top - 8, heads[t], 11, "middle");
  std::string previous;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& v = rows[r];
    const double y = top + cell * static_cast<double>(r);
    const std::string type = v["poi_type"].get<std::string>();
    if (type != previous) {
      if (r > 0) svg.line(20, y, left + 3 * cell + 120, y, "#555", 1.2);
      svg.text(20, y + 16, type, 11, "start", "#555");
      previous = type;
    }
    svg.text(left - 8, y + 16, v["sensor_id"].get<std::string>(), 11, "end");
    for (std::size_t t = 0; t < 3; ++t) {
      const int cat = v["categories"][keys[t]].get<int>();
      svg.rect(left + cell * t, y, cell, cell, kCategoryFill[static_cast<std::size_t>(cat - 1)], "#fff");
      svg.text(left + cell * (t + 0.5), y + 16, std::to_string(cat), 11, "middle");
    }
    const bool active = v["verdict"].get<std::string>() == "active";
    svg.text(left + 3 * cell + 10, y + 16, active ? "active" : "less active", 11, "start",
             active ? "#1a9641" : "#888");
  }
  const double ly = top + cell * static_cast<double>(rows.size()) + 20;
  for (int cat = 1; cat <= 5; ++cat) {
    svg.rect(20 + (cat - 1) * 80, ly, 14, 14, kCategoryFill[static_cast<std::size_t>(cat - 1)], "#999");
    svg.text(38 + (cat - 1) * 80, ly + 12, "Cat " + std::to_string(cat), 10);
  }
  save(out / "activeness.svg", svg, written);
}

void plot_static(const json& report, const fs::path& out, std::vector<fs::path>& written) {
  const json& types = report["static_comparison"]["types"];
  const double panel_h = 220, left = 60, top = 50, bar = 12, group = 40;
  const std::size_t n_types = std::max<std::size_t>(1, types.size());
  const double width = left + 12 * group + 200;
  Svg svg(width, top + panel_h * static_cast<double>(n_types) + 40);
  svg.text(left, 24, "Static features: active vs less-active means (significant in red)", 14);
  if (types.empty()) {
    svg.text(left, top + 20, "no PoI type has both active and less-active sensors", 12);
  }
  for (std::size_t i = 0; i < types.size(); ++i) {
    const json& t = types[i];
    const double y0 = top + panel_h * static_cast<double>(i);
    const double h = panel_h - 80;
    svg.text(left, y0 + 12,
             t["poi_type"].get<std::string>() + " (active " + std::to_string(t["active_count"].get<int>()) +
                 ", less active " + std::to_string(t["less_active_count"].get<int>()) + ")",
             12);
    svg.line(left, y0 + 20 + h, left + 12 * group, y0 + 20 + h, "#999");
    svg.text(left - 4, y0 + 24, "1.0", 9, "end");
    svg.text(left - 4, y0 + 20 + h, "0", 9, "end");
    std::size_t f = 0;
    for (const auto& feat : t["features"]) {
      const double x = left + group * static_cast<double>(f) + 6;
      const double a = feat["active_mean"].get<double>();
      const double l = feat["less_active_mean"].get<double>();
      const bool sig = feat["significant"].get<bool>();
      svg.rect(x, y0 + 20 + h * (1 - a), bar, h * a, sig ? "#d62728" : "#4c72b0");
      svg.rect(x + bar, y0 + 20 + h * (1 - l), bar, h * l, "#bbbbbb");
      const std::string name = feat["feature"].get<std::string>();
      svg.text(x + bar, y0 + 34 + h, name, 8, "middle", sig ? "#d62728" : "#333");
      ++f;
    }
    svg.rect(left + 12 * group + 20, y0 + 30, 12, 12, "#4c72b0");
    svg.text(left + 12 * group + 36, y0 + 40, "active", 10);
    svg.rect(left + 12 * group + 20, y0 + 48, 12, 12, "#d62728");
    svg.text(left + 12 * group + 36, y0 + 58, "active (significant)", 10);
    svg.rect(left + 12 * group + 20, y0 + 66, 12, 12, "#bbbbbb");
    svg.text(left + 12 * group + 36, y0 + 76, "less active", 10);
  }
  save(out / "static_features.svg", svg, written);
}

}  // namespace

std::vector<fs::path> emit_plots(const fs::path& bundle) {
  std::vector<std::string> missing;
  json report;
  const fs::path report_path = bundle / "report.json";
  {
    std::ifstream in(report_path);
    if (!in) {
      missing.push_back(report_path.string());
    } else {
      try {
        report = json::parse(in);
      } catch (const json::exception& e) {
        missing.push_back(report_path.string() + " (unreadable: " + e.what() + ")");
      }
    }
  }

  std::vector<DayTypeData> days;
  if (missing.empty()) {
    for (DayType t : kDayTypes) {
      DayTypeData d;
      d.type = t;
      const json* entry = nullptr;
      if (report.contains("day_types")) {
        for (const auto& e : report["day_types"]) {
          if (e.value("day_type", "") == to_string(t)) entry = &e;
        }
      }
      if (entry == nullptr || !entry->contains("clusters") || (*entry)["clusters"].empty()) {
        missing.push_back("report.json: clusters for " + std::string(to_string(t)));
        continue;
      }
      d.report = *entry;
      for (const auto& c : d.report["clusters"]) {
        for (const auto& id : c["members"]) d.cluster_of[id.get<std::string>()] = c["cluster"].get<int>();
      }
      const fs::path prof = bundle / ("profiles_" + std::string(slug(t)) + ".csv");
      std::ifstream pin(prof);
      if (!pin) {
        missing.push_back(prof.string());
      } else {
        try {
          for (auto& p : read_profiles_csv(pin)) d.profiles[p.sensor_id] = std::move(p.bins);
        } catch (const Error& e) {
          missing.push_back(prof.string() + " (unreadable: " + e.what() + ")");
        }
      }
      const fs::path emb = bundle / "audit" / (std::string(slug(t)) + "_embedding.csv");
      std::ifstream ein(emb);
      if (!ein) {
        missing.push_back(emb.string());
      } else {
        try {
          d.embedding = read_matrix_csv(ein);
          ein.clear();
          ein.seekg(0);
          std::string line;
          std::getline(ein, line);
          while (std::getline(ein, line)) {
            if (!line.empty()) d.embedding_ids.push_back(line.substr(0, line.find(',')));
          }
          for (const auto& id : d.embedding_ids) {
            if (d.cluster_of.count(id) == 0) throw Error(ErrorKind::alignment, "sensor " + id + " not in any cluster");
          }
        } catch (const Error& e) {
          missing.push_back(emb.string() + " (unreadable: " + e.what() + ")");
        }
      }
      days.push_back(std::move(d));
    }
    if (!report.contains("verdicts")) missing.push_back("report.json: verdicts");
    if (!report.contains("static_comparison")) missing.push_back("report.json: static_comparison");
  }

  if (!missing.empty()) {
    std::string msg = "incomplete report bundle " + bundle.string() + "; missing:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw Error(ErrorKind::io, msg);
  }

  const fs::path out = bundle / "plots";
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + out.string() + ": " + ec.message());
  std::vector<fs::path> written;
  for (const DayTypeData& d : days) {
    plot_profiles(d, out, written);
    plot_eigenvectors(d, out, written);
    plot_categories(d, out, written);
  }
  plot_activeness(report, out, written);
  plot_static(report, out, written);
  return written;
}

}  // namespace spaceprofiler
