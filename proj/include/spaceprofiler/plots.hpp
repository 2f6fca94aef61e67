#pragma once

#include <filesystem>
#include <vector>

namespace spaceprofiler {

/// Renders SVGs from a report bundle into `<bundle>/plots`:
///   profiles_<day_type>.svg     member profiles and cluster means
///   eigenvectors_<day_type>.svg embedding heatmap, rows grouped by cluster
///   clusters_<day_type>.svg     one cell per activeness category
///   activeness.svg              per-PoI categories and verdicts
///   static_features.svg         active vs less-active feature means
/// Throws io error listing every missing or unusable artifact.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& bundle);

}  // namespace spaceprofiler
