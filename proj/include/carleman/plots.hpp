#pragma once

#include <string>
#include <vector>

namespace carleman {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false, log_y = false;
};

/// Standalone SVG line plot with the data table embedded in a comment.
void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series);

/// Emits every plot the artifact directory supports: the e(eps) log-log
/// sweep, density profiles, barrier cross-sections and contraction series.
/// Missing inputs are skipped with a warning line in the returned summary.
std::string emit_plots(const std::string& artifact_dir);

}  // namespace carleman
