#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aqite/diagnostics.hpp"

namespace aqite {

/// One curve family: the records of a single run.
struct PlotSeries {
  std::string label;
  std::vector<TrajectoryRecord> records;
};

/// SVG text for a figure. Figures 1, 2, 3 and 5 are four panels (i_inf,
/// i_tau and gap on log axes, norm on a linear axis) with one curve per
/// series. Figure 4 is a single i_inf overlay with dotted vertical lines at
/// `markers`. Throws SchemaError when there is nothing to draw.
std::string render_figure(int figure, std::span<const PlotSeries> series,
                          std::span<const double> markers = {});

/// Loads series from a records CSV, a run directory or a sweep index.json
/// and writes `out_dir`/figure<N>.svg. For figure 4 the transition markers
/// are the interior schedule breakpoints found in the inputs' specs.
/// Returns the written path.
std::filesystem::path emit_plot(const std::filesystem::path& input,
                                int figure,
                                const std::filesystem::path& out_dir);

}  // namespace aqite
