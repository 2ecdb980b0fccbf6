#pragma once

#include "fdpo/experiments.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fdpo {

enum class Metric { suboptimality, mean_return };

/// Mean and normal-approximation interval of one (algorithm, sweep value) cell.
struct SummaryCell {
  std::string algorithm;
  double sweep_value = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double half_width = 0.0;
};

/// Half-width is z * sd / sqrt(n) with the population standard deviation.
/// z is 1.96 at confidence 0.95 and the standard normal quantile otherwise.
/// Cells keep first-appearance order of algorithms and ascending sweep
/// values. Throws std::invalid_argument if a cell has fewer than 2 rows.
std::vector<SummaryCell> summarize(const std::vector<ResultRow>& rows, double confidence = 0.95,
                                   Metric metric = Metric::suboptimality);

struct PlotOptions {
  std::string title;
  std::string x_label = "sweep value";
  std::string y_label = "suboptimality";
  bool log_x = false;
};

/// Self-contained SVG line chart, one polyline and one CI band polygon per
/// algorithm. Output depends only on the inputs.
std::string render_plot_svg(const std::vector<SummaryCell>& summary, const PlotOptions& options);

/// Writes render_plot_svg to `path`. Throws before touching the file if the
/// summary is empty.
void emit_plot(const std::vector<SummaryCell>& summary, const std::filesystem::path& path,
               const PlotOptions& options = {});

}  // namespace fdpo
