#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sentilag::plots {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  double padding = 0.05;  ///< fraction of the data span added on each side
  int width = 800;
  int height = 450;
  /// Render x values as ISO dates (x = days since 1970-01-01).
  bool x_is_date = false;
};

struct AxisRange {
  double x_min = 0;
  double x_max = 1;
  double y_min = 0;
  double y_max = 1;
};

/// Data extrema widened by `padding` times the span (a zero span widens by
/// one unit instead).
AxisRange axis_range(const std::vector<Series>& series, double padding);

/// One polyline per series. The root element carries data-x-min, data-x-max,
/// data-y-min and data-y-max with the plotted axis range. Throws on empty or
/// ragged series.
std::string line_chart_svg(const std::vector<Series>& series, const ChartOptions& opts);

void write_line_chart(const std::filesystem::path& path, const std::vector<Series>& series,
                      const ChartOptions& opts);

/// Header `<x_label>,<name>...`; every series must share the same x values.
void write_series_csv(const std::filesystem::path& path, const std::vector<Series>& series,
                      const ChartOptions& opts);

}  // namespace sentilag::plots
