#ifndef MLMMSB_CHART_HPP
#define MLMMSB_CHART_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace mlmmsb {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Static SVG line chart: one polyline and one marker per point for each
/// series, plus axes and a legend. Throws ConfigError on empty input.
std::string render_svg(const std::vector<Series>& series, const ChartOptions& options = {});
void render_line_chart(const std::vector<Series>& series, const std::filesystem::path& path,
                       const ChartOptions& options = {});

}  // namespace mlmmsb

#endif  // MLMMSB_CHART_HPP
