#include "mlmmsb/chart.hpp"

#include "mlmmsb/common.hpp"
#include "mlmmsb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mlmmsb {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double transform(double v) const { return log ? std::log10(v) : v; }
  double fraction(double v) const { return (transform(v) - lo) / (hi - lo); }
};

Axis make_axis(const std::vector<Series>& series, bool use_x, bool log) {
  Axis axis;
  axis.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) continue;
      if (log && !(v > 0.0)) throw ConfigError("log axis needs positive values");
      lo = std::min(lo, axis.transform(v));
      hi = std::max(hi, axis.transform(v));
    }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) {
    const double pad = std::max(std::abs(lo) * 0.1, 0.5);
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const ChartOptions& options) {
  if (series.empty()) throw ConfigError("chart needs at least one series");
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ConfigError("series '" + s.name + "' has unequal x and y lengths");
    if (s.x.empty()) throw ConfigError("series '" + s.name + "' is empty");
  }
  const Axis xa = make_axis(series, true, options.log_x);
  const Axis ya = make_axis(series, false, options.log_y);

  const double w = options.width;
  const double h = options.height;
  const double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = w - left - right;
  const double ph = h - top - bottom;
  auto px = [&](double v) { return left + xa.fraction(v) * pw; };
  auto py = [&](double v) { return top + (1.0 - ya.fraction(v)) * ph; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg += "<text x=\"" + num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape_xml(options.title) + "</text>\n";
  }
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double f = static_cast<double>(t) / kTicks;
    const double xv = xa.lo + f * (xa.hi - xa.lo);
    const double yv = ya.lo + f * (ya.hi - ya.lo);
    const double tx = left + f * pw;
    const double ty = top + (1.0 - f) * ph;
    const std::string xl = format_real(xa.log ? std::pow(10.0, xv) : xv).substr(0, 8);
    const std::string yl = format_real(ya.log ? std::pow(10.0, yv) : yv).substr(0, 8);
    svg += "<line x1=\"" + num(tx) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(tx) + "\" y2=\"" +
           num(top + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(tx) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" + escape_xml(xl) +
           "</text>\n";
    svg += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(ty) + "\" x2=\"" + num(left) + "\" y2=\"" + num(ty) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(ty + 4) + "\" text-anchor=\"end\">" + escape_xml(yl) +
           "</text>\n";
  }
  svg += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(h - 12) + "\" text-anchor=\"middle\">" +
         escape_xml(options.x_label + (xa.log ? " (log)" : "")) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(top + ph / 2) + ")\">" + escape_xml(options.y_label + (ya.log ? " (log)" : "")) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::string color = kPalette[s % std::size(kPalette)];
    std::string points;
    std::string markers;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      const double xv = series[s].x[i];
      const double yv = series[s].y[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      if (!points.empty()) points += ' ';
      points += num(px(xv)) + "," + num(py(yv));
      markers += "<circle cx=\"" + num(px(xv)) + "\" cy=\"" + num(py(yv)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    svg += markers;
    const double ly = top + 10 + 18.0 * static_cast<double>(s);
    svg += "<line x1=\"" + num(left + pw + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + pw + 32) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text class=\"legend\" x=\"" + num(left + pw + 38) + "\" y=\"" + num(ly + 4) + "\">" +
           escape_xml(series[s].name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void render_line_chart(const std::vector<Series>& series, const std::filesystem::path& path,
                       const ChartOptions& options) {
  write_file_atomic(path, render_svg(series, options));
}

}  // namespace mlmmsb
