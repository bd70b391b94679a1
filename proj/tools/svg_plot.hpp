#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace qcap_tool {

struct SvgSeries {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

// Minimal scatter plot: axes, points, legend. Rates below zero are clamped to
// the plotting boundary; the CSV keeps the raw values.
inline std::string render_scatter(const std::vector<SvgSeries>& series, const std::string& x_label,
                                  const std::string& y_label) {
  const int w = 640, h = 480, margin = 56;
  double xmax = 1e-9, ymax = 1e-9;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  }
  xmax *= 1.05;
  ymax *= 1.05;
  auto px = [&](double x) { return margin + (w - 2 * margin) * std::max(0.0, x) / xmax; };
  auto py = [&](double y) { return h - margin - (h - 2 * margin) * std::max(0.0, y) / ymax; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
      << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << margin << "\" y2=\""
      << margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << h / 2 << ")\">" << y_label << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = xmax * tick / 4.0;
    const double fy = ymax * tick / 4.0;
    std::ostringstream lx, ly;
    lx.precision(3);
    ly.precision(3);
    lx << fx;
    ly << fy;
    out << "<text x=\"" << px(fx) << "\" y=\"" << h - margin + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << lx.str() << "</text>\n";
    out << "<text x=\"" << margin - 8 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << ly.str() << "</text>\n";
  }
  int legend_y = margin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << s.color
          << "\" fill-opacity=\"0.8\"/>\n";
    }
    out << "<circle cx=\"" << w - margin - 120 << "\" cy=\"" << legend_y << "\" r=\"4\" fill=\""
        << s.color << "\"/>\n";
    out << "<text x=\"" << w - margin - 108 << "\" y=\"" << legend_y + 4 << "\" font-size=\"12\">"
        << s.name << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
  return out.str();
}

} // namespace qcap_tool
