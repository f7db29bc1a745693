#pragma once

// Minimal self-contained SVG line charts: axes, ticks, legend, polylines.
// No external assets, no styling dependencies, deterministic output.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "uoqs/csv.hpp"

namespace uoqs::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// round tick spacing to 1/2/5 times a power of ten
inline double nice_step(double span, int target_ticks) {
  if (span <= 0.0) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

inline std::string fmt(double v) {
  // trim -0 and long fractions for tick labels
  if (v == 0.0) return "0";
  return csv::format_double(v);
}

}  // namespace detail

inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

inline void write_line_chart(std::ostream& out, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             const std::vector<Series>& series) {
  const int width = 960, height = 600;
  const int left = 90, right = 180, top = 50, bottom = 70;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const Series& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  y_min = std::min(y_min, 0.0);  // anchor counts at zero

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"16\">" << detail::escape_text(title) << "</text>\n";

  // axes box
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double x_step = detail::nice_step(x_max - x_min, 6);
  for (double t = std::ceil(x_min / x_step) * x_step; t <= x_max + x_step * 1e-9; t += x_step) {
    out << "<line x1=\"" << px(t) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(t)
        << "\" y2=\"" << top + plot_h + 6 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(t) << "\" y=\"" << top + plot_h + 22
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::fmt(t) << "</text>\n";
  }
  const double y_step = detail::nice_step(y_max - y_min, 6);
  for (double t = std::ceil(y_min / y_step) * y_step; t <= y_max + y_step * 1e-9; t += y_step) {
    out << "<line x1=\"" << left - 6 << "\" y1=\"" << py(t) << "\" x2=\"" << left << "\" y2=\""
        << py(t) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 10 << "\" y=\"" << py(t) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fmt(t)
        << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << detail::escape_text(x_label) << "</text>\n";
  out << "<text x=\"22\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 22 "
      << top + plot_h / 2 << ")\">" << detail::escape_text(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[i].points)
      out << csv::format_double(px(x)) << ',' << csv::format_double(py(y)) << ' ';
    out << "\"/>\n";
    // legend row
    const double ly = top + 14 + 18 * static_cast<double>(i);
    out << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\""
        << left + plot_w + 36 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::escape_text(series[i].label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace uoqs::svg
