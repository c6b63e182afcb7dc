#pragma once

// Minimal polyline SVG charts: linear or log axes, decade ticks, legend.
// Field contours are exported as grid CSVs instead; see the runner.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace sfpinn {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct ChartSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
};

namespace detail {

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace detail

inline void write_line_chart(const std::string& path, const ChartSpec& spec,
                             const std::vector<Series>& series) {
  const int W = 760, H = 520;
  const int L = 78, R = 24, T = 42, B = 58;
  auto tx = [&](double u) { return L + u * (W - L - R); };
  auto ty = [&](double u) { return H - B - u * (H - T - B); };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double x = s.x[i], y = s.y[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (spec.logx && x <= 0.0) continue;
      if (spec.logy && y <= 0.0) continue;
      x = spec.logx ? std::log10(x) : x;
      y = spec.logy ? std::log10(y) : y;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymin < ymax)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double xpad = 0.03 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  auto ux = [&](double x) { return ((spec.logx ? std::log10(x) : x) - xmin) / (xmax - xmin); };
  auto uy = [&](double y) { return ((spec.logy ? std::log10(y) : y) - ymin) / (ymax - ymin); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

  std::ofstream out(path);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << spec.title << "</text>\n";

  auto ticks = [&](double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
      for (int d = static_cast<int>(std::floor(lo)); d <= static_cast<int>(std::ceil(hi)); ++d)
        if (d >= lo - 1e-9 && d <= hi + 1e-9) t.push_back(d);
    } else {
      const double span = hi - lo;
      const double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
      const double mult = span / step > 25 ? 5.0 : span / step > 12 ? 2.0 : 1.0;
      const double inc = step * mult;
      for (double v = std::ceil(lo / inc) * inc; v <= hi + 1e-9 * span; v += inc) t.push_back(v);
    }
    return t;
  };

  for (double v : ticks(xmin, xmax, spec.logx)) {
    const double px = tx((v - xmin) / (xmax - xmin));
    svg << "<line x1=\"" << px << "\" y1=\"" << ty(0) << "\" x2=\"" << px << "\" y2=\"" << ty(1)
        << "\" stroke=\"#e5e5e5\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
        << detail::fmt_tick(spec.logx ? std::pow(10.0, v) : v) << "</text>\n";
  }
  for (double v : ticks(ymin, ymax, spec.logy)) {
    const double py = ty((v - ymin) / (ymax - ymin));
    svg << "<line x1=\"" << tx(0) << "\" y1=\"" << py << "\" x2=\"" << tx(1) << "\" y2=\"" << py
        << "\" stroke=\"#e5e5e5\"/>\n";
    svg << "<text x=\"" << L - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
        << detail::fmt_tick(spec.logy ? std::pow(10.0, v) : v) << "</text>\n";
  }
  svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 14
      << "\" text-anchor=\"middle\">" << spec.xlabel << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (T + H - B) / 2 << ")\">" << spec.ylabel << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = palette[si % 8];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((spec.logx && s.x[i] <= 0) || (spec.logy && s.y[i] <= 0)) continue;
      svg << tx(ux(s.x[i])) << ',' << ty(uy(s.y[i])) << ' ';
    }
    svg << "\"/>\n";
    const double ly = T + 16 + 16 * static_cast<double>(si);
    svg << "<line x1=\"" << W - R - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R - 126
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << W - R - 120 << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  out << svg.str();
}

}  // namespace sfpinn
