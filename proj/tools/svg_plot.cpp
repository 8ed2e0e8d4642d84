#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qntk::lab {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v) const { return log ? std::log10(v) : v; }
  double unit(double v) const { return hi > lo ? (map(v) - lo) / (hi - lo) : 0.5; }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    lo = std::min(lo, a.map(v));
    hi = std::max(hi, a.map(v));
  }
  if (!std::isfinite(lo)) return a;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.04 * (hi - lo);
  a.lo = lo - pad;
  a.hi = hi + pad;
  return a;
}

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0); }

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series) {
  const double left = 70, right = 170, top = 40, bottom = 50;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;

  std::vector<std::vector<std::pair<double, double>>> kept(series.size());
  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i)
      if (usable(ser.x[i], spec.log_x) && usable(ser.y[i], spec.log_y)) {
        kept[s].emplace_back(ser.x[i], ser.y[i]);
        xs.push_back(ser.x[i]);
        ys.push_back(ser.y[i]);
      }
  }
  const Axis ax = make_axis(xs, spec.log_x), ay = make_axis(ys, spec.log_y);
  auto px = [&](double v) { return left + ax.unit(v) * pw; };
  auto py = [&](double v) { return top + (1.0 - ay.unit(v)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = ax.lo + (ax.hi - ax.lo) * k / 4.0, fy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
    const double gx = left + pw * k / 4.0, gy = top + ph * (1.0 - k / 4.0);
    o << "<line x1=\"" << gx << "\" y1=\"" << top + ph << "\" x2=\"" << gx << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << gx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << num(spec.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << gy << "\" x2=\"" << left << "\" y2=\"" << gy
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
      << num(spec.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 10 << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof *kColors)];
    if (!kept[s].empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (series[s].dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
      for (const auto& [x, y] : kept[s]) o << num(px(x)) << ',' << num(py(y)) << ' ';
      o << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (series[s].dashed ? " stroke-dasharray=\"6,4\"" : "")
      << "/>\n";
    o << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace qntk::lab
