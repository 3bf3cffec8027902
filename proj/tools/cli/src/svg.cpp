#include "embo/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace embo::cli::svg {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-300) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string frame(const std::string& title, const std::string& x_label, const std::string& y_label,
                  const Range& xr, const Range& yr, bool x_ticks = true) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                  num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) + "</text>\n";
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" + num(y0 - y1) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double px = x0 + (x1 - x0) * i / 4.0;
    if (x_ticks) {
      s += "<text x=\"" + num(px) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" + tick(fx) + "</text>\n";
    }
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double py = y0 - (y0 - y1) * i / 4.0;
    s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + tick(fy) + "</text>\n";
    s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(py) +
         "\" stroke=\"#dddddd\"/>\n";
  }
  s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((y0 + y1) / 2) + ")\">" + escape(y_label) + "</text>\n";
  return s;
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series) {
  Range xr, yr;
  for (const auto& sr : series) {
    for (double v : sr.x) xr.add(v);
    for (double v : sr.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  std::string s = frame(title, x_label, y_label, xr, yr);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.2\" points=\"";
    const std::size_t n = std::min(sr.x.size(), sr.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) continue;
      const double px = x0 + (sr.x[i] - xr.lo) / (xr.hi - xr.lo) * (x1 - x0);
      const double py = y0 - (sr.y[i] - yr.lo) / (yr.hi - yr.lo) * (y0 - y1);
      s += num(px) + "," + num(py) + " ";
    }
    s += "\"/>\n";
    const double ly = y1 + 16 + 16 * static_cast<double>(k);
    s += "<line x1=\"" + num(x1 - 150) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(x1 - 128) + "\" y2=\"" +
         num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(x1 - 122) + "\" y=\"" + num(ly) + "\">" + escape(sr.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& labels, const std::vector<double>& values,
                      double reference) {
  Range xr;
  xr.lo = 0.0;
  xr.hi = static_cast<double>(std::max<std::size_t>(values.size(), 1));
  Range yr;
  yr.add(0.0);
  for (double v : values) yr.add(v);
  if (reference > 0.0) yr.add(reference * 1.05);
  yr.settle();
  std::string s = frame(title, "", y_label, xr, yr, false);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  const double slot = (x1 - x0) / xr.hi;
  auto py = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double top = py(std::max(values[i], 0.0));
    s += "<rect x=\"" + num(x0 + slot * (i + 0.15)) + "\" y=\"" + num(top) + "\" width=\"" + num(slot * 0.7) +
         "\" height=\"" + num(py(0.0) - top) + "\" fill=\"" + kPalette[0] + "\"><title>" +
         escape(i < labels.size() ? labels[i] : "") + "</title></rect>\n";
    if (values.size() <= 60 && i < labels.size()) {
      const double cx = x0 + slot * (i + 0.5);
      s += "<text x=\"" + num(cx) + "\" y=\"" + num(y0 + 30) + "\" font-size=\"8\" text-anchor=\"middle\">" +
           escape(labels[i]) + "</text>\n";
    }
  }
  if (reference > 0.0) {
    s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py(reference)) + "\" x2=\"" + num(x1) + "\" y2=\"" +
         num(py(reference)) + "\" stroke=\"" + kPalette[1] + "\" stroke-dasharray=\"6 4\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace embo::cli::svg
