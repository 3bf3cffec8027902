#pragma once

#include <string>
#include <vector>

namespace embo::cli::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static line chart, one polyline per series, shared axes.
std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

/// Vertical bars with an optional horizontal reference line (skipped when <= 0).
std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& labels, const std::vector<double>& values,
                      double reference = 0.0);

}  // namespace embo::cli::svg
