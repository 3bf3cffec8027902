#pragma once

#include <functional>
#include <vector>

namespace embo {

struct SimplexSettings {
  double initial_step = 0.5;   ///< edge length of the starting simplex
  double x_tolerance = 1e-6;   ///< stop when every vertex is this close to the best
  double f_tolerance = 1e-10;  ///< ... and the value spread is this small (relative)
  int max_evaluations = 4000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double simplex_size = 0.0;  ///< max vertex distance from the best vertex at exit
  bool converged = false;
};

/// Nelder-Mead minimization (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5) starting from an axis-aligned simplex around x0.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexSettings& settings);

}  // namespace embo
