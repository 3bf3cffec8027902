#include "embo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "embo/common.hpp"

namespace embo {
namespace {

using Point = std::vector<double>;

Point affine(const Point& base, const Point& toward, double t) {
  Point p(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) p[i] = base[i] + t * (toward[i] - base[i]);
  return p;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexSettings& settings) {
  const std::size_t n = x0.size();
  if (n == 0) throw InputError("nelder_mead: empty starting point");

  SimplexResult res;
  auto eval = [&](const Point& p) {
    ++res.evaluations;
    const double v = f(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Point> x(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += settings.initial_step;
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(x[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<Point> xs(n + 1);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      xs[i] = std::move(x[order[i]]);
      fs[i] = fx[order[i]];
    }
    x = std::move(xs);
    fx = std::move(fs);
  };
  auto size = [&] {
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) s = std::max(s, std::abs(x[i][j] - x[0][j]));
    }
    return s;
  };

  sort_simplex();
  while (res.evaluations < settings.max_evaluations) {
    const double spread = std::abs(fx[n] - fx[0]);
    if (size() <= settings.x_tolerance &&
        spread <= settings.f_tolerance * std::max(1e-300, std::abs(fx[0]))) {
      res.converged = true;
      break;
    }
    ++res.iterations;

    Point centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += x[i][j] / static_cast<double>(n);
    }
    const Point reflected = affine(centroid, x[n], -1.0);
    const double fr = eval(reflected);
    if (fr < fx[0]) {
      const Point expanded = affine(centroid, x[n], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        x[n] = expanded;
        fx[n] = fe;
      } else {
        x[n] = reflected;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      x[n] = reflected;
      fx[n] = fr;
    } else {
      const bool outside = fr < fx[n];
      const Point contracted = outside ? affine(centroid, reflected, 0.5)
                                       : affine(centroid, x[n], 0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, fx[n])) {
        x[n] = contracted;
        fx[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          x[i] = affine(x[0], x[i], 0.5);
          fx[i] = eval(x[i]);
        }
      }
    }
    sort_simplex();
  }

  res.x = x[0];
  res.value = fx[0];
  res.simplex_size = size();
  return res;
}

}  // namespace embo
