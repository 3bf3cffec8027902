#include <gtest/gtest.h>

#include <cmath>

#include "embo/optim.hpp"

namespace embo {
namespace {

TEST(NelderMead, QuadraticBowl) {
  auto f = [](const std::vector<double>& x) { return std::pow(x[0] - 1.5, 2) + 4.0 * std::pow(x[1] + 0.5, 2); };
  const auto r = nelder_mead(f, {0.0, 0.0}, {0.5, 1e-8, 1e-14, 2000});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.5, 1e-6);
  EXPECT_NEAR(r.x[1], -0.5, 1e-6);
  EXPECT_LE(r.simplex_size, 1e-8);
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = nelder_mead(f, {-1.2, 1.0}, {0.5, 1e-9, 1e-14, 10000});
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
  EXPECT_LT(r.value, 1e-10);
}

TEST(NelderMead, StopsAtEvaluationLimit) {
  auto f = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; };
  const auto r = nelder_mead(f, {5.0, 5.0, 5.0}, {0.1, 1e-12, 1e-16, 20});
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 25);
  EXPECT_LT(r.value, 75.0);
}

TEST(NelderMead, OneDimension) {
  auto f = [](const std::vector<double>& x) { return std::cosh(x[0] - 2.0); };
  const auto r = nelder_mead(f, {0.0}, {});
  EXPECT_NEAR(r.x[0], 2.0, 1e-5);
}

}  // namespace
}  // namespace embo
