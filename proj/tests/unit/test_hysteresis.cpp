#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "embo/hysteresis.hpp"
#include "fixtures.hpp"

namespace embo {
namespace {

using testing::saws;

// Piecewise-linear drift path through random reversal points, sampled in
// steps no larger than max_step.
std::vector<double> random_path(std::mt19937_64& rng, const SawsParameters& p, int reversals,
                                double max_step) {
  std::uniform_real_distribution<double> amp(0.05 * p.du, 1.6 * p.du);
  std::vector<double> path{0.0};
  double sign = 1.0;
  for (int r = 0; r < reversals; ++r) {
    const double target = sign * amp(rng);
    const double from = path.back();
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(target - from) / max_step)));
    for (int i = 1; i <= n; ++i) path.push_back(from + (target - from) * i / n);
    sign = -sign;
  }
  return path;
}

std::vector<HystereticWallState> replay(const SawsParameters& p, const std::vector<double>& path) {
  std::vector<HystereticWallState> out{HystereticWallState::virgin(p)};
  for (std::size_t k = 1; k < path.size(); ++k) out.push_back(step_wall(out.back(), p, path[k]).state);
  return out;
}

TEST(Backbone, ZeroAtOrigin) { EXPECT_EQ(backbone_force(saws(), 0.0), 0.0); }

TEST(Backbone, OddSymmetry) {
  const auto p = saws();
  for (double d : {0.3, 5.0, 59.0, 60.0, 75.0, 200.0}) {
    EXPECT_EQ(backbone_force(p, -d), -backbone_force(p, d)) << d;
  }
}

TEST(Backbone, MatchesHighPrecisionEvaluationAtPeakDrift) {
  SawsParameters p = saws();
  p.f0 = 8.0;
  p.s0 = 1.2;
  p.r1 = 0.06;
  p.du = 60.0;
  // (F0 + R1 S0 d)(1 - exp(-S0 d / F0)) at d = 60, 30-digit evaluation.
  EXPECT_NEAR(backbone_force(p, 60.0), 12.318479591213652, 1e-12);
}

TEST(Backbone, ContinuousAtPeakDrift) {
  const auto p = saws();
  const double eps = 1e-9;
  EXPECT_NEAR(backbone_force(p, p.du - eps), backbone_force(p, p.du + eps), 1e-8);
  EXPECT_NEAR(backbone_force(p, -p.du - eps), backbone_force(p, -p.du + eps), 1e-8);
}

TEST(Backbone, ClampedAtZeroFarPastCapping) {
  const auto p = saws();
  EXPECT_EQ(backbone_force(p, 1e5), 0.0);
  EXPECT_EQ(backbone_force(p, -1e5), 0.0);
}

TEST(InitialStiffness, EqualsS0AndScales) {
  auto p = saws();
  EXPECT_EQ(initial_stiffness(p), 1.2);
  p.s0 *= 2.0;
  EXPECT_EQ(initial_stiffness(p), 2.4);
}

TEST(InitialStiffness, MatchesCentralDifference) {
  const auto p = saws();
  const double h = 1e-6 * p.du;
  const double fd = (backbone_force(p, h) - backbone_force(p, -h)) / (2 * h);
  EXPECT_NEAR(fd / initial_stiffness(p), 1.0, 1e-4);
}

TEST(StepWall, VirginLoadingFollowsBackbone) {
  const auto p = saws();
  auto s = HystereticWallState::virgin(p);
  for (double d = 0.5; d <= 50.0; d += 0.5) {
    const WallStep r = step_wall(s, p, d);
    EXPECT_DOUBLE_EQ(r.force, backbone_force(p, d));
    const double h = 1e-7 * p.du;
    const double slope = (backbone_force(p, d + h) - backbone_force(p, d - h)) / (2 * h);
    EXPECT_NEAR(r.tangent, slope, 1e-4 * std::abs(slope) + 1e-9);
    s = r.state;
  }
}

TEST(StepWall, NullStepChangesNothing) {
  const auto p = saws();
  auto s = step_wall(HystereticWallState::virgin(p), p, 12.0).state;
  s = step_wall(s, p, 4.0).state;
  const WallStep r = step_wall(s, p, s.d);
  EXPECT_EQ(r.force, s.f);
  EXPECT_EQ(r.state.e_hyst, s.e_hyst);
  EXPECT_EQ(r.state.work, s.work);
}

TEST(StepWall, CommittedStateIsNotModified) {
  const auto p = saws();
  const auto s = step_wall(HystereticWallState::virgin(p), p, 20.0).state;
  const auto copy = s;
  (void)step_wall(s, p, -30.0);
  EXPECT_EQ(s.d, copy.d);
  EXPECT_EQ(s.f, copy.f);
  EXPECT_EQ(s.e_hyst, copy.e_hyst);
}

TEST(StepWall, UnloadingSlopeIsR3S0) {
  const auto p = saws();
  auto s = step_wall(HystereticWallState::virgin(p), p, 30.0).state;
  const WallStep r = step_wall(s, p, 29.0);
  EXPECT_NEAR(r.tangent, p.r3 * p.s0, 1e-12);
  EXPECT_NEAR(s.f - r.force, p.r3 * p.s0 * 1.0, 1e-9);
  EXPECT_NEAR(r.state.e_hyst, s.e_hyst, 1e-12);
}

TEST(StepWall, SmallLoopDissipationMatchesFineQuadrature) {
  const auto p = saws();
  // 0 -> +A -> -A -> back to zero force on the unloading line.
  const double a = 20.0;
  auto state_at = [&](const std::vector<double>& turns, int per_leg) {
    std::vector<double> path{0.0};
    for (double t : turns) {
      const double from = path.back();
      for (int i = 1; i <= per_leg; ++i) path.push_back(from + (t - from) * i / per_leg);
    }
    return path;
  };
  const auto probe = replay(p, state_at({a, -a}, 40)).back();
  const double d_end = probe.d - probe.f / p.unloading_stiffness();
  const auto coarse = replay(p, state_at({a, -a, d_end}, 40));
  const auto fine_path = state_at({a, -a, d_end}, 4000);
  const auto fine = replay(p, fine_path);
  ASSERT_NEAR(fine.back().f, 0.0, 1e-9);
  double area = 0.0;
  for (std::size_t k = 1; k < fine.size(); ++k) {
    area += 0.5 * (fine[k - 1].f + fine[k].f) * (fine_path[k] - fine_path[k - 1]);
  }
  ASSERT_GT(area, 0.0);
  EXPECT_NEAR(coarse.back().e_hyst / area, 1.0, 5e-3);
}

TEST(StepWallProperty, EnergyNeverDecreases) {
  const auto p = saws();
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto path = random_path(rng, p, 12, 0.03 * p.du);
    const auto states = replay(p, path);
    for (std::size_t k = 1; k < states.size(); ++k) {
      ASSERT_GE(states[k].e_hyst, states[k - 1].e_hyst) << "trial " << trial << " step " << k;
    }
  }
}

TEST(StepWallProperty, TangentMatchesFiniteDifference) {
  const auto p = saws();
  std::mt19937_64 rng(202);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto path = random_path(rng, p, 8, 0.05 * p.du);
    auto s = HystereticWallState::virgin(p);
    for (std::size_t k = 1; k < path.size(); ++k) {
      const WallStep r = step_wall(s, p, path[k]);
      s = r.state;
      const double h = (path[k] > path[k - 1] ? 1.0 : -1.0) * 1e-6 * p.du;
      const WallStep ahead = step_wall(s, p, s.d + h);
      if (ahead.state.branch != s.branch) continue;  // derivative undefined at a kink
      const double fd = (ahead.force - r.force) / h;
      ASSERT_NEAR(r.tangent, fd, 1e-2 * std::abs(fd) + 1e-9 * p.s0) << "trial " << trial << " step " << k;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(StepWallProperty, ForceIsContinuousInTheTarget) {
  const auto p = saws();
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto path = random_path(rng, p, 10, 0.05 * p.du);
    auto s = HystereticWallState::virgin(p);
    for (std::size_t k = 1; k < path.size(); ++k) {
      s = step_wall(s, p, path[k]).state;
      const double d = s.d + 0.2 * p.du * u(rng);
      const double e = 1e-12 * p.du;
      const WallStep a = step_wall(s, p, d);
      const WallStep b = step_wall(s, p, d + e);
      worst = std::max(worst, std::abs(b.force - a.force) - std::abs(a.tangent) * e);
    }
  }
  EXPECT_LT(worst, 1e-8 * p.f0);
}

TEST(StepWallProperty, MirroredHistoryNegatesForces) {
  const auto p = saws();
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const auto path = random_path(rng, p, 10, 0.04 * p.du);
    std::vector<double> mirror(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) mirror[k] = -path[k];
    const auto a = replay(p, path);
    const auto b = replay(p, mirror);
    for (std::size_t k = 0; k < a.size(); ++k) {
      ASSERT_EQ(a[k].f, -b[k].f) << "trial " << trial << " step " << k;
      ASSERT_EQ(a[k].e_hyst, b[k].e_hyst);
    }
  }
}

TEST(SawsParameters, ValidationRejectsBadSets) {
  auto p = saws();
  EXPECT_NO_THROW(p.validate());
  p.s0 = 0.0;
  EXPECT_THROW(p.validate(), InputError);
  p = saws();
  p.du = -1.0;
  EXPECT_THROW(p.validate(), InputError);
  p = saws();
  p.f0 = std::nan("");
  EXPECT_THROW(p.validate(), InputError);
}

TEST(WallDamageParams, ValidationRequiresPositiveValues) {
  WallDamageParams d = testing::wall_damage_params();
  EXPECT_NO_THROW(d.validate());
  d.f_ey = 0.0;
  EXPECT_THROW(d.validate(), InputError);
}

}  // namespace
}  // namespace embo
