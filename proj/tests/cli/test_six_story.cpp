#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "cli_support.hpp"
#include "embo/cli/config.hpp"
#include "embo/cli/pipeline.hpp"
#include "embo/gain.hpp"

namespace embo::cli {
namespace {

const ExperimentConfig& six_story() {
  static const ExperimentConfig cfg = load_config(testing::fixtures_dir() / "six_story.json");
  return cfg;
}

TEST(SixStory, VirginStiffnessIsPositiveDefinite) {
  const auto lin = LinearizedModel::from(six_story().building);
  const Eigen::SelfAdjointEigenSolver<Matrix> k(lin.stiffness);
  ASSERT_EQ(k.info(), Eigen::Success);
  EXPECT_GT(k.eigenvalues().minCoeff(), 0.0);
  const Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> modes(lin.stiffness, lin.mass);
  ASSERT_EQ(modes.info(), Eigen::Success);
  const double f1 = std::sqrt(modes.eigenvalues().minCoeff()) / (2.0 * M_PI);
  EXPECT_GT(f1, 0.5);
  EXPECT_LT(f1, 5.0);
}

double grid_doubling_change(const ExperimentConfig& cfg, const Vector& gain) {
  const auto lin = LinearizedModel::from(cfg.observer_model());
  const ObserverConfig obs{cfg.measured_dofs(), gain};
  GridSettings fine = cfg.gain.grid;
  fine.log_points *= 2;
  fine.peak_points *= 2;
  const double j1 = trace_P(lin, obs, cfg.gain.noise, FrequencyGrid::for_model(lin.mass, lin.stiffness, cfg.gain.grid));
  const double j2 = trace_P(lin, obs, cfg.gain.noise, FrequencyGrid::for_model(lin.mass, lin.stiffness, fine));
  return std::abs(j2 - j1) / j2;
}

TEST(Fixtures, QuadratureDoublingChangesJLittle) {
  Vector six(6);
  six << 8237, 8237, 150, 9423, 9422, 231;
  EXPECT_LT(grid_doubling_change(six_story(), six), 1e-3);
  EXPECT_LT(grid_doubling_change(six_story(), Vector::Zero(6)), 1e-3);
  const auto one = load_config(testing::fixtures_dir() / "one_story.json");
  for (double e : {0.0, 200.0, 1958.6, 2e4}) {
    EXPECT_LT(grid_doubling_change(one, Vector::Constant(1, e)), 1e-3) << e;
  }
}

TEST(SixStory, MultiStartOptimaAgree) {
  const auto& cfg = six_story();
  const auto lin = LinearizedModel::from(cfg.observer_model());
  const auto grid = FrequencyGrid::for_model(lin.mass, lin.stiffness, cfg.gain.grid);
  GainSettings ten = cfg.gain.settings;
  ten.starts = 10;
  const auto a = optimize_gain(lin, cfg.measured_dofs(), cfg.gain.noise, grid, cfg.gain.settings);
  const auto b = optimize_gain(lin, cfg.measured_dofs(), cfg.gain.noise, grid, ten);
  EXPECT_LT(std::abs(a.j_optimum - b.j_optimum) / b.j_optimum, 0.02) << a.j_optimum << " " << b.j_optimum;
  EXPECT_LT(b.j_optimum, b.j_zero);
  EXPECT_LT(a.j_optimum, a.j_zero);
}

TEST(SixStory, HalvingTheTimeStepMovesPeaksLittle) {
  const auto& cfg = six_story();
  IntegratorSettings coarse = cfg.integrator;
  IntegratorSettings fine = coarse;
  fine.dt = coarse.dt / 2.0;
  const auto h1 = simulate(cfg.building, load_ground_motion(cfg, coarse.dt), coarse);
  const auto h2 = simulate(cfg.building, load_ground_motion(cfg, fine.dt), fine);
  double worst = 0.0;
  double worst_rotation = 0.0;
  for (Eigen::Index d = 0; d < h1.q.rows(); ++d) {
    const double p1 = h1.q.row(d).cwiseAbs().maxCoeff();
    const double p2 = h2.q.row(d).cwiseAbs().maxCoeff();
    double& slot = d % FloorLayout::kDofPerFloor == 2 ? worst_rotation : worst;
    slot = std::max(slot, std::abs(p1 - p2) / p2);
  }
  // Floor rotations (rad) are tiny here and only reported.
  RecordProperty("worst_rotation_peak_change", std::to_string(worst_rotation));
  EXPECT_LT(worst, 5e-3);
}

TEST(SixStory, UnmeasuredFloorPeaksWithinTenPercent) {
  const auto& cfg = six_story();
  RunOptions opt = default_options(cfg);
  opt.out_dir = testing::scratch_dir("six_story_observe");
  RunManifest man;
  run_simulate(cfg, opt, man);
  run_gain(cfg, opt, man);
  const auto obs = run_observe(cfg, opt, man);
  ASSERT_TRUE(obs.comparison.has_value());
  int unmeasured = 0;
  for (const auto& f : obs.comparison->floors) {
    if (f.measured || f.dof % FloorLayout::kDofPerFloor == 2) continue;
    ++unmeasured;
    EXPECT_LT(f.peak_error, 0.10) << io::dof_label(f.dof);
  }
  EXPECT_EQ(unmeasured, 8);
}

}  // namespace
}  // namespace embo::cli
