#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "cli_support.hpp"
#include "embo/cli/config.hpp"
#include "embo/cli/pipeline.hpp"
#include "embo/gain.hpp"
#include "embo/io.hpp"

namespace embo::cli {
namespace {

namespace fs = std::filesystem;
using testing::fixture_config;
using testing::Json;
using testing::run_cli;
using testing::scratch_dir;
using testing::write_config;

Json read_json(const fs::path& p) { return Json::parse(io::read_text(p)); }

/// one_story config writing into dir, optionally on the all-zero motion.
fs::path one_story_in(const fs::path& dir, bool zero = false, int samples = 501) {
  Json j = fixture_config("one_story.json");
  if (zero) {
    j["instrumentation"]["channels"][0]["noise_psd_m2_s3"] = 0.0;
    j["ground_motion"]["file"] = testing::zero_motion(dir, samples).string();
    j["ground_motion"]["y_channel"] = "ug_y";
  }
  j["outputs"]["directory"] = (dir / "out").string();
  return write_config(dir, j);
}

TEST(CliExit, UsageErrorsAreConfigErrors) {
  EXPECT_EQ(run_cli({}), kExitConfig);
  EXPECT_EQ(run_cli({"dance"}), kExitConfig);
  EXPECT_EQ(run_cli({"simulate"}), kExitConfig);
  EXPECT_EQ(run_cli({"simulate", "--config", "/nonexistent/config.json"}), kExitConfig);
  EXPECT_EQ(run_cli({"--help"}), kExitOk);
  EXPECT_EQ(run_cli({"damage", "--config", "x.json", "--source", "guess"}), kExitConfig);
}

TEST(CliExit, SchemaViolationExitsTwoAndNamesThePath) {
  const fs::path dir = scratch_dir("cli_schema");
  Json j = fixture_config("one_story.json");
  j["building"]["walls"][0]["strength_scale"] = 0.0;
  const auto cfg = write_config(dir, j);
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}), kExitConfig);
  const std::string err = ::testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("building.walls[0].strength_scale"), std::string::npos) << err;
}

TEST(CliSimulate, ZeroMotionGivesZeroResponseAndAManifest) {
  const fs::path dir = scratch_dir("cli_zero");
  const auto cfg = one_story_in(dir, true);
  ASSERT_EQ(run_cli({"simulate", "--config", cfg.string()}), kExitOk);
  const auto h = io::read_history_binary(dir / "out" / kTruthHistory);
  EXPECT_EQ(h.steps(), 501);
  EXPECT_EQ(h.q.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(h.wall_force.cwiseAbs().maxCoeff(), 0.0);
  const Json man = read_json(dir / "out" / "manifest_simulate.json");
  EXPECT_EQ(man["command"], "simulate");
  ASSERT_FALSE(man["outputs"].empty());
  for (const auto& o : man["outputs"]) {
    EXPECT_EQ(o["sha256"].get<std::string>(), sha256_file(dir / "out" / o["path"].get<std::string>()));
  }
}

TEST(CliGain, ExplicitGainIsEchoedAndTheDesignSkipped) {
  const fs::path dir = scratch_dir("cli_explicit");
  Json j = fixture_config("one_story.json");
  j["gain"] = {{"explicit_E", {1234.5}}};
  j["outputs"]["directory"] = (dir / "out").string();
  const auto cfg = write_config(dir, j);
  ASSERT_EQ(run_cli({"gain", "--config", cfg.string()}), kExitOk);
  const Json g = read_json(dir / "out" / kGainRecord);
  EXPECT_EQ(g["source"], "explicit");
  EXPECT_EQ(g["E_diagonal"][0].get<double>(), 1234.5);
  EXPECT_EQ(g["measured_dofs"][0], "F1_ux");
  const Json man = read_json(dir / "out" / "manifest_gain.json");
  EXPECT_EQ(man["stages"][0]["status"], "skipped");
}

TEST(CliGain, OneStoryOptimumMatchesABruteForceGrid) {
  const fs::path dir = scratch_dir("cli_gain_grid");
  const auto cfg_path = one_story_in(dir);
  ASSERT_EQ(run_cli({"gain", "--config", cfg_path.string()}), kExitOk);
  const Json g = read_json(dir / "out" / kGainRecord);
  const double e_star = g["E_diagonal"][0].get<double>();

  const ExperimentConfig cfg = load_config(cfg_path);
  const auto lin = LinearizedModel::from(cfg.observer_model());
  const auto grid = FrequencyGrid::for_model(lin.mass, lin.stiffness, cfg.gain.grid);
  const double ref = g["reference_gain"][0].get<double>();
  const double lo = std::log10(ref) - 4.0;
  const double hi = std::log10(ref) + 4.0;
  constexpr int kPoints = 200;
  double best_j = INFINITY;
  double best_e = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double e = std::pow(10.0, lo + (hi - lo) * i / (kPoints - 1));
    ObserverConfig obs{cfg.measured_dofs(), Vector::Constant(1, e)};
    const double j = trace_P(lin, obs, cfg.gain.noise, grid);
    if (j < best_j) {
      best_j = j;
      best_e = e;
    }
  }
  const double cell = (hi - lo) / (kPoints - 1);
  EXPECT_LE(std::abs(std::log10(e_star) - std::log10(best_e)), cell) << e_star << " vs " << best_e;
  EXPECT_LE(g["J_at_optimum"].get<double>(), best_j * (1.0 + 1e-9));
  EXPECT_LT(g["J_at_optimum"].get<double>(), g["J_zero_gain"].get<double>());
}

TEST(CliObserve, InputMismatchesExitTwo) {
  const fs::path dir = scratch_dir("cli_observe_bad");
  const auto cfg = one_story_in(dir, true);
  // no gain.json yet
  EXPECT_EQ(run_cli({"observe", "--config", cfg.string()}), kExitConfig);

  ASSERT_EQ(run_cli({"simulate", "--config", cfg.string()}), kExitOk);
  ASSERT_EQ(run_cli({"gain", "--config", cfg.string()}), kExitOk);
  Record other = io::read_record(dir / "out" / kMeasurements);
  other.channels[0].name = "F1_uy";
  io::write_record(dir / "renamed.csv", other);
  EXPECT_EQ(run_cli({"observe", "--config", cfg.string(), "--measurements", (dir / "renamed.csv").string()}),
            kExitConfig);
  EXPECT_EQ(run_cli({"observe", "--config", cfg.string(), "--measurements", (dir / "missing.csv").string()}),
            kExitConfig);
  EXPECT_EQ(run_cli({"observe", "--config", cfg.string()}), kExitOk);
}

TEST(CliObserve, ZeroGainGivesAZeroEstimate) {
  const fs::path dir = scratch_dir("cli_zero_gain");
  Json j = fixture_config("one_story.json");
  j["gain"] = {{"explicit_E", {0.0}}};
  j["outputs"]["directory"] = (dir / "out").string();
  const auto cfg = write_config(dir, j);
  for (const char* verb : {"simulate", "gain", "observe"}) {
    ASSERT_EQ(run_cli({verb, "--config", cfg.string()}), kExitOk) << verb;
  }
  const auto est = io::read_history_binary(dir / "out" / kEstimateHistory);
  EXPECT_EQ(est.q.cwiseAbs().maxCoeff(), 0.0);
  const std::string errors = io::read_text(dir / "out" / "errors_story.csv");
  EXPECT_NE(errors.find(",1,"), std::string::npos) << errors;  // peak error of a zero estimate is 1
}

TEST(CliDamage, ZeroResponseGivesZeroDamage) {
  const fs::path dir = scratch_dir("cli_damage_zero");
  const auto cfg = one_story_in(dir, true);
  for (const char* verb : {"simulate", "gain", "observe", "damage"}) {
    ASSERT_EQ(run_cli({verb, "--config", cfg.string()}), kExitOk) << verb;
  }
  const Json rep = read_json(dir / "out" / "damage_report.json");
  EXPECT_EQ(rep["building"]["max_di"].get<double>(), 0.0);
  ASSERT_EQ(rep["walls"].size(), 4u);
  for (const auto& w : rep["walls"]) {
    EXPECT_EQ(w["di"].get<double>(), 0.0);
    EXPECT_FALSE(w["collapse_range"].get<bool>());
  }
}

TEST(CliDamage, RectangularLoopMatchesTheClosedForm) {
  const fs::path dir = scratch_dir("cli_damage_rect");
  const auto cfg_path = one_story_in(dir);
  const ExperimentConfig cfg = load_config(cfg_path);
  constexpr double kDrift = 12.0;  // mm
  constexpr double kForce = 7.5;   // kN
  constexpr int kCycles = 3;
  // Horizontal strokes at +/-F, force reversals in a single step at the drift extremes.
  std::vector<double> d{-kDrift};
  std::vector<double> f{kForce};
  for (int c = 0; c < kCycles; ++c) {
    for (double sign : {1.0, -1.0}) {
      for (int i = 1; i <= 20; ++i) {
        d.push_back(-sign * kDrift + sign * 2.0 * kDrift * i / 20.0);
        f.push_back(sign * kForce);
      }
      d.push_back(d.back());
      f.push_back(-sign * kForce);
    }
  }
  const auto steps = static_cast<Eigen::Index>(d.size());
  ResponseHistory h;
  h.t = Vector::LinSpaced(steps, 0.0, 0.01 * static_cast<double>(steps - 1));
  h.q = h.dq = h.ddq = Matrix::Zero(3, steps);
  h.wall_drift = h.wall_force = h.wall_energy = h.wall_work = Matrix::Zero(4, steps);
  for (Eigen::Index k = 0; k < steps; ++k) {
    h.wall_drift(0, k) = d[k];
    h.wall_force(0, k) = f[k];
  }
  io::write_history_binary(dir / "out" / kEstimateHistory, h);
  ASSERT_EQ(run_cli({"damage", "--config", cfg_path.string()}), kExitOk);

  const auto& dp = cfg.building.walls[0].damage;
  const double p = psi(cfg.psi, dp.x_ns, dp.x_wh);
  const double energy = kCycles * 4.0 * kForce * kDrift;
  const double expected = kDrift / dp.delta_u + p * energy / (dp.f_ey * dp.delta_u);
  const Json rep = read_json(dir / "out" / "damage_report.json");
  const auto& top = rep["walls"][0];
  EXPECT_EQ(top["wall_id"], "X1");
  EXPECT_NEAR(top["e_hyst_kN_mm"].get<double>(), energy, 1e-9 * energy);
  EXPECT_NEAR(top["di"].get<double>(), expected, 1e-12 * expected);
}

TEST(CliDamage, TruthSourceNeedsNoObserver) {
  const fs::path dir = scratch_dir("cli_damage_truth");
  const auto cfg = one_story_in(dir);
  ASSERT_EQ(run_cli({"simulate", "--config", cfg.string()}), kExitOk);
  EXPECT_EQ(run_cli({"damage", "--config", cfg.string()}), kExitConfig);  // no estimate yet
  ASSERT_EQ(run_cli({"damage", "--config", cfg.string(), "--source", "truth"}), kExitOk);
  const Json rep = read_json(dir / "out" / "damage_report.json");
  EXPECT_EQ(rep["source"], "truth");
  EXPECT_GT(rep["building"]["max_di"].get<double>(), 0.0);
}

TEST(CliNumerics, NewtonFailureExitsThree) {
  const fs::path dir = scratch_dir("cli_newton");
  Json j = fixture_config("one_story.json");
  j["ground_motion"]["scale"] = 50.0;
  j["integrator"]["newton_max_iter"] = 1;
  j["integrator"]["max_bisections"] = 0;
  j["integrator"]["newton_tol_kN"] = 1e-12;
  j["outputs"]["directory"] = (dir / "out").string();
  const auto cfg = write_config(dir, j);
  EXPECT_EQ(run_cli({"simulate", "--config", cfg.string()}), kExitNumerical);
  const Json man = read_json(dir / "out" / "manifest_simulate.json");
  EXPECT_EQ(man["stages"][0]["status"], "failed");
}

TEST(CliVerify, MisfitObserverModelIsReportedNotFatal) {
  const fs::path dir = scratch_dir("cli_misfit");
  Json j = fixture_config("one_story.json");
  j["observer"] = {{"wall_stiffness_scale", 2.0}};
  j["outputs"]["directory"] = (dir / "out").string();
  const auto cfg = write_config(dir, j);
  const int rc = run_cli({"verify", "--config", cfg.string()});
  EXPECT_TRUE(rc == kExitOk || rc == kExitVerification) << rc;
  const Json v = read_json(dir / "out" / "verification.json");
  EXPECT_EQ(v["passed"].get<bool>(), rc == kExitOk);
  EXPECT_TRUE(std::isfinite(v["displacement_rms_error"].get<double>()));
}

TEST(CliVerify, OneStoryPasses) {
  const fs::path dir = scratch_dir("cli_verify_one");
  const auto cfg = one_story_in(dir);
  EXPECT_EQ(run_cli({"verify", "--config", cfg.string()}), kExitOk);
  const Json v = read_json(dir / "out" / "verification.json");
  EXPECT_TRUE(v["passed"].get<bool>());
  EXPECT_EQ(v["checks"].size(), 3u);
}

std::string bytes_of(const fs::path& p) { return io::read_text(p); }

TEST(CliComposition, VerifyEqualsTheStagesRunSeparately) {
  const fs::path dir = scratch_dir("cli_compose");
  const auto cfg = one_story_in(dir);
  const fs::path a = dir / "verify";
  const fs::path b = dir / "stages";
  run_cli({"verify", "--config", cfg.string(), "--out", a.string()});
  for (const char* verb : {"simulate", "gain", "observe", "damage"}) {
    ASSERT_EQ(run_cli({verb, "--config", cfg.string(), "--out", b.string()}), kExitOk) << verb;
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(b)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("manifest_", 0) == 0) continue;
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(bytes_of(a / name), bytes_of(entry.path())) << name;
    ++compared;
  }
  EXPECT_GT(compared, 10);
}

TEST(CliDeterminism, SeedControlsTheNoiseOnly) {
  const fs::path dir = scratch_dir("cli_seed");
  const auto cfg = one_story_in(dir);
  auto meas = [&](const std::string& sub, const std::string& seed) {
    std::vector<std::string> args{"simulate", "--config", cfg.string(), "--out", (dir / sub).string()};
    if (!seed.empty()) args.insert(args.end(), {"--seed", seed});
    EXPECT_EQ(run_cli(args), kExitOk);
    return std::pair{bytes_of(dir / sub / kMeasurements), bytes_of(dir / sub / kTruthHistory)};
  };
  const auto base = meas("a", "");
  const auto again = meas("b", "");
  const auto same_seed = meas("c", "7");
  const auto other = meas("d", "8");
  EXPECT_EQ(base, again);
  EXPECT_EQ(base, same_seed);  // the config seed is 7
  EXPECT_NE(base.first, other.first);
  EXPECT_EQ(base.second, other.second);
}

TEST(CliThreads, ThreadCountDoesNotChangeTheGain) {
  const fs::path dir = scratch_dir("cli_threads");
  const auto cfg = one_story_in(dir);
  ASSERT_EQ(run_cli({"gain", "--config", cfg.string(), "--out", (dir / "t1").string(), "--threads", "1"}), kExitOk);
  ASSERT_EQ(run_cli({"gain", "--config", cfg.string(), "--out", (dir / "t3").string(), "--threads", "3"}), kExitOk);
  EXPECT_EQ(bytes_of(dir / "t1" / kGainRecord), bytes_of(dir / "t3" / kGainRecord));
}

}  // namespace
}  // namespace embo::cli
