#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "embo/cli/config.hpp"
#include "embo/cli/manifest.hpp"
#include "embo/damage.hpp"
#include "embo/dynamics.hpp"
#include "embo/gain.hpp"
#include "embo/signal.hpp"

namespace embo::cli {

/// Thrown by verify when a threshold check fails (exit code 4).
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<std::filesystem::path> measurements;  ///< observe input; default out_dir/measurements.csv
  bool damage_from_truth = false;
};

/// Options from the config with command-line overrides applied.
RunOptions default_options(const ExperimentConfig& cfg);

// File names inside the output directory.
inline constexpr const char* kTruthHistory = "truth.bin";
inline constexpr const char* kEstimateHistory = "estimate.bin";
inline constexpr const char* kMeasurements = "measurements.csv";
inline constexpr const char* kGainRecord = "gain.json";

/// Ground acceleration (2 x steps, m/s^2) on the integrator grid, scaled.
Matrix load_ground_motion(const ExperimentConfig& cfg, double dt);

/// Absolute accelerations at the instrumented DoFs with seeded additive noise.
Record synthesize_measurements(const ExperimentConfig& cfg, const ResponseHistory& truth,
                               const Matrix& ug, std::uint64_t seed);

/// Relative velocity feedback (m x steps) from absolute acceleration records:
/// base acceleration removed, then integrated and high-passed.
Matrix feedback_velocity(const ExperimentConfig& cfg, const Record& measured, const Matrix& ug);

struct StoryError {
  int story = 0;
  char direction = 'x';
  bool measured = false;  ///< the story's top floor carries a channel
  double peak_true = 0.0;  ///< mm
  double peak_est = 0.0;   ///< mm
  double peak_error = 0.0; ///< |peak_est - peak_true| / peak_true
  double rms_error = 0.0;  ///< rms(est - true) / rms(true)
};

struct FloorError {
  int dof = 0;
  bool measured = false;
  double peak_true = 0.0;
  double peak_est = 0.0;
  double peak_error = 0.0;
};

struct WallError {
  std::string wall_id;
  double energy_true = 0.0;  ///< kN*mm
  double energy_est = 0.0;
  double energy_error = 0.0;  ///< relative
  double peak_drift_true = 0.0;
  double peak_drift_est = 0.0;
};

struct Comparison {
  std::vector<StoryError> stories;
  std::vector<FloorError> floors;
  std::vector<WallError> walls;
  double displacement_rms_error = 0.0;  ///< all DoFs, relative
  double max_unmeasured_peak_drift_error = 0.0;
  double max_wall_energy_error = 0.0;
  double max_unmeasured_floor_peak_error = 0.0;
};

Comparison compare(const ResponseHistory& truth, const ResponseHistory& estimate,
                   const BuildingModel& model, const std::vector<int>& measured_dofs);

struct SimulateOutcome {
  ResponseHistory truth;
  Matrix ug;
  Record measurements;
  double max_energy_error = 0.0;
};

struct GainOutcome {
  std::vector<int> measured_dofs;
  Vector gain;
  bool explicit_gain = false;
  std::optional<GainResult> result;
};

struct ObserveOutcome {
  ResponseHistory estimate;
  std::optional<Comparison> comparison;
};

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyOutcome {
  std::vector<VerifyCheck> checks;
  bool passed = false;
};

SimulateOutcome run_simulate(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man);
GainOutcome run_gain(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man);
ObserveOutcome run_observe(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man);
DamageReport run_damage(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man);
/// simulate -> gain -> observe -> damage, then threshold checks written to
/// verification.json. Does not throw on threshold failure; see passed.
VerifyOutcome run_verify(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man);

/// Per-wall damage from a history, using each wall's unloading stiffness.
std::vector<DamageIndexResult> wall_damage(const ResponseHistory& h, const BuildingModel& model,
                                           const PsiCoefficients& psi);

}  // namespace embo::cli
