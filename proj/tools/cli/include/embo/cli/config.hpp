#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "embo/common.hpp"
#include "embo/damage.hpp"
#include "embo/dynamics.hpp"
#include "embo/gain.hpp"
#include "embo/signal.hpp"
#include "embo/structure.hpp"

namespace embo::cli {

inline constexpr int kConfigSchemaVersion = 1;

/// Configuration problems; the message starts with the JSON path at fault.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

struct GroundMotionSpec {
  std::filesystem::path file;  ///< resolved against the config directory
  std::string channel_x;       ///< empty when the component is absent
  std::string channel_y;
  double scale = 1.0;
};

struct InstrumentChannel {
  int dof = 0;
  double noise_intensity = 0.0;  ///< two-sided PSD of additive acceleration noise
};

struct GainSpec {
  bool has_noise_model = false;
  NoiseModel noise;
  GainSettings settings;
  GridSettings grid;
  std::optional<Vector> explicit_gain;
};

struct Thresholds {
  double peak_drift_error = 0.15;
  double wall_energy_error = 0.20;
  double energy_balance_error = 0.01;
};

struct ExperimentConfig {
  std::filesystem::path source;  ///< config file, empty when parsed from text
  std::string sha256;            ///< of the raw config bytes
  BuildingModel building;
  double observer_stiffness_scale = 1.0;
  GroundMotionSpec ground_motion;
  std::vector<InstrumentChannel> channels;
  GainSpec gain;
  IntegratorSettings integrator;
  HighPassSpec highpass;
  PsiCoefficients psi = kLightFramePsi;
  std::uint64_t seed = 1;
  Thresholds thresholds;
  std::filesystem::path output_dir = "out";
  bool history_csv = true;
  bool plots = true;

  std::vector<int> measured_dofs() const;
  /// The model the observer and the gain design use (wall stiffness scaled).
  BuildingModel observer_model() const;
};

/// Parses and validates the whole config before returning. Relative paths
/// resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "F3_ux" and friends back to a DoF index; throws ConfigError otherwise.
int parse_dof_label(const std::string& label, int n_floors);

}  // namespace embo::cli
