#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "embo/hysteresis.hpp"
#include "embo/structure.hpp"

namespace embo {

/// (beta0, beta1, beta2) of psi = b0 + b1 x_ns^2 + b2 x_ns^2 x_wh.
using PsiCoefficients = std::array<double, 3>;

/// Default regression coefficients for light-frame wood shear walls.
inline constexpr PsiCoefficients kLightFramePsi{1.121, 0.014, 0.026};

double psi(const PsiCoefficients& beta, double x_ns, double x_wh);

/// Dissipated energy of a drift/force trace (kN*mm): per-step trapezoidal
/// work less the change in recoverable energy f^2/(2 k_unload), negative
/// increments dropped. k_unload = infinity gives plain per-step work with
/// negative increments dropped.
double dissipated_energy(std::span<const double> drift, std::span<const double> force,
                         double k_unload = std::numeric_limits<double>::infinity());

struct DamageIndexResult {
  std::string wall_id;
  int story = 0;
  double delta_m = 0.0;       ///< peak |drift| (mm)
  double e_hyst_total = 0.0;  ///< kN*mm
  double psi = 0.0;
  double di = 0.0;
  bool collapse_range = false;  ///< di > 1
};

/// DI = delta_m/delta_u + psi * E / (F_ey delta_u).
DamageIndexResult damage_index(std::span<const double> drift, std::span<const double> force,
                               const WallDamageParams& dp, const PsiCoefficients& beta,
                               double k_unload = std::numeric_limits<double>::infinity());

/// Same formula from precomputed ingredients.
double damage_index_value(double delta_m, double e_hyst_total, double psi_value,
                          const WallDamageParams& dp);

struct StoryDamage {
  int story = 0;
  int walls = 0;
  double max_di = 0.0;
  double mean_di = 0.0;
  std::string worst_wall;
};

struct DamageReport {
  std::vector<DamageIndexResult> walls;  ///< sorted by decreasing DI, then wall id
  std::vector<StoryDamage> stories;      ///< one entry per story, ascending
  double building_max_di = 0.0;
  double building_mean_di = 0.0;
};

DamageReport damage_report(std::vector<DamageIndexResult> results, const FloorLayout& layout);

}  // namespace embo
