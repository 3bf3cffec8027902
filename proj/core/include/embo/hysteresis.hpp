#pragma once

#include <cstdint>
#include <string_view>

namespace embo {

/// Ten-parameter SAWS (CUREE) shear-wall law. Forces in kN, drifts in mm.
struct SawsParameters {
  double f0 = 0.0;     ///< backbone force intercept F0
  double fi = 0.0;     ///< pinching-path force intercept FI
  double du = 0.0;     ///< drift at peak backbone force DU
  double s0 = 0.0;     ///< initial stiffness S0 (kN/mm)
  double r1 = 0.0;     ///< post-initial backbone stiffness ratio
  double r2 = 0.0;     ///< post-capping stiffness ratio (negative)
  double r3 = 0.0;     ///< unloading stiffness ratio
  double r4 = 0.0;     ///< pinching stiffness ratio
  double alpha = 0.0;  ///< reloading stiffness-degradation exponent
  double beta = 0.0;   ///< reloading-degradation displacement factor

  /// Throws InputError naming the first violated constraint.
  void validate() const;

  /// Unloading slope R3*S0; also the stiffness used to strip recoverable
  /// elastic energy from the dissipation measure.
  double unloading_stiffness() const { return r3 * s0; }

  /// Peak force on the backbone, reached at d = DU.
  double peak_force() const;
};

/// Park-Ang inputs that belong to a wall type rather than to its response.
struct WallDamageParams {
  double delta_u = 0.0;  ///< ultimate monotonic deformation (mm)
  double f_ey = 0.0;     ///< equivalent yield force (kN)
  double x_ns = 0.0;     ///< nail spacing (in)
  double x_wh = 0.0;     ///< width-to-height ratio

  void validate() const;
};

enum class Branch : std::uint8_t {
  kVirgin,     // no motion yet
  kEnvelope,   // rising backbone
  kSoftening,  // post-capping descent
  kResidual,   // softened branch clamped at zero force
  kUnloading,  // R3*S0 line from the last reversal
  kSlip,       // force held at the reversal floor (zero-force slip when floor is 0)
  kPinching,   // FI + R4*S0*d
  kReloading,  // degraded line aimed at the previous peak
  kTargetCap,  // pinching line capped at the target force
};

std::string_view to_string(Branch b);

/// Path-dependent state of a single wall. Plain value; step_wall returns a new one.
struct HystereticWallState {
  double d = 0.0;            ///< current drift (mm)
  double f = 0.0;            ///< current force (kN)
  double k = 0.0;            ///< tangent at (d, f) along the last direction of travel
  double d_max_pos = 0.0;    ///< largest positive drift reached (>= 0)
  double d_max_neg = 0.0;    ///< most negative drift reached (<= 0)
  double e_hyst = 0.0;       ///< dissipated energy (kN*mm), nondecreasing
  double work = 0.0;         ///< running trapezoidal integral of f dd (kN*mm)
  double d_rev = 0.0;        ///< drift at the last load reversal
  double f_rev = 0.0;        ///< force at the last load reversal
  std::int8_t direction = 0; ///< +1, -1, or 0 before the first move
  Branch branch = Branch::kVirgin;

  static HystereticWallState virgin(const SawsParameters& p);
};

struct WallStep {
  HystereticWallState state;
  double force = 0.0;    ///< kN
  double tangent = 0.0;  ///< kN/mm
};

/// Monotonic envelope force at drift d; odd in d, clamped at zero past the
/// softening branch.
double backbone_force(const SawsParameters& p, double d);

/// Slope of the virgin branch at the origin.
double initial_stiffness(const SawsParameters& p);

/// Advances a wall to drift d_next. The committed state is not modified, so
/// Newton trial evaluations can call this repeatedly from the same state.
WallStep step_wall(const HystereticWallState& state, const SawsParameters& p,
                   double d_next);

}  // namespace embo
