#pragma once

#include <vector>

#include "embo/common.hpp"
#include "embo/structure.hpp"

namespace embo {

/// Newmark parameters and Newton controls. Defaults are average acceleration.
struct IntegratorSettings {
  double dt = 0.01;           ///< s
  double beta = 0.25;
  double gamma = 0.5;
  double newton_tol = 1e-6;   ///< residual 2-norm, kN
  int newton_max_iter = 40;
  int max_bisections = 4;     ///< local dt halvings before giving up

  void validate() const;
};

/// Measured DoFs and the diagonal of E. Row i of c2 selects measured_dofs[i].
struct ObserverConfig {
  std::vector<int> measured_dofs;
  Vector gain;  ///< diag(E), one nonnegative entry per measured DoF

  void validate(int n_dofs) const;
  Matrix c2(int n_dofs) const;
  /// c2^T E c2: grounded dampers at the measured DoFs.
  Matrix feedback_damping(int n_dofs) const;
};

/// Time-aligned response. DoF arrays are n x steps; wall arrays are
/// walls x steps with drifts in mm, forces in kN and energies in kN*mm.
struct ResponseHistory {
  Vector t;
  Matrix q, dq, ddq;
  Matrix wall_drift, wall_force, wall_energy;
  Matrix wall_work;  ///< running integral of f dd per wall (stored + dissipated)
  int bisected_steps = 0;

  int steps() const { return static_cast<int>(t.size()); }
};

/// Shared Newmark/Newton integrator: M a + C v + F_r(q) = loads(t), from rest.
/// loads is n x steps sampled on the dt grid.
ResponseHistory integrate(const BuildingModel& model, const Matrix& damping,
                          const Matrix& loads, const IntegratorSettings& settings);

/// -M b1 ug for ground accelerations ug (r x steps, m/s^2).
Matrix ground_loads(const BuildingModel& model, const Matrix& ug);

/// Forward model under ground acceleration.
ResponseHistory simulate(const BuildingModel& model, const Matrix& ug,
                         const IntegratorSettings& settings);

/// c2^T E y for velocity feedback y (m x steps, m/s).
Matrix feedback_loads(const ObserverConfig& obs, int n_dofs, const Matrix& y);

/// Observer: same model with damping C_D + c2^T E c2 driven by c2^T E y.
ResponseHistory observe(const BuildingModel& model, const ObserverConfig& obs,
                        const Matrix& y, const IntegratorSettings& settings);

struct WallTraces {
  Matrix drift;  ///< walls x steps, mm, recomputed as T_w q
  Matrix force;  ///< walls x steps, kN
};

WallTraces drift_histories(const ResponseHistory& h, const BuildingModel& model);

/// Inter-story drift of the mass center (m), one row per story and
/// direction: row 2(s-1) is x, row 2(s-1)+1 is y.
Matrix story_drifts(const ResponseHistory& h, const FloorLayout& layout);

/// Cumulative energy terms (kN*m) per step.
struct EnergyBalance {
  Vector input;
  Vector kinetic;
  Vector viscous;
  Vector wall;
  Vector relative_error;
  double max_relative_error = 0.0;
};

/// Audits input = kinetic + viscous + wall work from the stored traces.
EnergyBalance energy_balance(const ResponseHistory& h, const BuildingModel& model,
                             const Matrix& damping, const Matrix& loads);

}  // namespace embo
