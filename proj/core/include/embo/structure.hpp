#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "embo/common.hpp"
#include "embo/hysteresis.hpp"

namespace embo {

/// Global DoF units: translations in m, rotations in rad, forces in kN,
/// masses in tonne. Wall laws work in mm, so drifts are scaled by this
/// factor on the way in and stiffnesses on the way out.
inline constexpr double kMillimetresPerMetre = 1000.0;

/// Rigid-diaphragm floor stack. Each floor carries (ux, uy, theta) about its
/// mass center; floor i (1-based) owns DoFs 3(i-1) .. 3(i-1)+2.
struct FloorLayout {
  static constexpr int kDofPerFloor = 3;

  int n_stories = 0;
  std::vector<double> story_heights;  ///< m

  int n_dofs() const { return kDofPerFloor * n_stories; }
  static int dof(int floor, int component) { return kDofPerFloor * (floor - 1) + component; }
  void validate() const;
};

struct WallPlacement {
  std::string wall_id;
  int story = 1;                          ///< 1-based; story s spans floors s-1 .. s
  std::array<double, 2> origin{};         ///< point on the wall line, m, relative to mass center
  std::array<double, 2> direction{1, 0};  ///< unit vector of the resisting axis
  SawsParameters params;
  WallDamageParams damage;
};

/// Sparse row T_w with wall drift (in model units) = T_w . q.
struct DriftMap {
  std::vector<std::pair<int, double>> entries;

  double apply(const Vector& q) const {
    double s = 0.0;
    for (const auto& [i, c] : entries) s += c * q[i];
    return s;
  }
};

struct BuildingModel {
  FloorLayout layout;
  std::vector<WallPlacement> walls;
  Matrix mass;     ///< M (n x n)
  Matrix damping;  ///< C_D (n x n)
  Matrix b1;       ///< ground-motion influence (n x r)
  Matrix b2;       ///< process-noise influence (n x p)

  int n_dofs() const { return layout.n_dofs(); }
  int n_walls() const { return static_cast<int>(walls.size()); }

  /// Checks symmetry/definiteness of M and C_D, b1/b2 row counts, wall data.
  void validate() const;
  /// Drift maps for every wall, in wall order.
  std::vector<DriftMap> drift_maps() const;
};

/// Lumped rigid-diaphragm mass: diag(m, m, J) per floor.
Matrix lumped_mass(const std::vector<double>& floor_masses,
                   const std::vector<double>& rotational_inertias);

/// Influence matrix for horizontal ground components along x (column 0) and
/// y (column 1).
Matrix horizontal_influence(const FloorLayout& layout);

/// Row vector T_w: wall-line displacement of story s minus story s-1,
/// projected on the wall direction, including the rotational lever arm.
DriftMap wall_drift_map(const FloorLayout& layout, const WallPlacement& w);
Eigen::RowVectorXd dense_drift_map(const FloorLayout& layout, const WallPlacement& w);

/// Wall drift in mm for global displacement q (m).
inline double wall_drift_mm(const DriftMap& t, const Vector& q) {
  return kMillimetresPerMetre * t.apply(q);
}

struct RestoringResult {
  Vector force;                              ///< F_r (kN, kN*m for rotations)
  Matrix tangent;                            ///< K_T (kN/m)
  std::vector<HystereticWallState> states;   ///< trial wall states at q
};

/// F_r = sum T^T f_w and K_T = sum T^T k_w T from trial wall steps.
RestoringResult global_restoring(const BuildingModel& model,
                                 const std::vector<DriftMap>& maps,
                                 const std::vector<HystereticWallState>& states,
                                 const Vector& q);
RestoringResult global_restoring(const BuildingModel& model,
                                 const std::vector<HystereticWallState>& states,
                                 const Vector& q);

std::vector<HystereticWallState> virgin_states(const BuildingModel& model);

/// K0 = sum T^T S0 T (virgin origin slopes).
Matrix linear_stiffness(const BuildingModel& model);

/// DoFs whose diagonal stiffness is zero.
std::vector<int> unrestrained_dofs(const Matrix& k0);

/// Undamped natural frequencies (rad/s, ascending) of (M, K).
Vector natural_frequencies(const Matrix& mass, const Matrix& stiffness);

/// C_D = a0 M + a1 K with modal ratio zeta1 at omega1 and zeta2 at omega2.
Matrix rayleigh_damping(const Matrix& mass, const Matrix& stiffness,
                        double zeta1, double omega1, double zeta2, double omega2);

}  // namespace embo
