#include "embo/structure.hpp"

#include <cmath>
#include <string>

namespace embo {
namespace {

bool is_symmetric(const Matrix& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

void FloorLayout::validate() const {
  if (n_stories < 1) throw InputError("FloorLayout: need at least one story");
  if (static_cast<int>(story_heights.size()) != n_stories) {
    throw InputError("FloorLayout: one height per story required");
  }
  for (double h : story_heights) {
    if (!(h > 0.0)) throw InputError("FloorLayout: story heights must be > 0");
  }
}

void BuildingModel::validate() const {
  layout.validate();
  const int n = n_dofs();
  if (mass.rows() != n || mass.cols() != n) throw InputError("BuildingModel: M must be n x n");
  if (damping.rows() != n || damping.cols() != n) {
    throw InputError("BuildingModel: C_D must be n x n");
  }
  if (b1.rows() != n) throw InputError("BuildingModel: b1 must have n rows");
  if (b2.rows() != n) throw InputError("BuildingModel: b2 must have n rows");
  if (!is_symmetric(mass)) throw InputError("BuildingModel: M must be symmetric");
  if (!is_symmetric(damping)) throw InputError("BuildingModel: C_D must be symmetric");
  if (Eigen::LLT<Matrix>(mass).info() != Eigen::Success) {
    throw InputError("BuildingModel: M must be positive definite");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> ce(damping, Eigen::EigenvaluesOnly);
  const double cscale = std::max(1.0, damping.cwiseAbs().maxCoeff());
  if (n > 0 && ce.eigenvalues().minCoeff() < -1e-10 * cscale) {
    throw InputError("BuildingModel: C_D must be positive semidefinite");
  }
  for (const auto& w : walls) {
    if (w.story < 1 || w.story > layout.n_stories) {
      throw InputError("wall " + w.wall_id + ": story " + std::to_string(w.story) +
                       " does not exist");
    }
    const double norm = std::hypot(w.direction[0], w.direction[1]);
    if (std::abs(norm - 1.0) > 1e-9) {
      throw InputError("wall " + w.wall_id + ": direction must have unit norm");
    }
    try {
      w.params.validate();
    } catch (const InputError& e) {
      throw InputError("wall " + w.wall_id + ": " + e.what());
    }
  }
}

std::vector<DriftMap> BuildingModel::drift_maps() const {
  std::vector<DriftMap> maps;
  maps.reserve(walls.size());
  for (const auto& w : walls) maps.push_back(wall_drift_map(layout, w));
  return maps;
}

Matrix lumped_mass(const std::vector<double>& floor_masses,
                   const std::vector<double>& rotational_inertias) {
  if (floor_masses.size() != rotational_inertias.size()) {
    throw InputError("lumped_mass: one rotational inertia per floor mass required");
  }
  const int floors = static_cast<int>(floor_masses.size());
  Matrix m = Matrix::Zero(3 * floors, 3 * floors);
  for (int i = 0; i < floors; ++i) {
    if (!(floor_masses[i] > 0.0 && rotational_inertias[i] > 0.0)) {
      throw InputError("lumped_mass: floor masses and inertias must be > 0");
    }
    m(3 * i, 3 * i) = floor_masses[i];
    m(3 * i + 1, 3 * i + 1) = floor_masses[i];
    m(3 * i + 2, 3 * i + 2) = rotational_inertias[i];
  }
  return m;
}

Matrix horizontal_influence(const FloorLayout& layout) {
  Matrix b = Matrix::Zero(layout.n_dofs(), 2);
  for (int f = 1; f <= layout.n_stories; ++f) {
    b(FloorLayout::dof(f, 0), 0) = 1.0;
    b(FloorLayout::dof(f, 1), 1) = 1.0;
  }
  return b;
}

DriftMap wall_drift_map(const FloorLayout& layout, const WallPlacement& w) {
  if (w.story < 1 || w.story > layout.n_stories) {
    throw InputError("wall " + w.wall_id + ": story " + std::to_string(w.story) +
                     " does not exist");
  }
  const auto [x0, y0] = w.origin;
  const auto [cx, cy] = w.direction;
  // Point (x0, y0) on a rigid floor moves by (ux - theta*y0, uy + theta*x0).
  const double lever = cy * x0 - cx * y0;
  const std::array<double, 3> row{cx, cy, lever};

  DriftMap t;
  for (int c = 0; c < 3; ++c) {
    if (row[c] == 0.0) continue;
    if (w.story > 1) t.entries.emplace_back(FloorLayout::dof(w.story - 1, c), -row[c]);
    t.entries.emplace_back(FloorLayout::dof(w.story, c), row[c]);
  }
  return t;
}

Eigen::RowVectorXd dense_drift_map(const FloorLayout& layout, const WallPlacement& w) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(layout.n_dofs());
  for (const auto& [i, c] : wall_drift_map(layout, w).entries) row[i] = c;
  return row;
}

RestoringResult global_restoring(const BuildingModel& model,
                                 const std::vector<DriftMap>& maps,
                                 const std::vector<HystereticWallState>& states,
                                 const Vector& q) {
  const int n = model.n_dofs();
  if (q.size() != n) throw InputError("global_restoring: q has wrong length");
  if (states.size() != model.walls.size() || maps.size() != model.walls.size()) {
    throw InputError("global_restoring: one state and one drift map per wall required");
  }
  RestoringResult out{Vector::Zero(n), Matrix::Zero(n, n), {}};
  out.states.reserve(states.size());
  for (std::size_t w = 0; w < states.size(); ++w) {
    const auto& t = maps[w].entries;
    const WallStep step = step_wall(states[w], model.walls[w].params, wall_drift_mm(maps[w], q));
    const double k = step.tangent * kMillimetresPerMetre;
    for (const auto& [i, ci] : t) {
      out.force[i] += ci * step.force;
      for (const auto& [j, cj] : t) out.tangent(i, j) += ci * k * cj;
    }
    out.states.push_back(step.state);
  }
  return out;
}

RestoringResult global_restoring(const BuildingModel& model,
                                 const std::vector<HystereticWallState>& states,
                                 const Vector& q) {
  return global_restoring(model, model.drift_maps(), states, q);
}

std::vector<HystereticWallState> virgin_states(const BuildingModel& model) {
  std::vector<HystereticWallState> s;
  s.reserve(model.walls.size());
  for (const auto& w : model.walls) s.push_back(HystereticWallState::virgin(w.params));
  return s;
}

Matrix linear_stiffness(const BuildingModel& model) {
  const int n = model.n_dofs();
  Matrix k0 = Matrix::Zero(n, n);
  for (const auto& w : model.walls) {
    const double k = initial_stiffness(w.params) * kMillimetresPerMetre;
    const auto t = wall_drift_map(model.layout, w);
    for (const auto& [i, ci] : t.entries) {
      for (const auto& [j, cj] : t.entries) k0(i, j) += ci * k * cj;
    }
  }
  return k0;
}

std::vector<int> unrestrained_dofs(const Matrix& k0) {
  std::vector<int> free;
  for (int i = 0; i < k0.rows(); ++i) {
    if (k0(i, i) == 0.0) free.push_back(i);
  }
  return free;
}

Vector natural_frequencies(const Matrix& mass, const Matrix& stiffness) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(stiffness, mass, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("natural_frequencies: eigensolver failed");
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

Matrix rayleigh_damping(const Matrix& mass, const Matrix& stiffness,
                        double zeta1, double omega1, double zeta2, double omega2) {
  if (!(omega1 > 0.0 && omega2 > 0.0)) {
    throw InputError("rayleigh_damping: target frequencies must be > 0");
  }
  if (std::abs(omega1 - omega2) <= 1e-12 * std::max(omega1, omega2)) {
    throw InputError("rayleigh_damping: target frequencies must be distinct");
  }
  if (zeta1 < 0.0 || zeta2 < 0.0) throw InputError("rayleigh_damping: ratios must be >= 0");
  // zeta(w) = a0/(2w) + a1 w/2 solved at the two targets.
  const double den = omega2 * omega2 - omega1 * omega1;
  const double a0 = 2.0 * omega1 * omega2 * (zeta1 * omega2 - zeta2 * omega1) / den;
  const double a1 = 2.0 * (zeta2 * omega2 - zeta1 * omega1) / den;
  return a0 * mass + a1 * stiffness;
}

}  // namespace embo
