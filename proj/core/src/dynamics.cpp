#include "embo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace embo {
namespace {

struct Kinematics {
  Vector q, v, a;
  std::vector<HystereticWallState> walls;
};

struct StepOutcome {
  bool converged = false;
  double residual = 0.0;
};

class NewmarkStepper {
 public:
  NewmarkStepper(const BuildingModel& model, const Matrix& damping,
                 const IntegratorSettings& settings)
      : model_(model), damping_(damping), settings_(settings), maps_(model.drift_maps()) {}

  // One Newmark step of length h. Newton iterates on the new acceleration;
  // wall states in `from` are never touched, only the converged trial states
  // are copied into `to`.
  StepOutcome step(const Kinematics& from, const Vector& load, double h, Kinematics& to) const {
    const double beta = settings_.beta;
    const double gamma = settings_.gamma;
    const Vector q_pred = from.q + h * from.v + h * h * (0.5 - beta) * from.a;
    const Vector v_pred = from.v + h * (1.0 - gamma) * from.a;

    Vector a = from.a;
    StepOutcome out;
    for (int it = 0; it <= settings_.newton_max_iter; ++it) {
      const Vector q = q_pred + beta * h * h * a;
      const Vector v = v_pred + gamma * h * a;
      RestoringResult r = global_restoring(model_, maps_, from.walls, q);
      const Vector residual = load - model_.mass * a - damping_ * v - r.force;
      out.residual = residual.norm();
      if (!std::isfinite(out.residual)) return out;
      if (out.residual <= settings_.newton_tol) {
        to.q = q;
        to.v = v;
        to.a = std::move(a);
        to.walls = std::move(r.states);
        out.converged = true;
        return out;
      }
      if (it == settings_.newton_max_iter) break;
      const Matrix jacobian = model_.mass + gamma * h * damping_ + beta * h * h * r.tangent;
      a += jacobian.partialPivLu().solve(residual);
    }
    return out;
  }

  // Advances over [t, t+h] with loads interpolated linearly, halving the
  // step on Newton failure up to max_bisections times.
  StepOutcome advance(const Kinematics& from, const Vector& load0, const Vector& load1,
                      double h, int depth, Kinematics& to, int& bisected) const {
    StepOutcome out = step(from, load1, h, to);
    if (out.converged || depth >= settings_.max_bisections) return out;
    if (depth == 0) ++bisected;
    const Vector mid = 0.5 * (load0 + load1);
    Kinematics half;
    StepOutcome first = advance(from, load0, mid, 0.5 * h, depth + 1, half, bisected);
    if (!first.converged) return first;
    return advance(half, mid, load1, 0.5 * h, depth + 1, to, bisected);
  }

 private:
  const BuildingModel& model_;
  const Matrix& damping_;
  const IntegratorSettings& settings_;
  std::vector<DriftMap> maps_;
};

void record(ResponseHistory& h, int k, const Kinematics& s) {
  h.q.col(k) = s.q;
  h.dq.col(k) = s.v;
  h.ddq.col(k) = s.a;
  for (std::size_t w = 0; w < s.walls.size(); ++w) {
    h.wall_drift(w, k) = s.walls[w].d;
    h.wall_force(w, k) = s.walls[w].f;
    h.wall_energy(w, k) = s.walls[w].e_hyst;
    h.wall_work(w, k) = s.walls[w].work;
  }
}

}  // namespace

void IntegratorSettings::validate() const {
  if (!(dt > 0.0 && std::isfinite(dt))) throw InputError("IntegratorSettings: dt must be > 0");
  if (!(beta >= 0.0 && beta <= 0.5)) throw InputError("IntegratorSettings: beta must lie in [0, 0.5]");
  if (!(gamma >= 0.5 && gamma <= 1.0)) {
    throw InputError("IntegratorSettings: gamma must lie in [0.5, 1]");
  }
  if (!(newton_tol > 0.0)) throw InputError("IntegratorSettings: newton_tol must be > 0");
  if (newton_max_iter < 1) throw InputError("IntegratorSettings: newton_max_iter must be >= 1");
  if (max_bisections < 0) throw InputError("IntegratorSettings: max_bisections must be >= 0");
}

void ObserverConfig::validate(int n_dofs) const {
  if (gain.size() != static_cast<Eigen::Index>(measured_dofs.size())) {
    throw InputError("ObserverConfig: one gain per measured DoF required");
  }
  std::vector<int> seen;
  for (int d : measured_dofs) {
    if (d < 0 || d >= n_dofs) {
      throw InputError("ObserverConfig: measured DoF " + std::to_string(d) + " out of range");
    }
    if (std::find(seen.begin(), seen.end(), d) != seen.end()) {
      throw InputError("ObserverConfig: DoF " + std::to_string(d) + " measured twice");
    }
    seen.push_back(d);
  }
  for (Eigen::Index i = 0; i < gain.size(); ++i) {
    if (!(gain[i] >= 0.0 && std::isfinite(gain[i]))) {
      throw InputError("ObserverConfig: gains must be finite and >= 0");
    }
  }
}

Matrix ObserverConfig::c2(int n_dofs) const {
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(measured_dofs.size()), n_dofs);
  for (std::size_t i = 0; i < measured_dofs.size(); ++i) c(i, measured_dofs[i]) = 1.0;
  return c;
}

Matrix ObserverConfig::feedback_damping(int n_dofs) const {
  Matrix c = Matrix::Zero(n_dofs, n_dofs);
  for (std::size_t i = 0; i < measured_dofs.size(); ++i) {
    c(measured_dofs[i], measured_dofs[i]) += gain[i];
  }
  return c;
}

ResponseHistory integrate(const BuildingModel& model, const Matrix& damping,
                          const Matrix& loads, const IntegratorSettings& settings) {
  settings.validate();
  const int n = model.n_dofs();
  if (damping.rows() != n || damping.cols() != n) {
    throw InputError("integrate: damping must be n x n");
  }
  if (loads.rows() != n) throw InputError("integrate: loads must have n rows");
  const int steps = static_cast<int>(loads.cols());
  const int walls = model.n_walls();

  ResponseHistory h;
  h.t = Vector::Zero(steps);
  for (int k = 0; k < steps; ++k) h.t[k] = settings.dt * k;
  h.q = h.dq = h.ddq = Matrix::Zero(n, steps);
  h.wall_drift = h.wall_force = h.wall_energy = h.wall_work = Matrix::Zero(walls, steps);
  if (steps == 0) return h;

  const NewmarkStepper stepper(model, damping, settings);
  Kinematics state{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), virgin_states(model)};
  state.a = model.mass.llt().solve(loads.col(0));
  record(h, 0, state);

  for (int k = 1; k < steps; ++k) {
    Kinematics next;
    const StepOutcome out = stepper.advance(state, loads.col(k - 1), loads.col(k), settings.dt,
                                            0, next, h.bisected_steps);
    if (!out.converged) {
      std::ostringstream msg;
      msg << "Newton iteration failed at step " << k << " (t = " << h.t[k]
          << " s), residual " << out.residual << " kN";
      throw NumericalError(msg.str());
    }
    if (!next.q.allFinite() || !next.v.allFinite() || !next.a.allFinite()) {
      throw NumericalError("non-finite response at step " + std::to_string(k));
    }
    state = std::move(next);
    record(h, k, state);
  }
  return h;
}

Matrix ground_loads(const BuildingModel& model, const Matrix& ug) {
  if (ug.rows() != model.b1.cols()) {
    throw InputError("ground_loads: ug must have one row per ground component");
  }
  return -(model.mass * model.b1) * ug;
}

ResponseHistory simulate(const BuildingModel& model, const Matrix& ug,
                         const IntegratorSettings& settings) {
  return integrate(model, model.damping, ground_loads(model, ug), settings);
}

Matrix feedback_loads(const ObserverConfig& obs, int n_dofs, const Matrix& y) {
  obs.validate(n_dofs);
  if (y.rows() != static_cast<Eigen::Index>(obs.measured_dofs.size())) {
    throw InputError("feedback_loads: y must have one row per measured DoF");
  }
  Matrix loads = Matrix::Zero(n_dofs, y.cols());
  for (std::size_t i = 0; i < obs.measured_dofs.size(); ++i) {
    loads.row(obs.measured_dofs[i]) += obs.gain[i] * y.row(i);
  }
  return loads;
}

ResponseHistory observe(const BuildingModel& model, const ObserverConfig& obs,
                        const Matrix& y, const IntegratorSettings& settings) {
  const int n = model.n_dofs();
  const Matrix loads = feedback_loads(obs, n, y);
  return integrate(model, model.damping + obs.feedback_damping(n), loads, settings);
}

WallTraces drift_histories(const ResponseHistory& h, const BuildingModel& model) {
  const auto maps = model.drift_maps();
  WallTraces out{Matrix::Zero(model.n_walls(), h.steps()), h.wall_force};
  for (int k = 0; k < h.steps(); ++k) {
    const Vector q = h.q.col(k);
    for (std::size_t w = 0; w < maps.size(); ++w) out.drift(w, k) = wall_drift_mm(maps[w], q);
  }
  return out;
}

Matrix story_drifts(const ResponseHistory& h, const FloorLayout& layout) {
  Matrix d = Matrix::Zero(2 * layout.n_stories, h.steps());
  for (int s = 1; s <= layout.n_stories; ++s) {
    for (int c = 0; c < 2; ++c) {
      d.row(2 * (s - 1) + c) = h.q.row(FloorLayout::dof(s, c));
      if (s > 1) d.row(2 * (s - 1) + c) -= h.q.row(FloorLayout::dof(s - 1, c));
    }
  }
  return d;
}

EnergyBalance energy_balance(const ResponseHistory& h, const BuildingModel& model,
                             const Matrix& damping, const Matrix& loads) {
  const int steps = h.steps();
  if (loads.cols() != steps) throw InputError("energy_balance: loads/history length mismatch");
  EnergyBalance e;
  e.input = e.kinetic = e.viscous = e.wall = e.relative_error = Vector::Zero(steps);
  double scale = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Vector v = h.dq.col(k);
    e.kinetic[k] = 0.5 * v.dot(model.mass * v);
    e.wall[k] = h.wall_work.col(k).sum() / kMillimetresPerMetre;
    if (k > 0) {
      const Vector dq = h.q.col(k) - h.q.col(k - 1);
      const Vector v0 = h.dq.col(k - 1);
      e.input[k] = e.input[k - 1] + 0.5 * (loads.col(k - 1) + loads.col(k)).dot(dq);
      e.viscous[k] = e.viscous[k - 1] + 0.5 * (damping * (v0 + v)).dot(dq);
    }
    const double stored = e.kinetic[k] + e.viscous[k] + e.wall[k];
    scale = std::max({scale, std::abs(e.input[k]), std::abs(stored)});
    const double mismatch = std::abs(e.input[k] - stored);
    e.relative_error[k] = mismatch == 0.0 ? 0.0 : mismatch / std::max(scale, 1e-300);
    e.max_relative_error = std::max(e.max_relative_error, e.relative_error[k]);
  }
  return e;
}

}  // namespace embo
