#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "embo/dynamics.hpp"
#include "embo/gain.hpp"
#include "embo/hysteresis.hpp"
#include "embo/structure.hpp"

namespace embo::testing {

inline SawsParameters saws() {
  SawsParameters p;
  p.f0 = 8.0;
  p.fi = 1.3;
  p.du = 60.0;
  p.s0 = 1.2;
  p.r1 = 0.06;
  p.r2 = -0.05;
  p.r3 = 1.1;
  p.r4 = 0.02;
  p.alpha = 0.8;
  p.beta = 1.1;
  return p;
}

/// A wall that behaves linearly (slope S0 on every branch) for drifts far
/// below F0/S0: unloading at S0, zero pinching intercept, pinching at S0, and
/// R1 = 1/2 so the backbone has no second-order term.
inline SawsParameters linear_saws(double s0) {
  SawsParameters p;
  p.f0 = 1e5;
  p.fi = 0.0;
  p.du = 1e6;
  p.s0 = s0;
  p.r1 = 0.5;
  p.r2 = -0.05;
  p.r3 = 1.0;
  p.r4 = 1.0;
  p.alpha = 0.8;
  p.beta = 1e-3;
  return p;
}

inline WallDamageParams wall_damage_params() { return {100.0, 8.0, 6.0, 1.0}; }

/// n stories, each with two x-walls at y = +-2 m and two y-walls at x = +-3 m.
/// Strength and stiffness scaled by `scale`; story masses m_t tonne.
inline BuildingModel box_building(int stories, double scale = 4.0, double m_t = 20.0,
                                  double zeta = 0.02) {
  BuildingModel m;
  m.layout.n_stories = stories;
  m.layout.story_heights.assign(static_cast<std::size_t>(stories), 3.0);
  std::vector<double> mass(static_cast<std::size_t>(stories), m_t);
  std::vector<double> inertia(static_cast<std::size_t>(stories), m_t * (36.0 + 16.0) / 12.0);
  m.mass = lumped_mass(mass, inertia);
  for (int s = 1; s <= stories; ++s) {
    const double taper = 1.0 - 0.1 * (s - 1);
    int i = 0;
    for (double y : {-2.0, 2.0}) {
      WallPlacement w;
      w.wall_id = "S" + std::to_string(s) + "X" + std::to_string(++i);
      w.story = s;
      w.origin = {0.0, y};
      w.direction = {1.0, 0.0};
      w.params = saws();
      w.params.f0 *= scale * taper * (y < 0 ? 1.0 : 1.2);
      w.params.fi *= scale * taper * (y < 0 ? 1.0 : 1.2);
      w.params.s0 *= scale * taper * (y < 0 ? 1.0 : 1.2);
      w.damage = wall_damage_params();
      w.damage.f_ey *= scale;
      m.walls.push_back(w);
    }
    i = 0;
    for (double x : {-3.0, 3.0}) {
      WallPlacement w;
      w.wall_id = "S" + std::to_string(s) + "Y" + std::to_string(++i);
      w.story = s;
      w.origin = {x, 0.0};
      w.direction = {0.0, 1.0};
      w.params = saws();
      w.params.f0 *= scale * taper;
      w.params.fi *= scale * taper;
      w.params.s0 *= scale * taper;
      w.damage = wall_damage_params();
      w.damage.f_ey *= scale;
      m.walls.push_back(w);
    }
  }
  const Matrix k0 = linear_stiffness(m);
  const Vector w = natural_frequencies(m.mass, k0);
  m.damping = rayleigh_damping(m.mass, k0, zeta, w[0], zeta, w[w.size() - 1]);
  m.b1 = horizontal_influence(m.layout);
  m.b2 = m.mass * m.b1;
  m.validate();
  return m;
}

/// One story, symmetric plan of linear walls: x response decouples as an
/// SDOF of mass m_t and natural frequency f_hz.
inline BuildingModel linear_story(double m_t, double f_hz, double zeta) {
  BuildingModel m;
  m.layout.n_stories = 1;
  m.layout.story_heights = {3.0};
  m.mass = lumped_mass({m_t}, {m_t * 4.0});
  const double k = m_t * std::pow(2 * M_PI * f_hz, 2);  // kN/m
  const double s0 = 0.5 * k / kMillimetresPerMetre;
  const std::array<std::pair<std::array<double, 2>, std::array<double, 2>>, 4> placements{{
      {{0.0, -2.0}, {1.0, 0.0}}, {{0.0, 2.0}, {1.0, 0.0}}, {{-2.0, 0.0}, {0.0, 1.0}}, {{2.0, 0.0}, {0.0, 1.0}}}};
  int i = 0;
  for (const auto& [o, d] : placements) {
    WallPlacement w;
    w.wall_id = "L" + std::to_string(++i);
    w.origin = o;
    w.direction = d;
    w.params = linear_saws(s0);
    w.damage = wall_damage_params();
    m.walls.push_back(w);
  }
  const Matrix k0 = linear_stiffness(m);
  const Vector w = natural_frequencies(m.mass, k0);
  m.damping = rayleigh_damping(m.mass, k0, zeta, w[0], zeta, w[2]);
  m.b1 = horizontal_influence(m.layout);
  m.b2 = m.mass * m.b1;
  m.validate();
  return m;
}

/// Linear single-DoF model m = 1, with given stiffness and damping.
inline LinearizedModel sdof(double k = 1.0, double c = 0.1, double m = 1.0) {
  LinearizedModel lin;
  lin.mass = Matrix::Constant(1, 1, m);
  lin.damping = Matrix::Constant(1, 1, c);
  lin.stiffness = Matrix::Constant(1, 1, k);
  lin.b2 = Matrix::Constant(1, 1, m);
  return lin;
}

/// Two-component ground acceleration: windowed sum of sinusoids, m/s^2.
inline Matrix shaking(int steps, double dt, double pga, double f1 = 1.3, double f2 = 2.1) {
  Matrix ug(2, steps);
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const double T = (steps - 1) * dt;
    const double win = std::sin(M_PI * t / T);
    ug(0, k) = pga * win * win * std::sin(2 * M_PI * f1 * t);
    ug(1, k) = 0.8 * pga * win * win * std::sin(2 * M_PI * f2 * t + 0.4);
  }
  return ug;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("embo_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::filesystem::path fixtures_dir() { return EMBO_FIXTURES_DIR; }

}  // namespace embo::testing
