#pragma once

#include <vector>

#include "embo/common.hpp"
#include "embo/dynamics.hpp"
#include "embo/optim.hpp"
#include "embo/structure.hpp"

namespace embo {

/// Linear model about the virgin origin: M, C_D, K0 and the process-noise map.
struct LinearizedModel {
  Matrix mass;
  Matrix damping;
  Matrix stiffness;
  Matrix b2;

  int n_dofs() const { return static_cast<int>(mass.rows()); }
  static LinearizedModel from(const BuildingModel& model);
};

/// Frequency-constant two-sided PSDs (per rad/s): E[x^2] = integral of S over
/// the whole real line.
struct NoiseModel {
  Matrix s_ww;  ///< p x p process noise
  Matrix s_vv;  ///< m x m measurement noise

  void validate(int p, int m) const;
  NoiseModel scaled(double factor) const { return {factor * s_ww, factor * s_vv}; }
};

struct GridSettings {
  int log_points = 2048;
  double lower_ratio = 1e-3;     ///< lowest log point as a fraction of omega_max
  double upper_factor = 4.0;     ///< omega_max over the highest undamped frequency
  int peak_points = 64;          ///< linear points added around each mode
  double peak_half_width = 0.1;  ///< relative half-width of each refinement band
};

/// Nonnegative frequencies (rad/s) with trapezoidal weights over [0, omega_max].
struct FrequencyGrid {
  Vector omegas;
  Vector weights;

  void validate() const;
  double upper() const { return omegas.size() ? omegas[omegas.size() - 1] : 0.0; }

  /// Log-spaced grid plus refinement around the undamped modes of (M, K).
  static FrequencyGrid for_model(const Matrix& mass, const Matrix& stiffness,
                                 const GridSettings& settings = {});
  /// Trapezoidal weights on arbitrary increasing nodes.
  static FrequencyGrid from_nodes(Vector omegas);
};

/// H_o(w) = (-M w^2 + i w (C_D + c2^T E c2) + K0)^-1.
ComplexMatrix error_transfer(const LinearizedModel& lin, const ObserverConfig& obs, double omega);

/// Phi_ee = H b2 S_ww b2^T H* + H c2^T E S_vv E c2 H*.
ComplexMatrix error_psd(const ComplexMatrix& h, const LinearizedModel& lin,
                        const ObserverConfig& obs, const NoiseModel& noise);

/// J = tr(P), P = integral of Phi_ee over the real line (negative half by symmetry).
double trace_P(const LinearizedModel& lin, const ObserverConfig& obs, const NoiseModel& noise,
               const FrequencyGrid& grid, int threads = 1);

struct GainSettings {
  int starts = 5;
  double start_span_decades = 4.0;  ///< starts spread evenly over this span
  double search_span_decades = 8.0; ///< log10(E) kept within +/- this of the reference
  SimplexSettings simplex{0.5, 1e-4, 1e-10, 4000};
  int threads = 1;
};

struct GainResult {
  std::vector<int> measured_dofs;
  Vector gain;                 ///< diag(E*)
  double j_optimum = 0.0;
  double j_zero = 0.0;         ///< J(E = 0)
  double j_initial = 0.0;      ///< J at the best starting iterate
  Vector reference_gain;       ///< per-channel critical-damping scale used to place starts
  int iterations = 0;
  int evaluations = 0;
  double simplex_size = 0.0;   ///< in decades
  bool converged = false;
  bool stagnated = false;      ///< best start hit the evaluation limit
};

/// Minimizes tr(P) over nonnegative diagonal E by multi-start simplex search
/// in log10(E) coordinates.
GainResult optimize_gain(const LinearizedModel& lin, const std::vector<int>& measured_dofs,
                         const NoiseModel& noise, const FrequencyGrid& grid,
                         const GainSettings& settings = {});

}  // namespace embo
