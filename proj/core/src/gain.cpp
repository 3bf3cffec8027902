#include "embo/gain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace embo {
namespace {

Matrix augmented_damping(const LinearizedModel& lin, const ObserverConfig& obs) {
  return lin.damping + obs.feedback_damping(lin.n_dofs());
}

ComplexMatrix dynamic_stiffness(const LinearizedModel& lin, const Matrix& c_aug, double omega) {
  ComplexMatrix z(lin.n_dofs(), lin.n_dofs());
  z.real() = lin.stiffness - omega * omega * lin.mass;
  z.imag() = omega * c_aug;
  return z;
}

// Symmetric square root factor L with L L^T = q (q is PSD up to round-off).
Matrix psd_factor(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (q + q.transpose()));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

// Excitation covariance density b2 S_ww b2^T + c2^T E S_vv E c2 (n x n).
Matrix excitation_density(const LinearizedModel& lin, const ObserverConfig& obs,
                          const NoiseModel& noise) {
  const Matrix ce = obs.c2(lin.n_dofs()).transpose() * obs.gain.asDiagonal();
  return lin.b2 * noise.s_ww * lin.b2.transpose() + ce * noise.s_vv * ce.transpose();
}

void check_psd(const Matrix& s, const char* name) {
  if (s.rows() != s.cols()) throw InputError(std::string("NoiseModel: ") + name + " must be square");
  if (s.size() == 0) return;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError(std::string("NoiseModel: ") + name + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw InputError(std::string("NoiseModel: ") + name + " must be positive semidefinite");
  }
}

// ||H(w) L||_F^2 through the state-space eigensystem A = V diag(lambda) V^-1:
// H L = U diag(d) W with U = [I 0] V, W = V^-1 [0; M^-1] L, d_j = 1/(i w - lambda_j),
// so the integrand is d^H (U^H U o (W W^H)^T) d. Disabled when V is ill-conditioned.
class ModalIntegrand {
 public:
  ModalIntegrand(const LinearizedModel& lin, const Matrix& c_aug, const Matrix& factor) {
    const Eigen::Index n = lin.n_dofs();
    Eigen::LLT<Matrix> mass(lin.mass);
    if (mass.info() != Eigen::Success) return;
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n).setIdentity();
    a.bottomLeftCorner(n, n) = -mass.solve(lin.stiffness);
    a.bottomRightCorner(n, n) = -mass.solve(c_aug);
    Eigen::EigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) return;
    const ComplexMatrix v = es.eigenvectors();
    Eigen::PartialPivLU<ComplexMatrix> lu(v);
    if (!(lu.rcond() > 1e-9)) return;
    lambda_ = es.eigenvalues();
    Matrix b = Matrix::Zero(2 * n, factor.cols());
    b.bottomRows(n) = mass.solve(factor);
    const ComplexMatrix w = lu.solve(b.cast<Complex>());
    const ComplexMatrix u = v.topRows(n);
    gamma_ = (u.adjoint() * u).cwiseProduct((w * w.adjoint()).transpose());
    usable_ = true;
  }

  bool usable() const { return usable_; }

  double operator()(double omega) const {
    const ComplexVector d = (Complex(0.0, omega) - lambda_.array()).inverse().matrix();
    return (d.adjoint() * gamma_ * d)(0, 0).real();
  }

 private:
  bool usable_ = false;
  ComplexVector lambda_;
  ComplexMatrix gamma_;
};

}  // namespace

LinearizedModel LinearizedModel::from(const BuildingModel& model) {
  return {model.mass, model.damping, linear_stiffness(model), model.b2};
}

void NoiseModel::validate(int p, int m) const {
  if (s_ww.rows() != p) throw InputError("NoiseModel: S_ww must be p x p");
  if (s_vv.rows() != m) throw InputError("NoiseModel: S_vv must be m x m");
  check_psd(s_ww, "S_ww");
  check_psd(s_vv, "S_vv");
}

void FrequencyGrid::validate() const {
  if (omegas.size() < 2 || weights.size() != omegas.size()) {
    throw InputError("FrequencyGrid: need at least two nodes with one weight each");
  }
  if (omegas[0] != 0.0) throw InputError("FrequencyGrid: grid must start at omega = 0");
  for (Eigen::Index i = 1; i < omegas.size(); ++i) {
    if (!(omegas[i] > omegas[i - 1])) throw InputError("FrequencyGrid: nodes must increase strictly");
  }
  if ((weights.array() <= 0.0).any()) throw InputError("FrequencyGrid: weights must be positive");
}

FrequencyGrid FrequencyGrid::from_nodes(Vector omegas) {
  FrequencyGrid g;
  const Eigen::Index n = omegas.size();
  g.weights = Vector::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = omegas[i + 1] - omegas[i];
    g.weights[i] += 0.5 * h;
    g.weights[i + 1] += 0.5 * h;
  }
  g.omegas = std::move(omegas);
  g.validate();
  return g;
}

FrequencyGrid FrequencyGrid::for_model(const Matrix& mass, const Matrix& stiffness,
                                       const GridSettings& settings) {
  const Vector modes = natural_frequencies(mass, stiffness);
  const double top = modes.maxCoeff();
  if (!(top > 0.0)) throw InputError("FrequencyGrid: stiffness has no positive modes");
  const double w_max = settings.upper_factor * top;
  const double w_min = settings.lower_ratio * w_max;

  std::vector<double> nodes{0.0};
  const double ratio = std::log(w_max / w_min);
  for (int i = 0; i < settings.log_points; ++i) {
    nodes.push_back(w_min * std::exp(ratio * i / std::max(1, settings.log_points - 1)));
  }
  for (Eigen::Index m = 0; m < modes.size(); ++m) {
    if (!(modes[m] > 0.0)) continue;
    const double lo = modes[m] * (1.0 - settings.peak_half_width);
    const double hi = std::min(w_max, modes[m] * (1.0 + settings.peak_half_width));
    for (int i = 0; i < settings.peak_points; ++i) {
      nodes.push_back(lo + (hi - lo) * i / std::max(1, settings.peak_points - 1));
    }
  }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> unique;
  for (double w : nodes) {
    if (w > w_max) continue;
    if (unique.empty() || w - unique.back() > 1e-12 * w_max) unique.push_back(w);
  }
  return from_nodes(Eigen::Map<const Vector>(unique.data(), static_cast<Eigen::Index>(unique.size())));
}

ComplexMatrix error_transfer(const LinearizedModel& lin, const ObserverConfig& obs, double omega) {
  const ComplexMatrix z = dynamic_stiffness(lin, augmented_damping(lin, obs), omega);
  Eigen::PartialPivLU<ComplexMatrix> lu(z);
  if (!(lu.rcond() > 1e-14)) {
    throw NumericalError("error_transfer: singular dynamic stiffness at omega = " +
                         std::to_string(omega));
  }
  return lu.inverse();
}

ComplexMatrix error_psd(const ComplexMatrix& h, const LinearizedModel& lin,
                        const ObserverConfig& obs, const NoiseModel& noise) {
  const ComplexMatrix q = excitation_density(lin, obs, noise).cast<Complex>();
  return h * q * h.adjoint();
}

double trace_P(const LinearizedModel& lin, const ObserverConfig& obs, const NoiseModel& noise,
               const FrequencyGrid& grid, int threads) {
  const int n = lin.n_dofs();
  obs.validate(n);
  noise.validate(static_cast<int>(lin.b2.cols()), static_cast<int>(obs.measured_dofs.size()));
  const Matrix c_aug = augmented_damping(lin, obs);
  const Matrix factor = psd_factor(excitation_density(lin, obs, noise));
  const ModalIntegrand modal(lin, c_aug, factor);

  const Eigen::Index count = grid.omegas.size();
  Vector traces = Vector::Zero(count);
  const ComplexMatrix cfactor = factor.cast<Complex>();
  auto work = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index k = begin; k < end; ++k) {
      const double w = grid.omegas[k];
      // tr(H Q H*) = ||H L||_F^2
      traces[k] = modal.usable() ? modal(w)
                                 : dynamic_stiffness(lin, c_aug, w).partialPivLu().solve(cfactor).squaredNorm();
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(std::max<Eigen::Index>(1, count)));
  if (workers == 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back(work, count * t / workers, count * (t + 1) / workers);
    }
  }

  double j = 0.0;
  for (Eigen::Index k = 0; k < count; ++k) {
    if (!std::isfinite(traces[k])) {
      throw NumericalError("trace_P: non-finite error spectrum at omega = " +
                           std::to_string(grid.omegas[k]) + " (undamped resonance on the grid?)");
    }
    j += grid.weights[k] * traces[k];
  }
  return 2.0 * j;
}

GainResult optimize_gain(const LinearizedModel& lin, const std::vector<int>& measured_dofs,
                         const NoiseModel& noise, const FrequencyGrid& grid,
                         const GainSettings& settings) {
  const int m = static_cast<int>(measured_dofs.size());
  if (m < 1) throw InputError("optimize_gain: at least one measured DoF required");
  if (settings.starts < 1) throw InputError("optimize_gain: at least one start required");

  GainResult out;
  out.measured_dofs = measured_dofs;
  out.reference_gain = Vector(m);
  for (int i = 0; i < m; ++i) {
    const int d = measured_dofs[i];
    if (d < 0 || d >= lin.n_dofs()) throw InputError("optimize_gain: measured DoF out of range");
    out.reference_gain[i] = 2.0 * std::sqrt(std::max(lin.stiffness(d, d), 0.0) * lin.mass(d, d));
    if (!(out.reference_gain[i] > 0.0)) out.reference_gain[i] = 1.0;
  }
  Vector log_ref = out.reference_gain.array().log10();

  auto objective = [&](const Vector& e) {
    return trace_P(lin, ObserverConfig{measured_dofs, e}, noise, grid, settings.threads);
  };
  auto to_gain = [&](const std::vector<double>& z) {
    Vector e(m);
    for (int i = 0; i < m; ++i) {
      const double zi = std::clamp(z[i], log_ref[i] - settings.search_span_decades,
                                   log_ref[i] + settings.search_span_decades);
      e[i] = std::pow(10.0, zi);
    }
    return e;
  };

  out.j_zero = objective(Vector::Zero(m));
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < settings.starts; ++s) {
    const double offset = settings.starts == 1
                              ? 0.0
                              : settings.start_span_decades * (static_cast<double>(s) / (settings.starts - 1) - 0.5);
    std::vector<double> z0(m);
    for (int i = 0; i < m; ++i) z0[i] = log_ref[i] + offset;
    const SimplexResult r = nelder_mead(
        [&](const std::vector<double>& z) { return objective(to_gain(z)); }, z0, settings.simplex);
    out.iterations += r.iterations;
    out.evaluations += r.evaluations;
    if (r.value < best) {
      best = r.value;
      out.gain = to_gain(r.x);
      out.j_optimum = r.value;
      out.j_initial = objective(to_gain(z0));
      out.simplex_size = r.simplex_size;
      out.converged = r.converged;
      out.stagnated = !r.converged;
    }
  }
  if (out.j_zero <= out.j_optimum) {
    out.gain = Vector::Zero(m);
    out.j_optimum = out.j_zero;
  }
  return out;
}

}  // namespace embo
