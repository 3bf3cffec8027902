#include "embo/hysteresis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "embo/common.hpp"

namespace embo {
namespace {

struct Piece {
  double f;
  double k;
  Branch branch;
};

Piece lower(const Piece& a, const Piece& b) { return b.f < a.f ? b : a; }
Piece upper(const Piece& a, const Piece& b) { return b.f > a.f ? b : a; }

void require(bool ok, const char* what) {
  if (!ok) throw InputError(std::string("SawsParameters: ") + what);
}

// Largest slope of the exponential backbone, as a multiple of S0. The slope
// at the origin is S0; for R1 > 0.5 the curve steepens briefly before
// flattening toward R1*S0.
double max_backbone_slope_ratio(double r1) {
  if (2.0 * r1 <= 1.0) return 1.0;
  const double x = (2.0 * r1 - 1.0) / r1;
  return r1 + std::exp(-x) * (1.0 - r1 + r1 * x);
}

// Backbone for d >= 0 with its slope.
Piece envelope(const SawsParameters& p, double d) {
  if (d <= p.du) {
    const double e = std::exp(-p.s0 * d / p.f0);
    const double lin = p.f0 + p.r1 * p.s0 * d;
    return {lin * (1.0 - e), p.r1 * p.s0 * (1.0 - e) + lin * e * p.s0 / p.f0,
            Branch::kEnvelope};
  }
  const double f = p.peak_force() + p.r2 * p.s0 * (d - p.du);
  if (f <= 0.0) return {0.0, 0.0, Branch::kResidual};
  return {f, p.r2 * p.s0, Branch::kSoftening};
}

// Upper bound on force while moving in the positive direction, given the
// largest positive drift reached so far. Past the target the wall is back
// on the envelope; below it the bound is the pinching line (capped at the
// target force) or the degraded reloading line aimed at the target,
// whichever is higher.
Piece reload_bound(const SawsParameters& p, double target, double d) {
  if (d > target) return envelope(p, d);
  const double f_target = envelope(p, target).f;
  const double delta0 = p.f0 / p.s0;
  double k_reload = p.s0;
  if (p.beta * target > delta0) {
    k_reload = p.s0 * std::pow(delta0 / (p.beta * target), p.alpha);
  }
  const Piece reload{f_target + k_reload * (d - target), k_reload, Branch::kReloading};
  const Piece pinch = lower({p.fi + p.r4 * p.s0 * d, p.r4 * p.s0, Branch::kPinching},
                            {f_target, 0.0, Branch::kTargetCap});
  return upper(pinch, reload);
}

// Force while moving in the positive direction from reversal (d_rev, f_rev).
// Unloading at R3*S0 until the bound is met; negative forces always unload
// to zero before the pinching/reloading bound can take over.
Piece positive_path(const SawsParameters& p, double d_rev, double f_rev,
                    double target, double d) {
  const double k_u = p.unloading_stiffness();
  const Piece unload{f_rev + k_u * (d - d_rev), k_u, Branch::kUnloading};
  const Piece floor{std::max(0.0, f_rev), 0.0, Branch::kSlip};
  return lower(unload, upper(reload_bound(p, target, d), floor));
}

Piece path(const SawsParameters& p, const HystereticWallState& s, double d) {
  if (s.direction > 0) return positive_path(p, s.d_rev, s.f_rev, s.d_max_pos, d);
  // Mirror image of the positive rules.
  const Piece m = positive_path(p, -s.d_rev, -s.f_rev, -s.d_max_neg, -d);
  return {-m.f, m.k, m.branch};
}

}  // namespace

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::kVirgin: return "virgin";
    case Branch::kEnvelope: return "envelope";
    case Branch::kSoftening: return "softening";
    case Branch::kResidual: return "residual";
    case Branch::kUnloading: return "unloading";
    case Branch::kSlip: return "slip";
    case Branch::kPinching: return "pinching";
    case Branch::kReloading: return "reloading";
    case Branch::kTargetCap: return "target-cap";
  }
  return "unknown";
}

void SawsParameters::validate() const {
  for (double v : {f0, fi, du, s0, r1, r2, r3, r4, alpha, beta}) {
    require(std::isfinite(v), "all parameters must be finite");
  }
  require(f0 > 0.0, "F0 must be > 0");
  require(s0 > 0.0, "S0 must be > 0");
  require(du > 0.0, "DU must be > 0");
  require(fi >= 0.0, "FI must be >= 0");
  require(r1 > 0.0 && r1 < 1.0, "R1 must lie in (0, 1)");
  require(r2 < 0.0, "R2 must be < 0");
  require(r3 > 0.0, "R3 must be > 0");
  require(r4 > 0.0, "R4 must be > 0");
  require(alpha > 0.0, "ALPHA must be > 0");
  require(beta > 0.0, "BETA must be > 0");
  // Unloading must be at least as stiff as every other branch, otherwise the
  // dissipation measure can decrease.
  require(r3 >= max_backbone_slope_ratio(r1), "R3*S0 must not be softer than the backbone");
  require(r4 <= r3, "R4 must not exceed R3");
  require(std::isfinite(peak_force()) && peak_force() > 0.0,
          "backbone must produce a finite positive peak force");
}

double SawsParameters::peak_force() const {
  return (f0 + r1 * s0 * du) * (1.0 - std::exp(-s0 * du / f0));
}

void WallDamageParams::validate() const {
  auto check = [](double v, const char* what) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw InputError(std::string("WallDamageParams: ") + what + " must be > 0");
    }
  };
  check(delta_u, "delta_u");
  check(f_ey, "f_ey");
  check(x_ns, "x_ns");
  check(x_wh, "x_wh");
}

HystereticWallState HystereticWallState::virgin(const SawsParameters& p) {
  HystereticWallState s;
  s.k = initial_stiffness(p);
  return s;
}

double backbone_force(const SawsParameters& p, double d) {
  const double f = envelope(p, std::abs(d)).f;
  return d < 0.0 ? -f : f;
}

double initial_stiffness(const SawsParameters& p) { return p.s0; }

WallStep step_wall(const HystereticWallState& state, const SawsParameters& p,
                   double d_next) {
  const double delta = d_next - state.d;
  if (delta == 0.0) return {state, state.f, state.k};

  HystereticWallState next = state;
  const std::int8_t dir = delta > 0.0 ? 1 : -1;
  if (dir != state.direction) {
    next.direction = dir;
    next.d_rev = state.d;
    next.f_rev = state.f;
  }

  const Piece piece = path(p, next, d_next);
  next.d = d_next;
  next.f = piece.f;
  next.k = piece.k;
  next.branch = piece.branch;
  next.d_max_pos = std::max(state.d_max_pos, d_next);
  next.d_max_neg = std::min(state.d_max_neg, d_next);

  const double mean_force = 0.5 * (state.f + piece.f);
  next.work = state.work + mean_force * delta;
  // Work minus the change in recoverable energy f^2/(2 k_u). Exactly zero on
  // an unloading line; nonnegative elsewhere except across a zero crossing
  // of the force inside one step, which is clipped.
  const double dissipated =
      mean_force * (delta - (piece.f - state.f) / p.unloading_stiffness());
  next.e_hyst = state.e_hyst + std::max(0.0, dissipated);
  return {next, piece.f, piece.k};
}

}  // namespace embo
