#include "embo/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "embo/common.hpp"

namespace embo {
namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

// Bilinear-transform Butterworth high-pass as second-order sections (a
// first-order section, stored with b2 = a2 = 0, when the order is odd).
std::vector<Biquad> butterworth_highpass(int order, double corner_hz, double dt) {
  const double w = std::tan(std::numbers::pi * corner_hz * dt);
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order);
    const double a = 2.0 * std::sin(theta);
    const double a0 = 1.0 + a * w + w * w;
    sections.push_back({1.0 / a0, -2.0 / a0, 1.0 / a0, (2.0 * w * w - 2.0) / a0,
                        (1.0 - a * w + w * w) / a0});
  }
  if (order % 2 == 1) {
    const double a0 = 1.0 + w;
    sections.push_back({1.0 / a0, -1.0 / a0, 0.0, (w - 1.0) / a0, 0.0});
  }
  return sections;
}

// Cascade in transposed direct form II, started in the steady state for a
// constant input equal to x[0].
void filter_in_place(const std::vector<Biquad>& sections, std::vector<double>& x) {
  if (x.empty()) return;
  double level = x.front();
  for (const Biquad& s : sections) {
    const double out_level = s.dc_gain() * level;
    double z1 = out_level - s.b0 * level;
    double z2 = s.b2 * level - s.a2 * out_level;
    for (double& v : x) {
      const double in = v;
      const double y = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * y + z2;
      z2 = s.b2 * in - s.a2 * y;
      v = y;
    }
    level = out_level;
  }
}

void detrend(std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) {
    if (n == 1) x[0] = 0.0;
    return;
  }
  const double mean_k = 0.5 * static_cast<double>(n - 1);
  double mean_x = 0.0;
  for (double v : x) mean_x += v;
  mean_x /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = static_cast<double>(k) - mean_k;
    sxy += dk * (x[k] - mean_x);
    sxx += dk * dk;
  }
  const double slope = sxy / sxx;
  for (std::size_t k = 0; k < n; ++k) {
    x[k] -= mean_x + slope * (static_cast<double>(k) - mean_k);
  }
}

double kaiser(double u, double half_width, double shape) {
  const double r = u / half_width;
  if (std::abs(r) >= 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, shape * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, shape);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

void Record::validate() const {
  if (!(dt > 0.0 && std::isfinite(dt))) throw InputError("Record: dt must be > 0");
  const std::size_t n = samples();
  for (const Channel& c : channels) {
    if (c.unit.empty()) throw InputError("Record: channel " + c.name + " has no unit");
    if (c.samples.size() != n) throw InputError("Record: channel " + c.name + " has wrong length");
    for (double v : c.samples) {
      if (!std::isfinite(v)) throw InputError("Record: channel " + c.name + " has non-finite samples");
    }
  }
}

const Channel& Record::channel(const std::string& name) const {
  for (const Channel& c : channels) {
    if (c.name == name) return c;
  }
  throw InputError("Record: no channel named " + name);
}

std::vector<double> highpass_zero_phase(std::span<const double> x, double dt,
                                        const HighPassSpec& filter) {
  if (!(filter.corner_hz > 0.0)) throw InputError("high-pass corner must be > 0");
  if (filter.corner_hz >= 0.4 / dt) {
    throw InputError("high-pass corner must be below 0.4/dt; sampling too coarse");
  }
  if (filter.order < 1) throw InputError("high-pass order must be >= 1");
  const std::size_t n = x.size();
  if (n < 2) return std::vector<double>(n, 0.0);

  const auto sections = butterworth_highpass(filter.order, filter.corner_hz, dt);
  // Odd reflection about both ends, long enough to cover the filter transient.
  const std::size_t pad = std::min<std::size_t>(
      n - 1, static_cast<std::size_t>(std::ceil(3.0 / (filter.corner_hz * dt))));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  filter_in_place(sections, ext);
  std::reverse(ext.begin(), ext.end());
  filter_in_place(sections, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Record accel_to_velocity(const Record& acceleration, const HighPassSpec& filter) {
  acceleration.validate();
  Record out = acceleration;
  for (Channel& c : out.channels) {
    if (c.unit != kAccelerationUnit) {
      throw InputError("accel_to_velocity: channel " + c.name + " is not an acceleration");
    }
    std::vector<double> v(c.samples.size(), 0.0);
    for (std::size_t k = 1; k < v.size(); ++k) {
      v[k] = v[k - 1] + 0.5 * acceleration.dt * (c.samples[k - 1] + c.samples[k]);
    }
    detrend(v);
    c.samples = highpass_zero_phase(v, acceleration.dt, filter);
    c.unit = kVelocityUnit;
  }
  out.meta["processing"] = "trapezoidal integration, linear detrend, zero-phase Butterworth high-pass";
  return out;
}

Record add_noise(const Record& rec, std::span<const double> intensity, std::uint64_t seed) {
  rec.validate();
  if (intensity.size() != rec.channels.size()) {
    throw InputError("add_noise: one intensity per channel required");
  }
  for (double s : intensity) {
    if (!(s >= 0.0 && std::isfinite(s))) throw InputError("add_noise: intensities must be >= 0");
  }
  Record out = rec;
  std::mt19937_64 engine(seed);
  for (std::size_t c = 0; c < out.channels.size(); ++c) {
    if (intensity[c] == 0.0) continue;
    std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 * std::numbers::pi * intensity[c] / rec.dt));
    for (double& v : out.channels[c].samples) v += gauss(engine);
  }
  out.meta["noise_seed"] = std::to_string(seed);
  return out;
}

Record resample(const Record& rec, double dt_target) {
  rec.validate();
  if (!(dt_target > 0.0) || dt_target < rec.dt / 8.0 || dt_target > rec.dt * 8.0) {
    throw InputError("resample: dt_target must lie within [dt/8, 8 dt]");
  }
  if (dt_target == rec.dt) return rec;

  const std::size_t n = rec.samples();
  const double duration = n > 0 ? rec.dt * static_cast<double>(n - 1) : 0.0;
  const std::size_t m = n > 0 ? static_cast<std::size_t>(std::floor(duration / dt_target + 1e-9)) + 1 : 0;
  // Cut off at the lower of the two Nyquist frequencies.
  const double coarse = std::max(rec.dt, dt_target);
  const double cutoff = 0.5 / coarse;
  const double half_width = 32.0 * coarse;
  constexpr double kShape = 8.0;

  Record out = rec;
  out.dt = dt_target;
  for (std::size_t c = 0; c < rec.channels.size(); ++c) {
    const auto& x = rec.channels[c].samples;
    std::vector<double> y(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double t = dt_target * static_cast<double>(j);
      const auto lo = static_cast<std::ptrdiff_t>(std::ceil((t - half_width) / rec.dt));
      const auto hi = static_cast<std::ptrdiff_t>(std::floor((t + half_width) / rec.dt));
      double acc = 0.0;
      for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(lo, 0);
           k <= std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(n) - 1); ++k) {
        const double u = t - rec.dt * static_cast<double>(k);
        acc += x[k] * 2.0 * cutoff * rec.dt * sinc(2.0 * cutoff * u) * kaiser(u, half_width, kShape);
      }
      y[j] = acc;
    }
    out.channels[c].samples = std::move(y);
  }
  return out;
}

}  // namespace embo
