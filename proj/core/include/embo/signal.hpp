#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace embo {

struct Channel {
  std::string name;
  std::string unit;  ///< "m/s^2" or "m/s"
  std::vector<double> samples;
};

/// Uniformly sampled multichannel record.
struct Record {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Channel> channels;
  std::map<std::string, std::string> meta;

  std::size_t samples() const { return channels.empty() ? 0 : channels.front().samples.size(); }
  void validate() const;
  const Channel& channel(const std::string& name) const;
};

inline constexpr const char* kAccelerationUnit = "m/s^2";
inline constexpr const char* kVelocityUnit = "m/s";

struct HighPassSpec {
  double corner_hz = 0.10;
  int order = 4;
};

/// Trapezoidal integration, linear detrend, then a zero-phase Butterworth
/// high-pass (applied forward and backward).
Record accel_to_velocity(const Record& acceleration, const HighPassSpec& filter = {});

/// Zero-phase Butterworth high-pass of one trace.
std::vector<double> highpass_zero_phase(std::span<const double> x, double dt,
                                        const HighPassSpec& filter);

/// Adds independent Gaussian white noise. intensity[c] is the two-sided PSD
/// (unit^2 per rad/s) for channel c; the sample variance is 2*pi*S/dt.
Record add_noise(const Record& rec, std::span<const double> intensity, std::uint64_t seed);

/// Band-limited (Kaiser-windowed sinc) resampling to dt_target.
Record resample(const Record& rec, double dt_target);

}  // namespace embo
