#pragma once

#include <cmath>

#include "sfgcav/analysis.hpp"

namespace sfgcav::testing {

// Independent constants for oracle arithmetic.
inline constexpr double kH = 6.62607015e-34;
inline constexpr double kC = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline CavityConfig lossless_cavity() {
  CavityConfig c = CavityConfig::paper_default();
  c.crystal.alpha_signal = c.crystal.alpha_pump = c.crystal.alpha_sum = 0.0;
  c.excess_loss = {0.0, 0.0, 0.0};
  return c;
}

inline CavityConfig cold_cavity(double R_left, double R_right) {
  CavityConfig c = lossless_cavity();
  for (auto ch : kAllChannels) {
    c.mirrors.R(Side::left, ch) = R_left;
    c.mirrors.R(Side::right, ch) = R_right;
  }
  return c;
}

// Paper cavity with kappa calibrated to the 81.5 mW peak; computed once.
inline const CavityConfig& calibrated_paper() {
  static const CavityConfig cfg = [] {
    CavityConfig c = CavityConfig::paper_default();
    c.crystal.kappa = calibrate_kappa(c, 2e-3, 81.5e-3);
    return c;
  }();
  return cfg;
}

inline DriveConfig drive(double signal_W, double pump_W) {
  DriveConfig d;
  d.input_power_signal = signal_W;
  d.input_power_pump = pump_W;
  return d;
}

}  // namespace sfgcav::testing
