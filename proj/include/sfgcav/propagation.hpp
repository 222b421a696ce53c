#pragma once

// Single-pass integration of the photon-flux-normalized three-wave mixing
// equations through the crystal:
//
//   da_s/dz   = i k a_sum conj(a_p) exp(-i dk z) - (alpha_s / 2) a_s
//   da_p/dz   = i k a_sum conj(a_s) exp(-i dk z) - (alpha_p / 2) a_p
//   da_sum/dz = i k a_s a_p exp(+i dk z)         - (alpha_sum / 2) a_sum

#include <array>

#include "sfgcav/model.hpp"

namespace sfgcav {

enum class Direction { forward, backward };

struct PassResult {
  FieldTriple out_fields;
  std::array<double, kChannelCount> absorbed_flux{};  // photons/s, per channel

  double absorbed(Channel c) const noexcept { return absorbed_flux[index(c)]; }
};

inline constexpr int kDefaultStepsPerPass = 200;

/// Fixed-step classical RK4 over z in [0, L]. The absorbed flux
/// (integral of alpha_c |a_c|^2 dz) is carried as extra state so it shares
/// the integrator's order. A backward pass integrates the same equations
/// from a fresh z origin; both directions are quasi-phase-matched.
PassResult integrate_pass(const FieldTriple& in_fields, const CrystalSpec& crystal, Direction direction,
                          int steps = kDefaultStepsPerPass);

/// Analytic lossless solution with an undepleted, zero-phase pump of flux
/// `pump_flux`. With g = kappa sqrt(pump_flux) and s = sqrt(g^2 + dk^2/4):
///
///   a_s(z)   = a_s0 exp(-i dk z / 2) [cos(s z) + i (dk / 2s) sin(s z)]
///   a_sum(z) = i a_s0 (g / s) sin(s z) exp(+i dk z / 2)
///
/// which reduces to a_s0 cos(gz), i a_s0 sin(gz) at dk = 0 and to
/// |a_sum|^2 = g^2 z^2 sinc^2(dk z / 2) |a_s0|^2 in the low-gain limit.
/// The returned pump amplitude is sqrt(pump_flux).
FieldTriple undepleted_pump_oracle(Complex a_s0, double pump_flux, const CrystalSpec& crystal, double z);

}  // namespace sfgcav
