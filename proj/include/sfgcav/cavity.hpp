#pragma once

// Standing-wave SFG resonator: round-trip map, steady-state fixed point and
// the photon-flux audit of a converged state.
//
// Reference plane: just inside the left coupler. The state carried between
// round trips is the field arriving at that plane after the backward pass.
// One trip: left coupler -> forward pass -> right mirror -> backward pass ->
// per-channel round-trip phase.

#include <array>
#include <optional>

#include "sfgcav/model.hpp"
#include "sfgcav/propagation.hpp"

namespace sfgcav {

struct SolverSettings {
  int max_roundtrips = 20000;
  double rel_tolerance = 1e-10;
  int steps_per_pass = kDefaultStepsPerPass;
};

struct CavityConfig {
  CrystalSpec crystal;
  MirrorSpec mirrors;
  std::array<double, kChannelCount> roundtrip_phase{};  // rad, 0 = on resonance
  // Passive round-trip power loss not covered by bulk absorption or mirror
  // transmission (coating scatter); applied on the right-mirror reflection.
  std::array<double, kChannelCount> excess_loss{};
  SolverSettings solver;

  void validate() const;

  double phase(Channel c) const noexcept { return roundtrip_phase[index(c)]; }
  double excess(Channel c) const noexcept { return excess_loss[index(c)]; }

  /// Round-trip amplitude factor of the cold cavity for a channel.
  double roundtrip_factor(Channel c) const;

  /// The 9.3 mm PPKTP resonator: 96.5 % input coupler and >99.9 % back
  /// mirror at 1550/810 nm; 532 nm sees 99.9 % on the left and 0.1 % on the
  /// right so the converted light leaves through the back mirror. The signal
  /// carries the excess loss that brings its cold-cavity finesse to 150.
  /// kappa is left at zero and must be calibrated.
  static CavityConfig paper_default();
};

struct DriveConfig {
  double input_power_signal = 0.0;  // W, 1550 nm on the left coupler
  double input_power_pump = 0.0;    // W, 810 nm
  double phase_signal = 0.0;        // rad
  double phase_pump = 0.0;

  void validate() const;
  Complex amplitude(Channel c) const;  // sqrt(photon flux) with phase
};

/// Photon fluxes (photons/s) leaving or dissipated during one round trip.
struct PortFluxes {
  double reflected_signal = 0.0;
  double reflected_pump = 0.0;
  double transmitted_signal = 0.0;
  double transmitted_pump = 0.0;
  double out_sum = 0.0;        // 532 nm through the right mirror
  double sum_left_leak = 0.0;  // 532 nm through the left high reflector
  std::array<double, kChannelCount> absorbed{};
  std::array<double, kChannelCount> scattered{};  // excess loss
};

struct RoundTrip {
  FieldTriple next;
  FieldTriple circulating;  // forward-travelling fields entering the crystal
  PortFluxes ports;
};

/// Excess round-trip loss for channel `c` that makes its cold-cavity finesse
/// pi sqrt(r) / (1 - r) equal `target_finesse`.
double excess_loss_for_finesse(const CavityConfig& cavity, Channel c, double target_finesse);

RoundTrip roundtrip_map(const FieldTriple& state, const CavityConfig& cavity, const DriveConfig& drive);

/// Normalization maxima of the depletion measurement, taken without pump:
/// the reflected maximum is the total incident power (far off resonance) and
/// the transmitted maximum is the on-resonance transmission.
struct PumpOffReference {
  double refl_max = 0.0;   // W
  double trans_max = 0.0;  // W
};

struct SteadyStateResult {
  bool converged = false;
  int roundtrips_used = 0;

  // Port powers, W.
  double reflected_1550 = 0.0;
  double reflected_810 = 0.0;
  double transmitted_1550 = 0.0;
  double transmitted_810 = 0.0;
  double out_532 = 0.0;
  double leak_532_left = 0.0;

  std::array<double, kChannelCount> circulating_power{};  // W at the reference plane
  std::array<double, kChannelCount> absorbed_flux{};      // photons/s
  std::array<double, kChannelCount> scattered_flux{};     // photons/s, excess loss
  FieldTriple final_state;

  double eta = 0.0;          // out_532 photon flux / incident 1550 photon flux
  double delta_model = 0.0;  // relative depletion evaluated on the model ports
  PumpOffReference reference;
};

struct SolveOptions {
  std::optional<PumpOffReference> reference;  // reused instead of a fresh pump-off solve
  bool depletion = true;                      // false leaves delta_model at 0
};

/// Iterates the round-trip map from the dark cavity until the largest
/// relative amplitude change over one trip, and the remaining distance to the
/// fixed point extrapolated from the observed contraction rate, both drop
/// below the solver tolerance.
/// Throws InstabilityError if any amplitude exceeds 1e6 times the largest
/// drive amplitude. The depletion needs the pump-off transmission, obtained
/// from an auxiliary solve unless a reference is supplied.
SteadyStateResult solve_steady_state(const CavityConfig& cavity, const DriveConfig& drive,
                                     const SolveOptions& options = {});

PumpOffReference pump_off_reference(const CavityConfig& cavity, const DriveConfig& drive);

struct PhotonBudget {
  // Incident minus accounted photon flux, relative to the incident flux.
  double residual_signal = 0.0;
  double residual_pump = 0.0;
  double converted_flux = 0.0;  // 532 out + 532 leak + 532 absorbed + 532 scattered
  double incident_signal = 0.0;
  double incident_pump = 0.0;
};

/// Checks incident = reflected + transmitted + converted + absorbed +
/// scattered for the signal and pump channels. Requires a converged result.
PhotonBudget photon_budget(const SteadyStateResult& result, const DriveConfig& drive);

}  // namespace sfgcav
