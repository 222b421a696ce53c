#include "sfgcav/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

namespace sfgcav {

namespace {

constexpr double kDivergenceFactor = 1e6;
constexpr int kRateWindow = 8;

void require_finite(const FieldTriple& f, const char* stage) {
  if (!f.finite()) throw NumericError(fmt::format("roundtrip_map: non-finite amplitude after {}", stage));
}

void accumulate(std::array<double, kChannelCount>& into, const std::array<double, kChannelCount>& from) {
  for (std::size_t i = 0; i < kChannelCount; ++i) into[i] += from[i];
}

double max_relative_change(const FieldTriple& prev, const FieldTriple& next, double floor) {
  double worst = 0.0;
  for (auto c : kAllChannels) {
    const double diff = std::abs(next[c] - prev[c]);
    if (diff == 0.0) continue;
    worst = std::max(worst, diff / std::max(std::abs(next[c]), floor));
  }
  return worst;
}

}  // namespace

void CavityConfig::validate() const {
  crystal.validate();
  mirrors.validate();
  for (double p : roundtrip_phase)
    if (!std::isfinite(p)) throw DomainError("roundtrip phase must be finite");
  for (double e : excess_loss)
    if (!(e >= 0.0 && e < 1.0)) throw DomainError("excess round-trip loss must lie in [0, 1)");
  if (!(solver.rel_tolerance > 0.0)) throw DomainError("solver rel_tolerance must be positive");
  if (solver.max_roundtrips < 1) throw DomainError("solver max_roundtrips must be >= 1");
  if (solver.steps_per_pass < 1) throw DomainError("solver steps_per_pass must be >= 1");
}

double CavityConfig::roundtrip_factor(Channel c) const {
  return std::sqrt(mirrors.R(Side::left, c) * mirrors.R(Side::right, c) * (1.0 - excess(c))) *
         std::exp(-crystal.alpha(c) * crystal.length);
}

CavityConfig CavityConfig::paper_default() {
  CavityConfig cfg;
  cfg.crystal = CrystalSpec{};
  auto& m = cfg.mirrors;
  m.R(Side::left, Channel::signal) = 0.965;
  m.R(Side::left, Channel::pump) = 0.965;
  m.R(Side::left, Channel::sum) = 0.999;
  m.R(Side::right, Channel::signal) = 0.999;
  m.R(Side::right, Channel::pump) = 0.999;
  m.R(Side::right, Channel::sum) = 0.001;
  cfg.excess_loss[index(Channel::signal)] = excess_loss_for_finesse(cfg, Channel::signal, 150.0);
  return cfg;
}

void DriveConfig::validate() const {
  if (!(input_power_signal >= 0.0) || !std::isfinite(input_power_signal))
    throw DomainError("signal input power must be >= 0");
  if (!(input_power_pump >= 0.0) || !std::isfinite(input_power_pump))
    throw DomainError("pump input power must be >= 0");
  if (!std::isfinite(phase_signal) || !std::isfinite(phase_pump)) throw DomainError("input phases must be finite");
}

Complex DriveConfig::amplitude(Channel c) const {
  switch (c) {
    case Channel::signal:
      return std::polar(std::sqrt(power_to_flux(input_power_signal, c)), phase_signal);
    case Channel::pump:
      return std::polar(std::sqrt(power_to_flux(input_power_pump, c)), phase_pump);
    default:
      return {};
  }
}

RoundTrip roundtrip_map(const FieldTriple& state, const CavityConfig& cavity, const DriveConfig& drive) {
  if (!state.finite()) throw NumericError("roundtrip_map: non-finite state");
  const auto& m = cavity.mirrors;
  const int steps = cavity.solver.steps_per_pass;
  RoundTrip trip;
  auto& ports = trip.ports;

  // Left coupler: drive enters, returning field partly leaves as reflection.
  FieldTriple forward;
  for (auto c : {Channel::signal, Channel::pump}) {
    const Complex a_in = drive.amplitude(c);
    const double r = m.r(Side::left, c);
    const double t = m.t(Side::left, c);
    forward[c] = t * a_in + r * state[c];
    const double out = std::norm(t * state[c] - r * a_in);
    (c == Channel::signal ? ports.reflected_signal : ports.reflected_pump) = out;
  }
  forward.sum = m.r(Side::left, Channel::sum) * state.sum;
  ports.sum_left_leak = std::norm(m.t(Side::left, Channel::sum) * state.sum);
  trip.circulating = forward;

  const PassResult fwd = integrate_pass(forward, cavity.crystal, Direction::forward, steps);
  require_finite(fwd.out_fields, "forward pass");
  accumulate(ports.absorbed, fwd.absorbed_flux);

  // Right mirror, with the excess loss taken from the reflected part.
  FieldTriple backward;
  for (auto c : {Channel::signal, Channel::pump}) {
    const Complex reflected = m.r(Side::right, c) * fwd.out_fields[c];
    backward[c] = std::sqrt(1.0 - cavity.excess(c)) * reflected;
    ports.scattered[index(c)] = cavity.excess(c) * std::norm(reflected);
    const double out = std::norm(m.t(Side::right, c) * fwd.out_fields[c]);
    (c == Channel::signal ? ports.transmitted_signal : ports.transmitted_pump) = out;
  }
  const Complex reflected_sum = m.r(Side::right, Channel::sum) * fwd.out_fields.sum;
  backward.sum = std::sqrt(1.0 - cavity.excess(Channel::sum)) * reflected_sum;
  ports.scattered[index(Channel::sum)] = cavity.excess(Channel::sum) * std::norm(reflected_sum);
  ports.out_sum = std::norm(m.t(Side::right, Channel::sum) * fwd.out_fields.sum);

  const PassResult bwd = integrate_pass(backward, cavity.crystal, Direction::backward, steps);
  require_finite(bwd.out_fields, "backward pass");
  accumulate(ports.absorbed, bwd.absorbed_flux);

  for (auto c : kAllChannels) trip.next[c] = bwd.out_fields[c] * std::polar(1.0, cavity.phase(c));
  require_finite(trip.next, "round-trip phase");
  return trip;
}

namespace {

struct Iteration {
  bool converged = false;
  int roundtrips = 0;
  RoundTrip last;
};

Iteration iterate(const CavityConfig& cavity, const DriveConfig& drive) {
  const double drive_amp = std::max(std::abs(drive.amplitude(Channel::signal)), std::abs(drive.amplitude(Channel::pump)));
  const double floor = std::max(1e-12 * drive_amp, std::numeric_limits<double>::min());
  const double blowup = kDivergenceFactor * drive_amp;

  Iteration it;
  FieldTriple state;
  std::array<double, kRateWindow + 1> history{};  // recent per-trip changes, ring buffer
  for (int n = 1; n <= cavity.solver.max_roundtrips; ++n) {
    it.last = roundtrip_map(state, cavity, drive);
    it.roundtrips = n;
    for (auto c : kAllChannels) {
      if (std::abs(it.last.next[c]) > blowup)
        throw InstabilityError(fmt::format("steady-state iteration diverged in the {} channel after {} round trips",
                                           to_string(c), n));
    }
    const double change = max_relative_change(state, it.last.next, floor);
    state = it.last.next;
    history[n % history.size()] = change;
    if (change == 0.0) {
      it.converged = true;
      break;
    }
    if (change >= cavity.solver.rel_tolerance || n <= kRateWindow) continue;

    // The remaining distance to the fixed point is change / (1 - rate) for a
    // geometric approach; the rate is averaged over the window.
    const double old = history[(n - kRateWindow) % history.size()];
    const double rate = old > 0.0 ? std::pow(change / old, 1.0 / kRateWindow) : 0.0;
    if (rate < 1.0 && change / (1.0 - rate) < cavity.solver.rel_tolerance) {
      it.converged = true;
      break;
    }
  }
  return it;
}

}  // namespace

double excess_loss_for_finesse(const CavityConfig& cavity, Channel c, double target_finesse) {
  if (!(target_finesse > 0.0)) throw DomainError("target finesse must be positive");
  CavityConfig lossless = cavity;
  lossless.excess_loss[index(c)] = 0.0;
  const double r0 = lossless.roundtrip_factor(c);
  // Invert F = pi sqrt(r) / (1 - r) for r in (0, 1).
  const double x = std::numbers::pi / (2.0 * target_finesse);
  const double sqrt_r = -x + std::sqrt(x * x + 1.0);
  const double r = sqrt_r * sqrt_r;
  if (r > r0) throw DomainError("target finesse exceeds the finesse allowed by mirrors and absorption");
  return 1.0 - (r / r0) * (r / r0);
}

PumpOffReference pump_off_reference(const CavityConfig& cavity, const DriveConfig& drive) {
  cavity.validate();
  drive.validate();
  DriveConfig dark_pump = drive;
  dark_pump.input_power_pump = 0.0;
  const Iteration it = iterate(cavity, dark_pump);
  PumpOffReference ref;
  ref.refl_max = drive.input_power_signal;
  ref.trans_max = flux_to_power(it.last.ports.transmitted_signal, Channel::signal);
  return ref;
}

SteadyStateResult solve_steady_state(const CavityConfig& cavity, const DriveConfig& drive,
                                     const SolveOptions& options) {
  cavity.validate();
  drive.validate();

  const Iteration it = iterate(cavity, drive);
  const PortFluxes& p = it.last.ports;

  SteadyStateResult r;
  r.converged = it.converged;
  r.roundtrips_used = it.roundtrips;
  r.reflected_1550 = flux_to_power(p.reflected_signal, Channel::signal);
  r.reflected_810 = flux_to_power(p.reflected_pump, Channel::pump);
  r.transmitted_1550 = flux_to_power(p.transmitted_signal, Channel::signal);
  r.transmitted_810 = flux_to_power(p.transmitted_pump, Channel::pump);
  r.out_532 = flux_to_power(p.out_sum, Channel::sum);
  r.leak_532_left = flux_to_power(p.sum_left_leak, Channel::sum);
  for (auto c : kAllChannels) r.circulating_power[index(c)] = it.last.circulating.power(c);
  r.absorbed_flux = p.absorbed;
  r.scattered_flux = p.scattered;
  r.final_state = it.last.next;

  const double in_flux = power_to_flux(drive.input_power_signal, Channel::signal);
  if (in_flux == 0.0) return r;

  r.eta = p.out_sum / in_flux;
  if (!options.depletion) return r;

  if (options.reference) {
    r.reference = *options.reference;
  } else if (drive.input_power_pump == 0.0) {
    r.reference = {drive.input_power_signal, r.transmitted_1550};
  } else {
    r.reference = pump_off_reference(cavity, drive);
  }
  const double refl_norm = r.reflected_1550 / r.reference.refl_max;
  const double trans_norm = r.reference.trans_max > 0.0 ? r.transmitted_1550 / r.reference.trans_max : 0.0;
  const double kappa_ratio = r.reference.trans_max / r.reference.refl_max;
  r.delta_model = depletion_eq2(refl_norm, trans_norm, kappa_ratio);
  return r;
}

PhotonBudget photon_budget(const SteadyStateResult& result, const DriveConfig& drive) {
  if (!result.converged) throw DomainError("photon_budget requires a converged steady state");
  PhotonBudget b;
  b.incident_signal = power_to_flux(drive.input_power_signal, Channel::signal);
  b.incident_pump = power_to_flux(drive.input_power_pump, Channel::pump);
  b.converted_flux = power_to_flux(result.out_532, Channel::sum) + power_to_flux(result.leak_532_left, Channel::sum) +
                     result.absorbed_flux[index(Channel::sum)] + result.scattered_flux[index(Channel::sum)];

  const auto residual = [&](double incident, double refl, double trans, Channel c) {
    const double accounted =
        refl + trans + b.converted_flux + result.absorbed_flux[index(c)] + result.scattered_flux[index(c)];
    const double diff = incident - accounted;
    return incident > 0.0 ? diff / incident : diff;
  };
  b.residual_signal = residual(b.incident_signal, power_to_flux(result.reflected_1550, Channel::signal),
                               power_to_flux(result.transmitted_1550, Channel::signal), Channel::signal);
  b.residual_pump =
      residual(b.incident_pump, power_to_flux(result.reflected_810, Channel::pump),
               power_to_flux(result.transmitted_810, Channel::pump), Channel::pump);
  return b;
}

}  // namespace sfgcav
