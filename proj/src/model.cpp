#include "sfgcav/model.hpp"

#include <cmath>
#include <fmt/format.h>

namespace sfgcav {

namespace {

// Normalized detector readings may overshoot unity by detector noise.
constexpr double kNormalizedSlack = 0.05;

bool is_probability(double R) { return std::isfinite(R) && R >= 0.0 && R <= 1.0; }

}  // namespace

std::string_view to_string(Channel c) noexcept {
  switch (c) {
    case Channel::signal:
      return "signal";
    case Channel::pump:
      return "pump";
    case Channel::sum:
      return "sum";
  }
  return "?";
}

void WavelengthChannel::validate() const {
  if (!(vacuum_wavelength > 0.0)) throw DomainError("wavelength must be positive");
  if (!(refractive_index > 1.0)) throw DomainError("refractive index must exceed 1");
}

const WavelengthChannel& default_channel(Channel c) noexcept {
  static const std::array<WavelengthChannel, kChannelCount> channels{{
      {Channel::signal, 1550e-9, 1.816},
      {Channel::pump, 810e-9, 1.842},
      {Channel::sum, 532e-9, 1.889},
  }};
  return channels[index(c)];
}

bool energy_conserving(const WavelengthChannel& signal, const WavelengthChannel& pump,
                       const WavelengthChannel& sum, double rel_tol) {
  const double expected = 1.0 / signal.vacuum_wavelength + 1.0 / pump.vacuum_wavelength;
  return std::abs(1.0 / sum.vacuum_wavelength - expected) <= rel_tol * expected;
}

Complex& FieldTriple::operator[](Channel c) noexcept {
  switch (c) {
    case Channel::signal:
      return signal;
    case Channel::pump:
      return pump;
    default:
      return sum;
  }
}

const Complex& FieldTriple::operator[](Channel c) const noexcept {
  return const_cast<FieldTriple&>(*this)[c];
}

double FieldTriple::power(Channel c) const { return flux_to_power(flux(c), c); }

bool FieldTriple::finite() const noexcept {
  for (auto c : kAllChannels) {
    const auto& a = (*this)[c];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  }
  return true;
}

double CrystalSpec::alpha(Channel c) const noexcept {
  switch (c) {
    case Channel::signal:
      return alpha_signal;
    case Channel::pump:
      return alpha_pump;
    default:
      return alpha_sum;
  }
}

void CrystalSpec::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("crystal length must be positive");
  for (auto c : kAllChannels) {
    if (!(alpha(c) >= 0.0) || !std::isfinite(alpha(c)))
      throw DomainError(fmt::format("absorption for {} must be >= 0", to_string(c)));
  }
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("nonlinear coupling kappa must be >= 0");
  if (!std::isfinite(delta_k)) throw DomainError("delta_k must be finite");
}

double MirrorSpec::r(Side s, Channel c) const { return std::sqrt(R(s, c)); }
double MirrorSpec::t(Side s, Channel c) const { return std::sqrt(1.0 - R(s, c)); }

void MirrorSpec::validate() const {
  for (auto side : {Side::left, Side::right}) {
    for (auto c : kAllChannels) {
      if (!is_probability(R(side, c)))
        throw DomainError(fmt::format("reflectivity {} {} = {} violates 0 <= R <= 1",
                                      side == Side::left ? "left" : "right", to_string(c), R(side, c)));
    }
  }
}

void MetricsConfig::validate() const {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(kappa_ratio >= 0.0)) throw DomainError("kappa_ratio must be >= 0");
}

double power_to_flux(double power, const WavelengthChannel& channel) {
  if (!(power >= 0.0)) throw DomainError("power must be non-negative");
  return power * channel.vacuum_wavelength / (kPlanck * kSpeedOfLight);
}

double flux_to_power(double flux, const WavelengthChannel& channel) {
  if (!(flux >= 0.0)) throw DomainError("photon flux must be non-negative");
  return flux * kPlanck * kSpeedOfLight / channel.vacuum_wavelength;
}

double efficiency_eq1(double p_532, double p_1550, const MetricsConfig& metrics) {
  metrics.validate();
  if (!(p_1550 > 0.0)) throw DomainError("1550 nm reference power must be positive");
  if (!(p_532 >= 0.0)) throw DomainError("532 nm power must be non-negative");
  return metrics.gamma * (532.0 * p_532) / (1550.0 * p_1550);
}

double depletion_eq2(double refl_norm, double trans_norm, double kappa_ratio) {
  const auto in_range = [](double x) { return x >= 0.0 && x <= 1.0 + kNormalizedSlack; };
  if (!in_range(refl_norm) || !in_range(trans_norm))
    throw DomainError("normalized detector signals must lie in [0, 1.05]");
  if (!(kappa_ratio >= 0.0)) throw DomainError("kappa_ratio must be >= 0");
  return 1.0 - (refl_norm + kappa_ratio * trans_norm);
}

}  // namespace sfgcav
