#pragma once

// Shared domain types, unit conversions and the two measurement metrics
// (photon-number conversion efficiency and relative depletion).

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sfgcav {

using Complex = std::complex<double>;

inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Precondition violated by a caller-supplied value.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values produced or consumed during integration.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Intracavity amplitudes ran away during the round-trip iteration.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Channel : std::size_t { signal = 0, pump = 1, sum = 2 };
inline constexpr std::array<Channel, 3> kAllChannels{Channel::signal, Channel::pump, Channel::sum};
inline constexpr std::size_t kChannelCount = 3;

constexpr std::size_t index(Channel c) noexcept { return static_cast<std::size_t>(c); }
std::string_view to_string(Channel c) noexcept;

enum class Side : std::size_t { left = 0, right = 1 };

struct WavelengthChannel {
  Channel label = Channel::signal;
  double vacuum_wavelength = 0.0;  // m
  double refractive_index = 1.0;

  void validate() const;
};

/// 1550 / 810 / 532 nm with KTP (z-polarized) indices.
const WavelengthChannel& default_channel(Channel c) noexcept;

/// True when 1/lambda_sum matches 1/lambda_signal + 1/lambda_pump to `rel_tol`.
bool energy_conserving(const WavelengthChannel& signal, const WavelengthChannel& pump,
                       const WavelengthChannel& sum, double rel_tol = 1e-3);

/// Complex amplitudes normalized so |a|^2 is a photon flux in photons/s.
struct FieldTriple {
  Complex signal{};
  Complex pump{};
  Complex sum{};

  Complex& operator[](Channel c) noexcept;
  const Complex& operator[](Channel c) const noexcept;

  double flux(Channel c) const noexcept { return std::norm((*this)[c]); }
  double power(Channel c) const;
  bool finite() const noexcept;
};

struct CrystalSpec {
  double length = 9.3e-3;      // m
  double alpha_signal = 0.19;  // power absorption, 1/m
  double alpha_pump = 0.46;
  double alpha_sum = 0.0;
  double kappa = 0.0;    // (photons/s)^(-1/2) m^-1
  double delta_k = 0.0;  // residual mismatch, 1/m

  double alpha(Channel c) const noexcept;
  void validate() const;
};

/// Power reflectivities indexed by mirror side and channel.
struct MirrorSpec {
  std::array<std::array<double, kChannelCount>, 2> reflectivity{};

  double R(Side s, Channel c) const noexcept {
    return reflectivity[static_cast<std::size_t>(s)][index(c)];
  }
  double& R(Side s, Channel c) noexcept {
    return reflectivity[static_cast<std::size_t>(s)][index(c)];
  }
  double r(Side s, Channel c) const;  // sqrt(R)
  double t(Side s, Channel c) const;  // sqrt(1 - R)
  void validate() const;
};

struct MetricsConfig {
  double gamma = 1.0;
  double kappa_ratio = 0.0;

  void validate() const;
};

double power_to_flux(double power, const WavelengthChannel& channel);
double flux_to_power(double flux, const WavelengthChannel& channel);
inline double power_to_flux(double power, Channel c) { return power_to_flux(power, default_channel(c)); }
inline double flux_to_power(double flux, Channel c) { return flux_to_power(flux, default_channel(c)); }

/// eta = gamma * (532 * P_532) / (1550 * P_1550); the nanometre labels are used verbatim.
double efficiency_eq1(double p_532, double p_1550, const MetricsConfig& metrics);

/// delta = 1 - (refl_norm + kappa_ratio * trans_norm).
double depletion_eq2(double refl_norm, double trans_norm, double kappa_ratio);

}  // namespace sfgcav
