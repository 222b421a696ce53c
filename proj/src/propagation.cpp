#include "sfgcav/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace sfgcav {

namespace {

// Field amplitudes plus the running absorbed flux of each channel.
struct State {
  std::array<Complex, kChannelCount> a{};
  std::array<double, kChannelCount> absorbed{};

  State& axpy(double h, const State& d) {
    for (std::size_t i = 0; i < kChannelCount; ++i) {
      a[i] += h * d.a[i];
      absorbed[i] += h * d.absorbed[i];
    }
    return *this;
  }
};

State advanced(const State& s, double h, const State& d) {
  State out = s;
  return out.axpy(h, d);
}

class CoupledModes {
 public:
  explicit CoupledModes(const CrystalSpec& c)
      : kappa_(c.kappa), delta_k_(c.delta_k), alpha_{c.alpha_signal, c.alpha_pump, c.alpha_sum} {}

  // `phase` is exp(+i dk z) at the evaluation point.
  State operator()(const State& s, Complex phase) const {
    const auto& [as, ap, asum] = s.a;
    const Complex ik{0.0, kappa_};
    State d;
    d.a[0] = ik * asum * std::conj(ap) * std::conj(phase) - 0.5 * alpha_[0] * as;
    d.a[1] = ik * asum * std::conj(as) * std::conj(phase) - 0.5 * alpha_[1] * ap;
    d.a[2] = ik * as * ap * phase - 0.5 * alpha_[2] * asum;
    for (std::size_t i = 0; i < kChannelCount; ++i) d.absorbed[i] = alpha_[i] * std::norm(s.a[i]);
    return d;
  }

  Complex phase_at(double z) const { return delta_k_ == 0.0 ? Complex{1.0} : std::polar(1.0, delta_k_ * z); }

 private:
  double kappa_;
  double delta_k_;
  std::array<double, kChannelCount> alpha_;
};

}  // namespace

PassResult integrate_pass(const FieldTriple& in_fields, const CrystalSpec& crystal, Direction direction, int steps) {
  // Both directions see the same equations; the direction only labels the pass.
  (void)direction;
  if (steps < 1) throw DomainError("integrate_pass needs at least one step");
  if (!in_fields.finite()) throw NumericError("integrate_pass: non-finite input amplitudes");
  crystal.validate();

  const CoupledModes rhs(crystal);
  const double h = crystal.length / steps;

  State s;
  s.a = {in_fields.signal, in_fields.pump, in_fields.sum};

  Complex phase_start = rhs.phase_at(0.0);
  for (int n = 0; n < steps; ++n) {
    const double z = n * h;
    const Complex phase_mid = rhs.phase_at(z + 0.5 * h);
    const Complex phase_end = rhs.phase_at(z + h);

    const State k1 = rhs(s, phase_start);
    const State k2 = rhs(advanced(s, 0.5 * h, k1), phase_mid);
    const State k3 = rhs(advanced(s, 0.5 * h, k2), phase_mid);
    const State k4 = rhs(advanced(s, h, k3), phase_end);

    s.axpy(h / 6.0, k1).axpy(h / 3.0, k2).axpy(h / 3.0, k3).axpy(h / 6.0, k4);
    phase_start = phase_end;
  }

  PassResult result;
  result.out_fields = {s.a[0], s.a[1], s.a[2]};
  if (!result.out_fields.finite()) throw NumericError("integrate_pass: integration produced non-finite amplitudes");
  for (std::size_t i = 0; i < kChannelCount; ++i) result.absorbed_flux[i] = std::max(0.0, s.absorbed[i]);
  return result;
}

FieldTriple undepleted_pump_oracle(Complex a_s0, double pump_flux, const CrystalSpec& crystal, double z) {
  if (!(pump_flux > 0.0)) throw DomainError("undepleted_pump_oracle: pump flux must be positive");
  const double g = crystal.kappa * std::sqrt(pump_flux);
  const double half_dk = 0.5 * crystal.delta_k;
  const double s = std::hypot(g, half_dk);
  const Complex i{0.0, 1.0};

  FieldTriple out;
  out.pump = std::sqrt(pump_flux);
  if (s == 0.0) {
    out.signal = a_s0;
    return out;
  }
  const double sz = s * z;
  out.signal = a_s0 * std::polar(1.0, -half_dk * z) * (std::cos(sz) + i * (half_dk / s) * std::sin(sz));
  out.sum = i * a_s0 * (g / s) * std::sin(sz) * std::polar(1.0, half_dk * z);
  return out;
}

}  // namespace sfgcav
