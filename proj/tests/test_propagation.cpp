#include <doctest.h>

#include <cmath>
#include <complex>

#include "sfgcav/propagation.hpp"
#include "support.hpp"

using namespace sfgcav;
using namespace sfgcav::testing;

namespace {

CrystalSpec lossless(double kappa, double delta_k = 0.0) {
  CrystalSpec c;
  c.alpha_signal = c.alpha_pump = c.alpha_sum = 0.0;
  c.kappa = kappa;
  c.delta_k = delta_k;
  return c;
}

// kappa giving g L = gL for the given pump flux.
double kappa_for(double gL, double pump_flux, double length) { return gL / (length * std::sqrt(pump_flux)); }

}  // namespace

TEST_CASE("free propagation is the identity") {
  FieldTriple in{{1e3, -2e2}, {5e8, 1e8}, {3.0, 4.0}};
  const PassResult r = integrate_pass(in, lossless(0.0, 300.0), Direction::forward, 200);
  for (auto c : kAllChannels) CHECK(r.out_fields[c] == in[c]);
  for (double a : r.absorbed_flux) CHECK(a == 0.0);
}

TEST_CASE("Beer-Lambert attenuation without coupling") {
  CrystalSpec c;
  c.kappa = 0.0;
  c.alpha_signal = 0.1 / c.length;
  c.alpha_pump = 0.46;
  c.alpha_sum = 2.0;
  FieldTriple in{{1e4, 0.0}, {0.0, 2e4}, {3e3, 3e3}};
  const PassResult r = integrate_pass(in, c, Direction::forward, 200);
  CHECK(rel_diff(std::abs(r.out_fields.signal), std::abs(in.signal) * std::exp(-0.05)) < 1e-10);
  CHECK(rel_diff(std::abs(r.out_fields.pump), std::abs(in.pump) * std::exp(-0.5 * 0.46 * c.length)) < 1e-10);
  CHECK(rel_diff(std::abs(r.out_fields.sum), std::abs(in.sum) * std::exp(-0.5 * 2.0 * c.length)) < 1e-10);
  // absorbed = in - out when nothing converts
  for (auto ch : kAllChannels) CHECK(rel_diff(r.absorbed(ch), in.flux(ch) - r.out_fields.flux(ch)) < 1e-9);
}

TEST_CASE("undepleted pump, g L = pi/2 converts the whole signal") {
  const double Np = 1e20;
  const Complex a_s0{1e3, 0.0};
  CrystalSpec c = lossless(0.0);
  c.kappa = kappa_for(kPi / 2, Np, c.length);
  const FieldTriple in{a_s0, {std::sqrt(Np), 0.0}, {}};
  const PassResult r = integrate_pass(in, c, Direction::forward, 200);
  CHECK(r.out_fields.flux(Channel::signal) / std::norm(a_s0) < 1e-4);
  CHECK(rel_diff(r.out_fields.flux(Channel::sum), std::norm(a_s0)) < 1e-4);
}

TEST_CASE("undepleted_pump_oracle") {
  const Complex a_s0{2.0, 1.0};
  const double Np = 1e16;
  CrystalSpec c = lossless(0.0);

  SUBCASE("z = 0 returns the input") {
    c.kappa = kappa_for(1.0, Np, c.length);
    const FieldTriple f = undepleted_pump_oracle(a_s0, Np, c, 0.0);
    CHECK(f.signal == a_s0);
    CHECK(f.sum == Complex{});
  }
  SUBCASE("g z = pi/4 splits the signal in half") {
    c.kappa = kappa_for(kPi / 4, Np, c.length);
    const FieldTriple f = undepleted_pump_oracle(a_s0, Np, c, c.length);
    CHECK(f.flux(Channel::sum) / std::norm(a_s0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.flux(Channel::signal) / std::norm(a_s0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("low-gain sinc law") {
    c.kappa = kappa_for(1e-4, Np, c.length);
    const double g = c.kappa * std::sqrt(Np);
    for (double dkz : {0.5, 1.0, 3.0, 5.0}) {
      c.delta_k = dkz / c.length;
      const double x = dkz / 2;
      const double sinc = std::sin(x) / x;
      const double expected = g * g * c.length * c.length * sinc * sinc * std::norm(a_s0);
      const FieldTriple f = undepleted_pump_oracle(a_s0, Np, c, c.length);
      CHECK(rel_diff(f.flux(Channel::sum), expected) < 1e-6);
    }
    c.delta_k = 2 * kPi / c.length;
    const FieldTriple f = undepleted_pump_oracle(a_s0, Np, c, c.length);
    CHECK(f.flux(Channel::sum) / (g * g * c.length * c.length * std::norm(a_s0)) < 1e-7);
  }
  CHECK_THROWS_AS(undepleted_pump_oracle(a_s0, 0.0, c, 1e-3), DomainError);
}

TEST_CASE("integrate_pass matches the oracle in the weak-signal regime") {
  const double Np = 1e18;
  for (double ratio : {1e-6, 1e-9}) {
    const Complex a_s0{std::sqrt(ratio * Np), 0.0};
    for (double gL : {0.3, kPi / 4, 1.2}) {
      for (double dkL : {0.0, 2.0}) {
        CrystalSpec c = lossless(0.0, dkL / 9.3e-3);
        c.kappa = kappa_for(gL, Np, c.length);
        const FieldTriple in{a_s0, {std::sqrt(Np), 0.0}, {}};
        const PassResult r = integrate_pass(in, c, Direction::forward, 1000);
        const FieldTriple o = undepleted_pump_oracle(a_s0, Np, c, c.length);
        CAPTURE(ratio);
        CAPTURE(gL);
        CAPTURE(dkL);
        CHECK(std::abs(r.out_fields.signal - o.signal) / std::abs(a_s0) < 1e-6);
        CHECK(std::abs(r.out_fields.sum - o.sum) / std::abs(o.sum) < 1e-6);
      }
    }
  }
}

TEST_CASE("fourth-order convergence under step halving") {
  const double Np = 1e20;
  const Complex a_s0{1.0, 0.0};  // depletion far below truncation error
  CrystalSpec c = lossless(0.0, 150.0);
  c.kappa = kappa_for(3.0, Np, c.length);
  const FieldTriple in{a_s0, {std::sqrt(Np), 0.0}, {}};
  const FieldTriple o = undepleted_pump_oracle(a_s0, Np, c, c.length);

  std::vector<double> errors;
  for (int steps : {4, 8, 16, 32, 64}) {
    const PassResult r = integrate_pass(in, c, Direction::forward, steps);
    errors.push_back(std::abs(r.out_fields.sum - o.sum) + std::abs(r.out_fields.signal - o.signal));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double order = std::log2(errors[i - 1] / errors[i]);
    CAPTURE(i);
    CHECK(order == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("Manley-Rowe invariants on lossless passes") {
  const FieldTriple in{{3e7, 1e7}, {2e7, -1e7}, {1e6, 5e6}};
  for (double dk : {0.0, 400.0}) {
    CrystalSpec c = lossless(0.0, dk);
    c.kappa = kappa_for(2.5, std::norm(in.pump), c.length);  // strong depletion
    const PassResult r = integrate_pass(in, c, Direction::forward, 1000);
    const double s_in = in.flux(Channel::signal) + in.flux(Channel::sum);
    const double p_in = in.flux(Channel::pump) + in.flux(Channel::sum);
    CHECK(rel_diff(r.out_fields.flux(Channel::signal) + r.out_fields.flux(Channel::sum), s_in) < 1e-9);
    CHECK(rel_diff(r.out_fields.flux(Channel::pump) + r.out_fields.flux(Channel::sum), p_in) < 1e-9);
    // the pass actually exchanged photons
    CHECK(rel_diff(r.out_fields.flux(Channel::sum), in.flux(Channel::sum)) > 0.1);
  }
}

TEST_CASE("photon bookkeeping with loss") {
  const FieldTriple in{{3e7, 1e7}, {4e7, 0.0}, {2e6, 0.0}};
  CrystalSpec c;
  c.alpha_signal = 3.0;
  c.alpha_pump = 5.0;
  c.alpha_sum = 8.0;
  c.delta_k = 120.0;
  c.kappa = kappa_for(1.5, std::norm(in.pump), c.length);
  const PassResult r = integrate_pass(in, c, Direction::forward, 1000);
  for (double a : r.absorbed_flux) CHECK(a > 0.0);

  const double lost_signal = in.flux(Channel::signal) - r.out_fields.flux(Channel::signal) - r.absorbed(Channel::signal);
  const double lost_pump = in.flux(Channel::pump) - r.out_fields.flux(Channel::pump) - r.absorbed(Channel::pump);
  const double gained_sum = r.out_fields.flux(Channel::sum) - in.flux(Channel::sum) + r.absorbed(Channel::sum);
  const double scale = in.flux(Channel::signal) + in.flux(Channel::pump);
  CHECK(std::abs(gained_sum) / scale > 1e-3);
  CHECK(std::abs(lost_signal - gained_sum) / scale < 1e-8);
  CHECK(std::abs(lost_pump - gained_sum) / scale < 1e-8);
}

TEST_CASE("backward pass uses the same equations from a fresh origin") {
  const FieldTriple in{{3e7, 1e7}, {4e7, 0.0}, {2e6, 1e5}};
  CrystalSpec c;
  c.delta_k = 250.0;
  c.kappa = kappa_for(1.0, std::norm(in.pump), c.length);
  const PassResult f = integrate_pass(in, c, Direction::forward, 100);
  const PassResult b = integrate_pass(in, c, Direction::backward, 100);
  for (auto ch : kAllChannels) {
    CHECK(f.out_fields[ch] == b.out_fields[ch]);
    CHECK(f.absorbed(ch) == b.absorbed(ch));
  }
}

TEST_CASE("integrate_pass input errors") {
  CrystalSpec c;
  FieldTriple in{{1.0, 0.0}, {1.0, 0.0}, {}};
  CHECK_THROWS_AS(integrate_pass(in, c, Direction::forward, 0), DomainError);
  in.pump = {std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_AS(integrate_pass(in, c, Direction::forward, 10), NumericError);
}
