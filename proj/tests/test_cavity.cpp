#include <doctest.h>

#include <cmath>
#include <cstring>

#include "sfgcav/cavity.hpp"
#include "support.hpp"

using namespace sfgcav;
using namespace sfgcav::testing;

namespace {

// Airy on-resonance power buildup of a cold two-mirror resonator.
double airy_buildup(double R1, double R2) {
  const double t1 = 1.0 - R1;
  const double g = 1.0 - std::sqrt(R1 * R2);
  return t1 / (g * g);
}

// F = pi sqrt(r) / (1 - r), independent of the library helper.
double finesse_oracle(double r) { return kPi * std::sqrt(r) / (1.0 - r); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("dark cavity stays dark") {
  CavityConfig c = CavityConfig::paper_default();
  const RoundTrip t = roundtrip_map(FieldTriple{}, c, DriveConfig{});
  for (auto ch : kAllChannels) CHECK(t.next[ch] == Complex{});
  const PortFluxes& p = t.ports;
  CHECK(p.reflected_signal == 0.0);
  CHECK(p.reflected_pump == 0.0);
  CHECK(p.transmitted_signal == 0.0);
  CHECK(p.transmitted_pump == 0.0);
  CHECK(p.out_sum == 0.0);
  CHECK(p.sum_left_leak == 0.0);
}

TEST_CASE("cold-cavity Airy buildup") {
  CavityConfig c = cold_cavity(0.965, 1.0);
  const double expected = airy_buildup(0.965, 1.0);
  CHECK(expected == doctest::Approx(112.3).epsilon(1e-3));
  const SteadyStateResult r = solve_steady_state(c, drive(2e-3, 50e-3));
  REQUIRE(r.converged);
  CHECK(rel_diff(r.circulating_power[index(Channel::signal)] / 2e-3, expected) < 0.01);
  CHECK(rel_diff(r.circulating_power[index(Channel::pump)] / 50e-3, expected) < 0.01);
  // R_right = 1: everything comes back out of the coupler
  CHECK(rel_diff(r.reflected_1550, 2e-3) < 1e-8);
}

TEST_CASE("impedance matching nulls the reflection") {
  for (double R : {0.9, 0.965, 0.99}) {
    CavityConfig c = cold_cavity(R, R);
    const SteadyStateResult r = solve_steady_state(c, drive(2e-3, 0.0));
    REQUIRE(r.converged);
    CHECK(r.reflected_1550 / 2e-3 < 1e-8);
    CHECK(rel_diff(r.transmitted_1550, 2e-3) < 1e-8);
  }
}

TEST_CASE("resonance maximizes the circulating power") {
  CavityConfig c = CavityConfig::paper_default();
  const DriveConfig d = drive(2e-3, 0.0);
  const double on = solve_steady_state(c, d).circulating_power[index(Channel::signal)];
  for (double phi = -3.0; phi <= 3.0; phi += 0.25) {
    if (phi == 0.0) continue;
    c.roundtrip_phase[index(Channel::signal)] = phi;
    const SteadyStateResult r = solve_steady_state(c, d);
    REQUIRE(r.converged);
    CAPTURE(phi);
    CHECK(r.circulating_power[index(Channel::signal)] < on);
  }
  for (double phi : {1e-3, -1e-3}) {
    c.roundtrip_phase[index(Channel::signal)] = phi;
    CHECK(solve_steady_state(c, d).circulating_power[index(Channel::signal)] < on);
  }
}

TEST_CASE("excess loss reproduces a target finesse") {
  const CavityConfig c = CavityConfig::paper_default();
  CHECK(finesse_oracle(c.roundtrip_factor(Channel::signal)) == doctest::Approx(150.0).epsilon(1e-9));
  CHECK(c.excess(Channel::signal) == doctest::Approx(1.724e-3).epsilon(2e-3));

  // Without the excess loss the mirrors and absorption alone give a higher finesse.
  CavityConfig bare = c;
  bare.excess_loss = {0.0, 0.0, 0.0};
  const double r0 = std::sqrt(0.965 * 0.999) * std::exp(-0.19 * 9.3e-3);
  CHECK(bare.roundtrip_factor(Channel::signal) == doctest::Approx(r0).epsilon(1e-14));
  CHECK(finesse_oracle(r0) > 150.0);
  CHECK_THROWS_AS(excess_loss_for_finesse(bare, Channel::signal, 1000.0), DomainError);
  CHECK_THROWS_AS(excess_loss_for_finesse(bare, Channel::signal, 0.0), DomainError);
}

TEST_CASE("solve_steady_state with the pump off") {
  SUBCASE("lossless cavity: eta = 0 and delta = 0") {
    CavityConfig c = lossless_cavity();
    c.crystal.kappa = 2e-9;
    const SteadyStateResult r = solve_steady_state(c, drive(2e-3, 0.0));
    REQUIRE(r.converged);
    CHECK(r.eta == 0.0);
    CHECK(std::abs(r.delta_model) < 1e-9);
  }
  SUBCASE("lossy cavity: delta is the cold-cavity loss fraction") {
    CavityConfig c = CavityConfig::paper_default();
    c.crystal.kappa = 2e-9;
    const SteadyStateResult r = solve_steady_state(c, drive(2e-3, 0.0));
    REQUIRE(r.converged);
    CHECK(r.eta == 0.0);
    CHECK(r.delta_model == doctest::Approx(1.0 - (r.reflected_1550 + r.transmitted_1550) / 2e-3).epsilon(1e-12));
    CHECK(r.reference.refl_max == 2e-3);
    CHECK(r.reference.trans_max == r.transmitted_1550);
  }
}

TEST_CASE("photon budget") {
  SUBCASE("no coupling") {
    CavityConfig c = CavityConfig::paper_default();
    c.solver.rel_tolerance = 1e-12;
    const DriveConfig d = drive(2e-3, 80e-3);
    const SteadyStateResult r = solve_steady_state(c, d);
    REQUIRE(r.converged);
    const PhotonBudget b = photon_budget(r, d);
    CHECK(b.converted_flux == 0.0);
    CHECK(std::abs(b.residual_signal) < 1e-8);
    CHECK(std::abs(b.residual_pump) < 1e-8);
  }
  SUBCASE("calibrated paper cavity over the pump range") {
    const CavityConfig& c = calibrated_paper();
    for (double pump : {10e-3, 81.5e-3, 150e-3, 190e-3}) {
      const DriveConfig d = drive(2e-3, pump);
      const SteadyStateResult r = solve_steady_state(c, d);
      REQUIRE(r.converged);
      const PhotonBudget b = photon_budget(r, d);
      CAPTURE(pump);
      CHECK(b.converted_flux > 0.0);
      CHECK(std::abs(b.residual_signal) < 1e-6);
      CHECK(std::abs(b.residual_pump) < 1e-6);
    }
  }
  SUBCASE("lossless run absorbs nothing") {
    CavityConfig c = lossless_cavity();
    c.crystal.kappa = calibrated_paper().crystal.kappa;
    const DriveConfig d = drive(2e-3, 60e-3);
    const SteadyStateResult r = solve_steady_state(c, d);
    REQUIRE(r.converged);
    for (double a : r.absorbed_flux) CHECK(a == 0.0);
    for (double s : r.scattered_flux) CHECK(s == 0.0);
    const PhotonBudget b = photon_budget(r, d);
    CHECK(std::abs(b.residual_signal) < 1e-6);
  }
  SUBCASE("needs a converged result") {
    CavityConfig c = CavityConfig::paper_default();
    c.solver.max_roundtrips = 5;
    const DriveConfig d = drive(2e-3, 10e-3);
    const SteadyStateResult r = solve_steady_state(c, d);
    CHECK_FALSE(r.converged);
    CHECK(r.roundtrips_used == 5);
    CHECK_THROWS_AS(photon_budget(r, d), DomainError);
  }
}

TEST_CASE("paper cavity with calibrated kappa") {
  const CavityConfig& c = calibrated_paper();
  const SteadyStateResult peak = solve_steady_state(c, drive(2e-3, 81.5e-3));
  REQUIRE(peak.converged);
  CHECK(peak.eta >= 0.829);
  CHECK(peak.eta <= 0.859);
  const SteadyStateResult high = solve_steady_state(c, drive(2e-3, 150e-3));
  REQUIRE(high.converged);
  CHECK(high.eta < peak.eta);
  CHECK(peak.delta_model >= peak.eta - 1e-9);
  CHECK(high.delta_model >= high.eta - 1e-9);
  for (const auto* r : {&peak, &high}) {
    CHECK(r->eta >= 0.0);
    CHECK(r->eta <= 1.0);
    for (double p : {r->reflected_1550, r->reflected_810, r->transmitted_1550, r->transmitted_810, r->out_532})
      CHECK(p >= 0.0);
  }
}

TEST_CASE("determinism") {
  const CavityConfig& c = calibrated_paper();
  const DriveConfig d = drive(2e-3, 70e-3);
  const SteadyStateResult a = solve_steady_state(c, d);
  const SteadyStateResult b = solve_steady_state(c, d);
  CHECK(a.roundtrips_used == b.roundtrips_used);
  CHECK(same_bits(a.eta, b.eta));
  CHECK(same_bits(a.delta_model, b.delta_model));
  CHECK(same_bits(a.out_532, b.out_532));
  CHECK(same_bits(a.reflected_1550, b.reflected_1550));
  CHECK(same_bits(a.transmitted_810, b.transmitted_810));
  for (auto ch : kAllChannels) {
    CHECK(same_bits(a.final_state[ch].real(), b.final_state[ch].real()));
    CHECK(same_bits(a.final_state[ch].imag(), b.final_state[ch].imag()));
  }
}

TEST_CASE("tightening the tolerance moves eta by less than the old tolerance") {
  CavityConfig c = calibrated_paper();
  const DriveConfig d = drive(2e-3, 81.5e-3);
  double previous = solve_steady_state(c, d).eta;
  for (double tol : {1e-8, 1e-9, 1e-10, 1e-11}) {
    c.solver.rel_tolerance = tol / 10;
    const double now = solve_steady_state(c, d).eta;
    CAPTURE(tol);
    CHECK(std::abs(now - previous) < tol);
    previous = now;
  }
}

TEST_CASE("roundtrip_map and solver errors") {
  CavityConfig c = CavityConfig::paper_default();
  FieldTriple bad;
  bad.signal = {std::nan(""), 0.0};
  CHECK_THROWS_AS(roundtrip_map(bad, c, drive(1e-3, 0.0)), NumericError);

  c.solver.rel_tolerance = 0.0;
  CHECK_THROWS_AS(solve_steady_state(c, drive(1e-3, 0.0)), DomainError);
  c = CavityConfig::paper_default();
  c.mirrors.R(Side::left, Channel::signal) = 1.2;
  CHECK_THROWS_WITH_AS(solve_steady_state(c, drive(1e-3, 0.0)), doctest::Contains("0 <= R <= 1"), DomainError);
  c = CavityConfig::paper_default();
  CHECK_THROWS_AS(solve_steady_state(c, drive(-1e-3, 0.0)), DomainError);
}
