#pragma once

// Pump sweeps, peak finding, coupler optimization, parameter fitting and
// linear-resonator helper formulas.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sfgcav/cavity.hpp"

namespace sfgcav {

// ---------------------------------------------------------------------------
// Pump sweep

struct SweepRow {
  double pump_power = 0.0;  // W
  double eta = 0.0;
  double delta = 0.0;
  bool converged = false;
  int roundtrips = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending pump power
};

/// One steady-state solve per pump power, sharing a single pump-off
/// reference. Rows that fail to converge (or diverge) are flagged and the
/// sweep continues. `threads` = 0 picks the hardware concurrency.
SweepResult sweep_pump(const CavityConfig& cavity, double signal_power, std::vector<double> pump_powers,
                       unsigned threads = 0);

/// Evenly spaced powers on [lo, hi], both ends included.
std::vector<double> linear_grid(double lo, double hi, int points);

struct Peak {
  double pump_power = 0.0;
  double eta = 0.0;
  bool interpolated = false;
};

/// Best converged row, refined by a parabola through it and its converged
/// neighbours. An endpoint maximum is returned as is.
Peak find_peak(const SweepResult& sweep);

/// Golden-section maximization of eta over pump power in [lo, hi].
Peak maximize_over_pump(const CavityConfig& cavity, double signal_power, double lo, double hi,
                        int coarse_points = 12, double pump_tolerance = 0.1e-3);

// ---------------------------------------------------------------------------
// Calibration

/// Scales kappa until the eta-versus-pump peak sits at `target_pump`.
/// Uses the weak-signal scaling (peak pump ~ 1/kappa^2) as the update and
/// stops once the peak is within `pump_tolerance`.
double calibrate_kappa(const CavityConfig& cavity, double signal_power, double target_pump,
                       double pump_tolerance = 0.25e-3, double search_max_pump = 0.6);

// ---------------------------------------------------------------------------
// Coupler optimization

enum class CouplerChannels { signal, signal_and_pump };

struct CouplerGridPoint {
  double reflectivity = 0.0;
  double eta = 0.0;
  double pump_power = 0.0;
  bool ok = false;
};

struct CouplerOptimum {
  double best_R = 0.0;
  double best_eta = 0.0;
  double best_pump = 0.0;
  std::vector<CouplerGridPoint> grid;    // coarse grid, ascending R
  std::vector<std::string> warnings;
};

struct CouplerOptions {
  int grid_points = 20;
  double r_tolerance = 1e-4;
  CouplerChannels channels = CouplerChannels::signal;
};

/// For each candidate left-coupler reflectivity the pump power (up to
/// `pump_budget`) maximizing eta is found; the best grid point is then
/// refined by golden-section search between its neighbours.
CouplerOptimum optimize_coupler(const CavityConfig& cavity, double signal_power, double pump_budget,
                                std::array<double, 2> r_range, const CouplerOptions& options = {});

CavityConfig with_left_coupler(CavityConfig cavity, double R, CouplerChannels channels);

// ---------------------------------------------------------------------------
// Measurement fitting

struct MeasurementRow {
  double pump_power = 0.0;  // W
  double pd_1550_in = 0.0;  // detector readings, W-equivalent
  double pd_1550_refl = 0.0;
  double pd_1550_trans = 0.0;
  double pd_810_trans = 0.0;
  double pd_532_trans = 0.0;
};

struct MeasurementSeries {
  std::vector<MeasurementRow> rows;

  /// Throws DomainError on negative readings or non-increasing pump powers.
  void validate() const;
};

/// How the measured depletion is normalized.
///   series: reflection normalized to the incident monitor of the no-pump
///           (lowest pump) row, transmission to its no-pump maximum.
///   per_row: reflection normalized to each row's own incident monitor.
enum class DepletionNormalization { series, per_row };

struct FreeParameters {
  bool gamma = false;
  bool kappa = false;
  bool delta_k = false;

  int count() const noexcept { return int(gamma) + int(kappa) + int(delta_k); }
};

struct FitOptions {
  double gamma_initial = 1.0;
  int max_iterations = 400;  // objective evaluations per simplex run
  int max_restarts = 3;
  double tolerance = 1e-10;  // simplex spread of the objective
  DepletionNormalization normalization = DepletionNormalization::series;
};

struct FitResult {
  double gamma = 1.0;
  double kappa = 0.0;
  double delta_k = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MeasuredMetrics {
  std::vector<double> eta;    // Eq.-1 efficiency with gamma
  std::vector<double> delta;  // relative depletion
};

MeasuredMetrics measured_metrics(const MeasurementSeries& measured, double gamma,
                                 DepletionNormalization normalization = DepletionNormalization::series);

struct ModelMetrics {
  std::vector<double> eta;
  std::vector<double> delta;
  std::vector<bool> converged;
};

/// Forward model evaluated at each measurement row (signal power taken from
/// the row's incident monitor).
ModelMetrics model_metrics(const MeasurementSeries& measured, const CavityConfig& cavity);

/// Normalized sum of squared residuals: eta and delta residuals are each
/// divided by the maximum of their measured series.
double fit_residual(const MeasuredMetrics& measured, const ModelMetrics& model);

/// Nelder-Mead over the free subset. Restart policy: after a run stops, a
/// fresh simplex is built around the best vertex; restarts end when a run
/// improves the objective by less than `tolerance` or after `max_restarts`.
FitResult fit_parameters(const MeasurementSeries& measured, const CavityConfig& cavity, FreeParameters free,
                         const FitOptions& options = {});

/// Detector readings the forward model predicts; the 532 nm detector reads
/// P_532 / gamma so that efficiency_eq1 with the same gamma recovers eta.
MeasurementSeries synthesize_measurements(const CavityConfig& cavity, double signal_power,
                                          const std::vector<double>& pump_powers, double gamma);

// ---------------------------------------------------------------------------
// Minimizer

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const std::vector<double>& step, int max_evaluations, double tolerance);

// ---------------------------------------------------------------------------
// Linear resonator helpers

/// sqrt(R1 R2) exp(-alpha L_rt / 2): round-trip amplitude factor.
double roundtrip_amplitude_factor(double R1, double R2, double alpha, double roundtrip_length);

/// F = pi sqrt(r) / (1 - r).
double finesse(double r_effective);

struct Resonance {
  double fsr = 0.0;        // Hz
  double linewidth = 0.0;  // Hz (FWHM)
};

Resonance linewidth_and_fsr(double optical_roundtrip_length, double finesse_value);

/// Inverse use: optical round-trip length implied by a finesse and linewidth.
double roundtrip_length_for_linewidth(double linewidth, double finesse_value);

/// On-resonance circulating / incident power, T1 / (1 - r)^2 with r the
/// round-trip amplitude factor.
double resonant_buildup(double T1, double r_effective);

}  // namespace sfgcav
