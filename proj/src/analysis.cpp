#include "sfgcav/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

namespace sfgcav {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Runs body(i) for i in [0, n) on up to `threads` workers. Results are
// written by index, so the outcome does not depend on scheduling. The first
// exception thrown by a worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// eta at one operating point; -1 marks a failed solve.
double eta_at(const CavityConfig& cavity, double signal_power, double pump_power) {
  DriveConfig drive;
  drive.input_power_signal = signal_power;
  drive.input_power_pump = pump_power;
  try {
    const auto r = solve_steady_state(cavity, drive, SolveOptions{.reference = std::nullopt, .depletion = false});
    return r.converged ? r.eta : -1.0;
  } catch (const InstabilityError&) {
    return -1.0;
  } catch (const NumericError&) {
    return -1.0;
  }
}

// Golden-section maximization of f on [a, b].
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Grid search then golden refinement between the best point's neighbours.
template <typename F>
std::pair<double, double> bracketed_max(F&& f, const std::vector<double>& grid, const std::vector<double>& values,
                                        double tol) {
  const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  std::pair<double, double> out{grid[best], values[best]};
  if (hi - lo > tol) {
    const auto refined = golden_max(f, lo, hi, tol);
    if (refined.second > out.second) out = refined;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw DomainError("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  g.back() = hi;
  return g;
}

SweepResult sweep_pump(const CavityConfig& cavity, double signal_power, std::vector<double> pump_powers,
                       unsigned threads) {
  if (pump_powers.empty()) throw DomainError("sweep_pump needs at least one pump power");
  for (double p : pump_powers)
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("pump powers must be >= 0");
  cavity.validate();
  std::sort(pump_powers.begin(), pump_powers.end());

  DriveConfig base;
  base.input_power_signal = signal_power;
  const PumpOffReference reference = pump_off_reference(cavity, base);

  SweepResult out;
  out.rows.resize(pump_powers.size());
  parallel_for(pump_powers.size(), threads, [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.pump_power = pump_powers[i];
    DriveConfig drive = base;
    drive.input_power_pump = pump_powers[i];
    try {
      const auto r = solve_steady_state(cavity, drive, SolveOptions{.reference = reference, .depletion = true});
      row.eta = r.eta;
      row.delta = r.delta_model;
      row.converged = r.converged;
      row.roundtrips = r.roundtrips_used;
    } catch (const std::runtime_error&) {
      row.eta = std::numeric_limits<double>::quiet_NaN();
      row.delta = std::numeric_limits<double>::quiet_NaN();
      row.converged = false;
    }
  });
  return out;
}

Peak find_peak(const SweepResult& sweep) {
  std::vector<const SweepRow*> ok;
  for (const auto& row : sweep.rows)
    if (row.converged && std::isfinite(row.eta)) ok.push_back(&row);
  if (ok.empty()) throw DomainError("find_peak: no converged rows");
  if (ok.size() < 3) throw DomainError("find_peak: need at least three converged rows");

  const auto best = static_cast<std::size_t>(
      std::max_element(ok.begin(), ok.end(), [](auto* a, auto* b) { return a->eta < b->eta; }) - ok.begin());
  Peak peak{ok[best]->pump_power, ok[best]->eta, false};
  if (best == 0 || best + 1 == ok.size()) return peak;

  const double x0 = ok[best - 1]->pump_power, y0 = ok[best - 1]->eta;
  const double x1 = ok[best]->pump_power, y1 = ok[best]->eta;
  const double x2 = ok[best + 1]->pump_power, y2 = ok[best + 1]->eta;
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  if (den == 0.0) return peak;
  const double xv = x1 - 0.5 * ((x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0)) / den;
  // Lagrange form of the same parabola.
  const double yv = y0 * (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2)) +
                    y1 * (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2)) +
                    y2 * (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
  return {xv, yv, true};
}

Peak maximize_over_pump(const CavityConfig& cavity, double signal_power, double lo, double hi, int coarse_points,
                        double pump_tolerance) {
  if (!(hi >= lo) || lo < 0.0) throw DomainError("maximize_over_pump: invalid pump interval");
  const auto grid = linear_grid(lo, hi, std::max(coarse_points, 3));
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = eta_at(cavity, signal_power, grid[i]);
  const auto [p, e] =
      bracketed_max([&](double x) { return eta_at(cavity, signal_power, x); }, grid, values, pump_tolerance);
  return {p, e, false};
}

double calibrate_kappa(const CavityConfig& cavity, double signal_power, double target_pump, double pump_tolerance,
                       double search_max_pump) {
  if (!(target_pump > 0.0)) throw DomainError("calibrate_kappa: target pump must be positive");
  cavity.validate();
  CavityConfig cfg = cavity;
  if (!(search_max_pump > target_pump)) search_max_pump = 3.0 * target_pump;

  // Starting point from the weak-signal impedance-matching estimate: the
  // double-pass conversion loss 4 (kappa L)^2 N_pump,circ equals the signal's
  // coupler transmission plus its other round-trip losses.
  if (cfg.crystal.kappa <= 0.0) {
    const auto& m = cfg.mirrors;
    const double L = cfg.crystal.length;
    const double r_s = cfg.roundtrip_factor(Channel::signal);
    const double r_p = cfg.roundtrip_factor(Channel::pump);
    const double signal_loss = 1.0 - r_s * r_s;
    const double pump_circ =
        resonant_buildup(1.0 - m.R(Side::left, Channel::pump), r_p) * power_to_flux(target_pump, Channel::pump);
    cfg.crystal.kappa = std::sqrt(signal_loss / (4.0 * L * L * pump_circ));
  }

  for (int iter = 0; iter < 12; ++iter) {
    const Peak peak = maximize_over_pump(cfg, signal_power, 0.0, search_max_pump, 12, 0.25 * pump_tolerance);
    if (std::abs(peak.pump_power - target_pump) <= pump_tolerance) return cfg.crystal.kappa;
    cfg.crystal.kappa *= std::sqrt(peak.pump_power / target_pump);
  }
  throw NumericError("calibrate_kappa: peak position did not settle");
}

// ---------------------------------------------------------------------------

CavityConfig with_left_coupler(CavityConfig cavity, double R, CouplerChannels channels) {
  cavity.mirrors.R(Side::left, Channel::signal) = R;
  if (channels == CouplerChannels::signal_and_pump) cavity.mirrors.R(Side::left, Channel::pump) = R;
  return cavity;
}

CouplerOptimum optimize_coupler(const CavityConfig& cavity, double signal_power, double pump_budget,
                                std::array<double, 2> r_range, const CouplerOptions& options) {
  const auto [r_lo, r_hi] = r_range;
  if (!(r_lo > 0.0 && r_hi < 1.0 && r_lo <= r_hi)) throw DomainError("optimize_coupler: need 0 < R_lo <= R_hi < 1");
  if (!(pump_budget > 0.0)) throw DomainError("optimize_coupler: pump budget must be positive");
  cavity.validate();

  CouplerOptimum out;
  const auto evaluate = [&](double R) {
    CouplerGridPoint pt{R, 0.0, 0.0, false};
    const Peak p = maximize_over_pump(with_left_coupler(cavity, R, options.channels), signal_power, 0.0, pump_budget);
    if (p.eta >= 0.0) pt = {R, p.eta, p.pump_power, true};
    return pt;
  };

  const auto grid = linear_grid(r_lo, r_hi, r_lo == r_hi ? 1 : std::max(options.grid_points, 3));
  out.grid.resize(grid.size());
  parallel_for(grid.size(), 0, [&](std::size_t i) { out.grid[i] = evaluate(grid[i]); });

  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = out.grid[i].ok ? out.grid[i].eta : -1.0;
    if (!out.grid[i].ok) out.warnings.push_back(fmt::format("R = {:.6f}: no converged operating point", grid[i]));
  }
  if (std::none_of(out.grid.begin(), out.grid.end(), [](const auto& g) { return g.ok; }))
    throw NumericError("optimize_coupler: no grid point converged");

  CouplerGridPoint best{};
  const auto [R, eta] = bracketed_max([&](double r) { return evaluate(r).eta; }, grid, values, options.r_tolerance);
  best = evaluate(R);
  for (const auto& g : out.grid)
    if (g.ok && g.eta > best.eta) best = g;
  out.best_R = best.reflectivity;
  out.best_eta = best.eta;
  out.best_pump = best.pump_power;
  (void)eta;
  return out;
}

// ---------------------------------------------------------------------------

void MeasurementSeries::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (double v : {r.pump_power, r.pd_1550_in, r.pd_1550_refl, r.pd_1550_trans, r.pd_810_trans, r.pd_532_trans}) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(fmt::format("measurement row {}: negative reading", i + 1));
    }
    if (i > 0 && !(r.pump_power > rows[i - 1].pump_power))
      throw DomainError(fmt::format("measurement row {}: pump powers must be strictly increasing", i + 1));
  }
}

MeasuredMetrics measured_metrics(const MeasurementSeries& measured, double gamma,
                                 DepletionNormalization normalization) {
  measured.validate();
  if (measured.rows.empty()) throw DomainError("measured_metrics: empty series");
  const MetricsConfig metrics{gamma, 0.0};

  double trans_max = 0.0;
  for (const auto& r : measured.rows) trans_max = std::max(trans_max, r.pd_1550_trans);
  const double series_refl_max = measured.rows.front().pd_1550_in;

  MeasuredMetrics out;
  for (const auto& r : measured.rows) {
    out.eta.push_back(efficiency_eq1(r.pd_532_trans, r.pd_1550_in, metrics));
    const double refl_max = normalization == DepletionNormalization::series ? series_refl_max : r.pd_1550_in;
    if (!(refl_max > 0.0)) throw DomainError("measured_metrics: incident monitor reads zero");
    const double trans_norm = trans_max > 0.0 ? r.pd_1550_trans / trans_max : 0.0;
    out.delta.push_back(depletion_eq2(r.pd_1550_refl / refl_max, trans_norm, trans_max / refl_max));
  }
  return out;
}

namespace {

std::vector<PumpOffReference> references_for(const MeasurementSeries& measured, const CavityConfig& cavity) {
  std::vector<PumpOffReference> refs;
  for (const auto& r : measured.rows) {
    if (!refs.empty() && r.pd_1550_in == measured.rows[refs.size() - 1].pd_1550_in) {
      refs.push_back(refs.back());
      continue;
    }
    DriveConfig d;
    d.input_power_signal = r.pd_1550_in;
    refs.push_back(pump_off_reference(cavity, d));
  }
  return refs;
}

ModelMetrics model_metrics_with(const MeasurementSeries& measured, const CavityConfig& cavity,
                                const std::vector<PumpOffReference>& refs) {
  ModelMetrics out;
  const std::size_t n = measured.rows.size();
  out.eta.assign(n, 0.0);
  out.delta.assign(n, 0.0);
  std::vector<char> ok(n, 0);
  parallel_for(n, 0, [&](std::size_t i) {
    DriveConfig d;
    d.input_power_signal = measured.rows[i].pd_1550_in;
    d.input_power_pump = measured.rows[i].pump_power;
    try {
      const auto r = solve_steady_state(cavity, d, SolveOptions{.reference = refs[i], .depletion = true});
      out.eta[i] = r.eta;
      out.delta[i] = r.delta_model;
      ok[i] = r.converged;
    } catch (const std::runtime_error&) {
      out.eta[i] = out.delta[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  out.converged.assign(ok.begin(), ok.end());
  return out;
}

}  // namespace

ModelMetrics model_metrics(const MeasurementSeries& measured, const CavityConfig& cavity) {
  measured.validate();
  cavity.validate();
  return model_metrics_with(measured, cavity, references_for(measured, cavity));
}

double fit_residual(const MeasuredMetrics& measured, const ModelMetrics& model) {
  const auto scale = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m > 0.0 ? m : 1.0;
  };
  const double eta_scale = scale(measured.eta);
  const double delta_scale = scale(measured.delta);
  double sum = 0.0;
  for (std::size_t i = 0; i < measured.eta.size(); ++i) {
    const double de = (model.eta[i] - measured.eta[i]) / eta_scale;
    const double dd = (model.delta[i] - measured.delta[i]) / delta_scale;
    sum += de * de + dd * dd;
  }
  return std::isfinite(sum) ? sum : std::numeric_limits<double>::infinity();
}

FitResult fit_parameters(const MeasurementSeries& measured, const CavityConfig& cavity, FreeParameters free,
                         const FitOptions& options) {
  if (measured.rows.size() < 5) throw DomainError("fit_parameters: need at least five measurement rows");
  if (free.count() == 0) throw DomainError("fit_parameters: no free parameters requested");
  if (!(options.gamma_initial > 0.0)) throw DomainError("fit_parameters: initial gamma must be positive");
  measured.validate();
  cavity.validate();
  if (free.kappa && !(cavity.crystal.kappa > 0.0))
    throw DomainError("fit_parameters: fitting kappa needs a positive starting kappa");

  // Coordinates: gamma, kappa / kappa0, delta_k * L (only the free ones).
  const double kappa0 = cavity.crystal.kappa;
  const double length = cavity.crystal.length;
  const auto refs = references_for(measured, cavity);

  struct Params {
    double gamma, kappa, delta_k;
  };
  const auto unpack = [&](const std::vector<double>& x) {
    Params p{options.gamma_initial, kappa0, cavity.crystal.delta_k};
    std::size_t k = 0;
    if (free.gamma) p.gamma = x[k++];
    if (free.kappa) p.kappa = kappa0 * x[k++];
    if (free.delta_k) p.delta_k = x[k++] / length;
    return p;
  };

  const bool model_fixed = !free.kappa && !free.delta_k;
  const ModelMetrics fixed_model = model_fixed ? model_metrics_with(measured, cavity, refs) : ModelMetrics{};

  const auto objective = [&](const std::vector<double>& x) {
    const Params p = unpack(x);
    if (!(p.gamma > 0.0) || !(p.kappa > 0.0)) return std::numeric_limits<double>::infinity();
    const auto meas = measured_metrics(measured, p.gamma, options.normalization);
    if (model_fixed) return fit_residual(meas, fixed_model);
    CavityConfig cfg = cavity;
    cfg.crystal.kappa = p.kappa;
    cfg.crystal.delta_k = p.delta_k;
    return fit_residual(meas, model_metrics_with(measured, cfg, refs));
  };

  std::vector<double> x, step;
  if (free.gamma) {
    x.push_back(options.gamma_initial);
    step.push_back(0.05 * options.gamma_initial);
  }
  if (free.kappa) {
    x.push_back(1.0);
    step.push_back(0.05);
  }
  if (free.delta_k) {
    x.push_back(cavity.crystal.delta_k * length);
    step.push_back(0.2);
  }

  SimplexResult best = nelder_mead(objective, x, step, options.max_iterations, options.tolerance);
  int evaluations = best.evaluations;
  for (int restart = 0; restart < options.max_restarts; ++restart) {
    std::vector<double> restart_step(step.size());
    for (std::size_t i = 0; i < step.size(); ++i) restart_step[i] = 0.1 * step[i];
    const SimplexResult again = nelder_mead(objective, best.x, restart_step, options.max_iterations, options.tolerance);
    evaluations += again.evaluations;
    const double gain = best.value - again.value;
    if (again.value < best.value) best = again;
    if (gain < options.tolerance) break;
  }

  const Params p = unpack(best.x);
  FitResult out;
  out.gamma = p.gamma;
  out.kappa = p.kappa;
  out.delta_k = p.delta_k;
  out.residual = best.value;
  out.iterations = evaluations;
  out.converged = best.converged;
  return out;
}

MeasurementSeries synthesize_measurements(const CavityConfig& cavity, double signal_power,
                                          const std::vector<double>& pump_powers, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("synthesize_measurements: gamma must be positive");
  cavity.validate();
  DriveConfig base;
  base.input_power_signal = signal_power;
  const PumpOffReference ref = pump_off_reference(cavity, base);

  MeasurementSeries out;
  out.rows.resize(pump_powers.size());
  std::vector<double> sorted = pump_powers;
  std::sort(sorted.begin(), sorted.end());
  parallel_for(sorted.size(), 0, [&](std::size_t i) {
    DriveConfig d = base;
    d.input_power_pump = sorted[i];
    const auto r = solve_steady_state(cavity, d, SolveOptions{.reference = ref, .depletion = false});
    if (!r.converged) throw NumericError("synthesize_measurements: steady state did not converge");
    out.rows[i] = {sorted[i], signal_power, r.reflected_1550, r.transmitted_1550, r.transmitted_810,
                   r.out_532 / gamma};
  });
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const std::vector<double>& step, int max_evaluations, double tolerance) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) throw DomainError("nelder_mead: dimension mismatch");

  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  std::vector<double> vals(n + 1);
  int evals = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  const auto along = [&](const std::vector<double>& c, const std::vector<double>& worst, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (worst[j] - c[j]);
    return x;
  };

  bool converged = false;
  std::vector<std::size_t> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    if (std::isfinite(vals[worst]) && vals[worst] - vals[best] <= tolerance) {
      converged = true;
      break;
    }
    if (evals >= max_evaluations) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
    }

    const auto xr = along(centroid, pts[worst], -1.0);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const auto xe = along(centroid, pts[worst], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const auto xc = along(centroid, outside ? xr : pts[worst], 0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          vals[i] = eval(pts[i]);
        }
      }
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], evals, converged};
}

// ---------------------------------------------------------------------------

double roundtrip_amplitude_factor(double R1, double R2, double alpha, double roundtrip_length) {
  if (R1 < 0.0 || R1 > 1.0 || R2 < 0.0 || R2 > 1.0) throw DomainError("reflectivities must lie in [0, 1]");
  if (alpha < 0.0 || roundtrip_length < 0.0) throw DomainError("loss and length must be >= 0");
  return std::sqrt(R1 * R2) * std::exp(-0.5 * alpha * roundtrip_length);
}

double finesse(double r_effective) {
  if (!(r_effective > 0.0)) throw DomainError("finesse: round-trip factor must be positive");
  if (!(r_effective < 1.0)) throw DomainError("finesse: a lossless resonator has no finite finesse");
  return std::numbers::pi * std::sqrt(r_effective) / (1.0 - r_effective);
}

Resonance linewidth_and_fsr(double optical_roundtrip_length, double finesse_value) {
  if (!(optical_roundtrip_length > 0.0) || !(finesse_value > 0.0))
    throw DomainError("linewidth_and_fsr: inputs must be positive");
  const double fsr = kSpeedOfLight / optical_roundtrip_length;
  return {fsr, fsr / finesse_value};
}

double roundtrip_length_for_linewidth(double linewidth, double finesse_value) {
  if (!(linewidth > 0.0) || !(finesse_value > 0.0)) throw DomainError("inputs must be positive");
  return kSpeedOfLight / (finesse_value * linewidth);
}

double resonant_buildup(double T1, double r_effective) {
  if (!(r_effective >= 0.0 && r_effective < 1.0)) throw DomainError("resonant_buildup: need 0 <= r < 1");
  return T1 / ((1.0 - r_effective) * (1.0 - r_effective));
}

}  // namespace sfgcav
