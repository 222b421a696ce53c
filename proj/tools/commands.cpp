#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sfgcav/analysis.hpp"
#include "sfgcav/config.hpp"
#include "sfgcav/io.hpp"

namespace sfgcav::cli {

namespace {

struct Args {
  std::string config;
  std::string out;
  std::string measurements;
};

// Thrown for bad command usage that the config parser does not catch.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return format_number(v); }

std::string output_path(const Args& args, const RunConfig& cfg) {
  return args.out.empty() ? cfg.output_path : args.out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError(fmt::format("{}: cannot open output file", path));
  f << text;
  if (!f) throw UsageError(fmt::format("{}: write failed", path));
}

// Applies the [calibration] block, if any, and reports the resulting kappa.
void calibrate(RunConfig& cfg, std::ostream& report) {
  if (!cfg.calibrate_peak_pump) return;
  const double kappa = calibrate_kappa(cfg.cavity, cfg.drive.input_power_signal, *cfg.calibrate_peak_pump);
  cfg.cavity.crystal.kappa = kappa;
  report << "calibrated_peak_mW = " << num(*cfg.calibrate_peak_pump * 1e3) << '\n';
}

int cmd_simulate(RunConfig cfg, const Args& args, std::ostream& out) {
  std::ostringstream r;
  calibrate(cfg, r);
  const SteadyStateResult s = solve_steady_state(cfg.cavity, cfg.drive);
  r << "kappa = " << num(cfg.cavity.crystal.kappa) << '\n';
  r << "signal_mW = " << num(cfg.drive.input_power_signal * 1e3) << '\n';
  r << "pump_mW = " << num(cfg.drive.input_power_pump * 1e3) << '\n';
  r << "converged = " << (s.converged ? "true" : "false") << '\n';
  r << "roundtrips = " << s.roundtrips_used << '\n';
  r << "eta = " << num(s.eta) << '\n';
  r << "delta = " << num(s.delta_model) << '\n';
  r << "reflected_1550_mW = " << num(s.reflected_1550 * 1e3) << '\n';
  r << "reflected_810_mW = " << num(s.reflected_810 * 1e3) << '\n';
  r << "transmitted_1550_mW = " << num(s.transmitted_1550 * 1e3) << '\n';
  r << "transmitted_810_mW = " << num(s.transmitted_810 * 1e3) << '\n';
  r << "out_532_mW = " << num(s.out_532 * 1e3) << '\n';
  r << "leak_532_left_mW = " << num(s.leak_532_left * 1e3) << '\n';
  for (auto c : kAllChannels)
    r << "circulating_" << to_string(c) << "_mW = " << num(s.circulating_power[index(c)] * 1e3) << '\n';
  if (s.converged) {
    const PhotonBudget b = photon_budget(s, cfg.drive);
    r << "budget_residual_signal = " << num(b.residual_signal) << '\n';
    r << "budget_residual_pump = " << num(b.residual_pump) << '\n';
  }
  out << r.str();
  const std::string path = output_path(args, cfg);
  if (!path.empty()) write_file(path, r.str());
  return s.converged ? kOk : kNotConverged;
}

int cmd_sweep(RunConfig cfg, const Args& args, std::ostream& out, std::ostream& err) {
  if (!cfg.sweep) throw UsageError("sweep: the configuration has no [sweep] section");
  std::ostringstream note;
  calibrate(cfg, note);
  std::ostringstream csv;
  bool ok = true;
  if (cfg.sweep->format == SweepFormat::detectors) {
    write_measurements_csv(csv, synthesize_measurements(cfg.cavity, cfg.drive.input_power_signal,
                                                        cfg.sweep->pump_powers, cfg.sweep->detector_gamma));
  } else {
    const SweepResult s = sweep_pump(cfg.cavity, cfg.drive.input_power_signal, cfg.sweep->pump_powers);
    write_sweep_csv(csv, s);
    for (const auto& row : s.rows) ok = ok && row.converged;
    try {
      const Peak p = find_peak(s);
      note << "peak_pump_mW = " << num(p.pump_power * 1e3) << '\n' << "peak_eta = " << num(p.eta) << '\n';
    } catch (const DomainError&) {
    }
  }
  note << "kappa = " << num(cfg.cavity.crystal.kappa) << '\n';
  const std::string path = output_path(args, cfg);
  if (path.empty()) {
    out << csv.str();
    err << note.str();
  } else {
    write_file(path, csv.str());
    out << note.str();
  }
  return ok ? kOk : kNotConverged;
}

int cmd_optimize(RunConfig cfg, const Args& args, std::ostream& out, std::ostream& err) {
  if (!cfg.optimize) throw UsageError("optimize: the configuration has no [optimize] section");
  std::ostringstream r;
  calibrate(cfg, r);
  const auto& o = *cfg.optimize;
  const CouplerOptimum best =
      optimize_coupler(cfg.cavity, cfg.drive.input_power_signal, o.pump_budget, {o.r_min, o.r_max}, o.options);
  for (const auto& w : best.warnings) err << "warning: " << w << '\n';
  r << "kappa = " << num(cfg.cavity.crystal.kappa) << '\n';
  r << "best_R = " << num(best.best_R) << '\n';
  r << "best_eta = " << num(best.best_eta) << '\n';
  r << "best_pump_mW = " << num(best.best_pump * 1e3) << '\n';
  out << r.str();
  const std::string path = output_path(args, cfg);
  if (!path.empty()) {
    std::ostringstream csv;
    write_coupler_csv(csv, best);
    write_file(path, csv.str());
  }
  return kOk;
}

int cmd_fit(RunConfig cfg, const Args& args, std::ostream& out) {
  if (args.measurements.empty()) throw UsageError("fit: --measurements <csv> is required");
  const FitBlock block = cfg.fit.value_or(FitBlock{});
  if (block.free.count() == 0)
    throw UsageError("fit: no free parameters; set [fit] free = gamma[,kappa][,delta_k]");
  std::ifstream in(args.measurements);
  if (!in) throw UsageError(fmt::format("{}: cannot open measurements file", args.measurements));
  const MeasurementSeries series = read_measurements_csv(in, args.measurements);
  series.validate();

  std::ostringstream r;
  calibrate(cfg, r);
  const FitResult fit = fit_parameters(series, cfg.cavity, block.free, block.options);
  r << "gamma = " << num(fit.gamma) << '\n';
  r << "kappa = " << num(fit.kappa) << '\n';
  r << "delta_k = " << num(fit.delta_k) << '\n';
  r << "residual = " << num(fit.residual) << '\n';
  r << "iterations = " << fit.iterations << '\n';
  r << "converged = " << (fit.converged ? "true" : "false") << '\n';
  out << r.str();

  const std::string path = output_path(args, cfg);
  if (!path.empty()) {
    CavityConfig fitted = cfg.cavity;
    fitted.crystal.kappa = fit.kappa;
    fitted.crystal.delta_k = fit.delta_k;
    std::ostringstream csv;
    write_fit_csv(csv, series, measured_metrics(series, fit.gamma, block.options.normalization),
                  model_metrics(series, fitted));
    write_file(path, csv.str());
  }
  return fit.converged ? kOk : kNotConverged;
}

int cmd_linewidth(const RunConfig& cfg, const Args& args, std::ostream& out) {
  const ResonatorBlock res = cfg.resonator.value_or(ResonatorBlock{});
  const double F = res.finesse ? *res.finesse : finesse(cfg.cavity.roundtrip_factor(Channel::signal));

  std::optional<double> lrt = res.optical_roundtrip_length;
  if (!lrt && res.length) {
    const double n = res.refractive_index.value_or(default_channel(Channel::signal).refractive_index);
    lrt = (res.standing_wave ? 2.0 : 1.0) * n * *res.length;
  }
  if (!lrt && res.linewidth) lrt = roundtrip_length_for_linewidth(*res.linewidth, F);
  if (!lrt) throw UsageError("linewidth: [resonator] needs optical_roundtrip_m, length_mm or linewidth_MHz");

  const Resonance rr = linewidth_and_fsr(*lrt, F);
  std::ostringstream r;
  r << "finesse = " << num(F) << '\n';
  r << "optical_roundtrip_m = " << num(*lrt) << '\n';
  r << "fsr_GHz = " << num(rr.fsr * 1e-9) << '\n';
  r << "linewidth_MHz = " << num(rr.linewidth * 1e-6) << '\n';
  out << r.str();
  const std::string path = output_path(args, cfg);
  if (!path.empty()) write_file(path, r.str());
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cavity-enhanced sum-frequency generation simulator", "sfgcav"};
  app.require_subcommand(1);
  Args args;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "configuration file")->required();
    sub->add_option("--out", args.out, "output file (report or CSV)");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "steady state at the configured drive");
  CLI::App* sweep = app.add_subcommand("sweep", "eta and delta over the [sweep] pump grid");
  CLI::App* optimize = app.add_subcommand("optimize", "best left-coupler reflectivity");
  CLI::App* fit = app.add_subcommand("fit", "fit gamma / kappa / delta_k to measurements");
  CLI::App* linewidth = app.add_subcommand("linewidth", "finesse, FSR and linewidth");
  for (auto* sub : {simulate, sweep, optimize, fit, linewidth}) common(sub);
  fit->add_option("--measurements", args.measurements, "measurement CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    RunConfig cfg = load_config(args.config);
    if (*simulate) return cmd_simulate(std::move(cfg), args, out);
    if (*sweep) return cmd_sweep(std::move(cfg), args, out, err);
    if (*optimize) return cmd_optimize(std::move(cfg), args, out, err);
    if (*fit) return cmd_fit(std::move(cfg), args, out);
    return cmd_linewidth(cfg, args, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::runtime_error& e) {
    // NumericError, InstabilityError
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  }
}

}  // namespace sfgcav::cli
