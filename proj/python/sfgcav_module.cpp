#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sfgcav/analysis.hpp"
#include "sfgcav/config.hpp"
#include "sfgcav/propagation.hpp"

namespace py = pybind11;
using namespace sfgcav;

namespace {

FieldTriple triple(Complex s, Complex p, Complex u) { return {s, p, u}; }

py::dict to_dict(const SteadyStateResult& r) {
  py::dict d;
  d["converged"] = r.converged;
  d["roundtrips"] = r.roundtrips_used;
  d["eta"] = r.eta;
  d["delta"] = r.delta_model;
  d["reflected_1550"] = r.reflected_1550;
  d["reflected_810"] = r.reflected_810;
  d["transmitted_1550"] = r.transmitted_1550;
  d["transmitted_810"] = r.transmitted_810;
  d["out_532"] = r.out_532;
  d["leak_532_left"] = r.leak_532_left;
  d["circulating_power"] = r.circulating_power;
  d["absorbed_flux"] = r.absorbed_flux;
  d["scattered_flux"] = r.scattered_flux;
  return d;
}

DriveConfig make_drive(double signal, double pump) {
  DriveConfig d;
  d.input_power_signal = signal;
  d.input_power_pump = pump;
  return d;
}

}  // namespace

PYBIND11_MODULE(sfgcav, m) {
  m.doc() = "Cavity-enhanced sum-frequency generation simulator (SI units: W, m)";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Channel>(m, "Channel")
      .value("signal", Channel::signal)
      .value("pump", Channel::pump)
      .value("sum", Channel::sum);
  py::enum_<Side>(m, "Side").value("left", Side::left).value("right", Side::right);

  m.def("power_to_flux", py::overload_cast<double, Channel>(&power_to_flux), py::arg("power"), py::arg("channel"));
  m.def("flux_to_power", py::overload_cast<double, Channel>(&flux_to_power), py::arg("flux"), py::arg("channel"));
  m.def(
      "efficiency_eq1",
      [](double p532, double p1550, double gamma) { return efficiency_eq1(p532, p1550, {gamma, 0.0}); },
      py::arg("p_532"), py::arg("p_1550"), py::arg("gamma") = 1.0);
  m.def("depletion_eq2", &depletion_eq2, py::arg("refl_norm"), py::arg("trans_norm"), py::arg("kappa_ratio"));

  py::class_<CrystalSpec>(m, "CrystalSpec")
      .def(py::init<>())
      .def_readwrite("length", &CrystalSpec::length)
      .def_readwrite("alpha_signal", &CrystalSpec::alpha_signal)
      .def_readwrite("alpha_pump", &CrystalSpec::alpha_pump)
      .def_readwrite("alpha_sum", &CrystalSpec::alpha_sum)
      .def_readwrite("kappa", &CrystalSpec::kappa)
      .def_readwrite("delta_k", &CrystalSpec::delta_k);

  py::class_<SolverSettings>(m, "SolverSettings")
      .def(py::init<>())
      .def_readwrite("max_roundtrips", &SolverSettings::max_roundtrips)
      .def_readwrite("rel_tolerance", &SolverSettings::rel_tolerance)
      .def_readwrite("steps_per_pass", &SolverSettings::steps_per_pass);

  py::class_<CavityConfig>(m, "CavityConfig")
      .def(py::init<>())
      .def_static("paper_default", &CavityConfig::paper_default)
      .def_readwrite("crystal", &CavityConfig::crystal)
      .def_readwrite("solver", &CavityConfig::solver)
      .def_readwrite("roundtrip_phase", &CavityConfig::roundtrip_phase)
      .def_readwrite("excess_loss", &CavityConfig::excess_loss)
      .def("reflectivity", [](const CavityConfig& c, Side s, Channel ch) { return c.mirrors.R(s, ch); })
      .def("set_reflectivity", [](CavityConfig& c, Side s, Channel ch, double R) { c.mirrors.R(s, ch) = R; })
      .def("roundtrip_factor", &CavityConfig::roundtrip_factor)
      .def("validate", &CavityConfig::validate);

  m.def(
      "integrate_pass",
      [](Complex s, Complex p, Complex u, const CrystalSpec& c, int steps, bool backward) {
        const PassResult r =
            integrate_pass(triple(s, p, u), c, backward ? Direction::backward : Direction::forward, steps);
        return py::make_tuple(py::make_tuple(r.out_fields.signal, r.out_fields.pump, r.out_fields.sum),
                              r.absorbed_flux);
      },
      py::arg("signal"), py::arg("pump"), py::arg("sum"), py::arg("crystal"), py::arg("steps") = kDefaultStepsPerPass,
      py::arg("backward") = false, "Returns ((signal, pump, sum), absorbed_flux).");
  m.def(
      "undepleted_pump_oracle",
      [](Complex a_s0, double pump_flux, const CrystalSpec& c, double z) {
        const FieldTriple f = undepleted_pump_oracle(a_s0, pump_flux, c, z);
        return py::make_tuple(f.signal, f.pump, f.sum);
      },
      py::arg("a_s0"), py::arg("pump_flux"), py::arg("crystal"), py::arg("z"));

  m.def(
      "solve_steady_state",
      [](const CavityConfig& c, double signal, double pump) {
        return to_dict(solve_steady_state(c, make_drive(signal, pump)));
      },
      py::arg("cavity"), py::arg("signal_power"), py::arg("pump_power"));
  m.def(
      "photon_budget",
      [](const CavityConfig& c, double signal, double pump) {
        const DriveConfig d = make_drive(signal, pump);
        const PhotonBudget b = photon_budget(solve_steady_state(c, d), d);
        py::dict out;
        out["residual_signal"] = b.residual_signal;
        out["residual_pump"] = b.residual_pump;
        out["converted_flux"] = b.converted_flux;
        return out;
      },
      py::arg("cavity"), py::arg("signal_power"), py::arg("pump_power"));

  m.def(
      "sweep_pump",
      [](const CavityConfig& c, double signal, std::vector<double> pumps) {
        py::list rows;
        for (const auto& r : sweep_pump(c, signal, std::move(pumps)).rows)
          rows.append(py::make_tuple(r.pump_power, r.eta, r.delta, r.converged, r.roundtrips));
        return rows;
      },
      py::arg("cavity"), py::arg("signal_power"), py::arg("pump_powers"),
      "Rows of (pump_power, eta, delta, converged, roundtrips), ascending pump power.");
  m.def("linear_grid", &linear_grid, py::arg("lo"), py::arg("hi"), py::arg("points"));
  m.def(
      "maximize_over_pump",
      [](const CavityConfig& c, double signal, double lo, double hi) {
        const Peak p = maximize_over_pump(c, signal, lo, hi);
        return py::make_tuple(p.pump_power, p.eta);
      },
      py::arg("cavity"), py::arg("signal_power"), py::arg("lo"), py::arg("hi"));
  m.def("calibrate_kappa", &calibrate_kappa, py::arg("cavity"), py::arg("signal_power"), py::arg("target_pump"),
        py::arg("pump_tolerance") = 0.25e-3, py::arg("search_max_pump") = 0.6);
  m.def(
      "optimize_coupler",
      [](const CavityConfig& c, double signal, double budget, double r_lo, double r_hi, int grid_points) {
        CouplerOptions o;
        o.grid_points = grid_points;
        const CouplerOptimum r = optimize_coupler(c, signal, budget, {r_lo, r_hi}, o);
        py::dict out;
        out["best_R"] = r.best_R;
        out["best_eta"] = r.best_eta;
        out["best_pump"] = r.best_pump;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("cavity"), py::arg("signal_power"), py::arg("pump_budget"), py::arg("r_lo"), py::arg("r_hi"),
      py::arg("grid_points") = 20);

  py::class_<MeasurementRow>(m, "MeasurementRow")
      .def(py::init<>())
      .def_readwrite("pump_power", &MeasurementRow::pump_power)
      .def_readwrite("pd_1550_in", &MeasurementRow::pd_1550_in)
      .def_readwrite("pd_1550_refl", &MeasurementRow::pd_1550_refl)
      .def_readwrite("pd_1550_trans", &MeasurementRow::pd_1550_trans)
      .def_readwrite("pd_810_trans", &MeasurementRow::pd_810_trans)
      .def_readwrite("pd_532_trans", &MeasurementRow::pd_532_trans);
  m.def(
      "synthesize_measurements",
      [](const CavityConfig& c, double signal, const std::vector<double>& pumps, double gamma) {
        return synthesize_measurements(c, signal, pumps, gamma).rows;
      },
      py::arg("cavity"), py::arg("signal_power"), py::arg("pump_powers"), py::arg("gamma"));
  m.def(
      "fit_parameters",
      [](const std::vector<MeasurementRow>& rows, const CavityConfig& c, bool gamma, bool kappa, bool delta_k,
         double gamma_initial) {
        FitOptions o;
        o.gamma_initial = gamma_initial;
        const FitResult f = fit_parameters(MeasurementSeries{rows}, c, {gamma, kappa, delta_k}, o);
        py::dict out;
        out["gamma"] = f.gamma;
        out["kappa"] = f.kappa;
        out["delta_k"] = f.delta_k;
        out["residual"] = f.residual;
        out["iterations"] = f.iterations;
        out["converged"] = f.converged;
        return out;
      },
      py::arg("rows"), py::arg("cavity"), py::arg("gamma") = true, py::arg("kappa") = false,
      py::arg("delta_k") = false, py::arg("gamma_initial") = 1.0);

  m.def("finesse", &finesse, py::arg("r_effective"));
  m.def("roundtrip_amplitude_factor", &roundtrip_amplitude_factor, py::arg("R1"), py::arg("R2"), py::arg("alpha"),
        py::arg("roundtrip_length"));
  m.def(
      "linewidth_and_fsr",
      [](double lrt, double F) {
        const Resonance r = linewidth_and_fsr(lrt, F);
        return py::make_tuple(r.fsr, r.linewidth);
      },
      py::arg("optical_roundtrip_length"), py::arg("finesse"), "Returns (fsr, linewidth) in Hz.");
  m.def("roundtrip_length_for_linewidth", &roundtrip_length_for_linewidth, py::arg("linewidth"), py::arg("finesse"));
  m.def("resonant_buildup", &resonant_buildup, py::arg("T1"), py::arg("r_effective"));

  m.def(
      "load_config",
      [](const std::string& path) {
        const RunConfig cfg = load_config(path);
        return py::make_tuple(cfg.cavity, cfg.drive.input_power_signal, cfg.drive.input_power_pump);
      },
      py::arg("path"), "Returns (cavity, signal_power, pump_power).");
}
