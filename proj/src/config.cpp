#include "sfgcav/config.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <map>
#include <set>

namespace sfgcav {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

const std::set<std::string> kSections{"crystal", "mirrors", "cavity", "solver",    "drive",    "calibration",
                                      "sweep",   "optimize", "fit",   "resonator", "output"};

class Document {
 public:
  Document(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!kSections.contains(section)) fail(line_no, fmt::format("unknown section [{}]", section));
        if (!seen_sections_.insert(section).second) fail(line_no, fmt::format("duplicate section [{}]", section));
        section_lines_[section] = line_no;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      if (section.empty()) fail(line_no, "key outside of any section");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(line_no, "empty key");
      auto& sec = entries_[section];
      if (sec.contains(key)) fail(line_no, fmt::format("duplicate key '{}' in [{}]", key, section));
      sec[key] = {value, line_no, false};
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(fmt::format("{}:{}: {}", source_, line, msg));
  }

  bool has_section(const std::string& s) const { return seen_sections_.contains(s); }
  int section_line(const std::string& s) const {
    const auto it = section_lines_.find(s);
    return it == section_lines_.end() ? 0 : it->second;
  }

  Entry* find(const std::string& section, const std::string& key) {
    auto s = entries_.find(section);
    if (s == entries_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  std::optional<double> number(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return parse_number(*e, section, key);
  }

  double parse_number(const Entry& e, const std::string& section, const std::string& key) const {
    double v = 0.0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
      fail(e.line, fmt::format("{}.{}: '{}' is not a finite number", section, key, e.value));
    return v;
  }

  std::optional<int> integer(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) return std::nullopt;
    int v = 0;
    const char* begin = e->value.data();
    const char* end = begin + e->value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) fail(e->line, fmt::format("{}.{}: '{}' is not an integer", section, key, e->value));
    return v;
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::vector<double> list(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) return {};
    std::vector<double> out;
    std::string_view rest = e->value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      Entry item{trim(rest.substr(0, comma)), e->line, true};
      out.push_back(parse_number(item, section, key));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return out;
  }

  int line_of(const std::string& section, const std::string& key) const {
    auto s = entries_.find(section);
    if (s == entries_.end()) return section_line(section);
    auto k = s->second.find(key);
    return k == s->second.end() ? section_line(section) : k->second.line;
  }

  void reject_unused() const {
    for (const auto& [section, keys] : entries_)
      for (const auto& [key, e] : keys)
        if (!e.used) fail(e.line, fmt::format("unknown key '{}' in [{}]", key, section));
  }

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> entries_;
  std::set<std::string> seen_sections_;
  std::map<std::string, int> section_lines_;
};

// Reads an optional key and checks it against a named invariant.
template <typename Check>
void read(Document& doc, const std::string& section, const std::string& key, double& target, double scale,
          Check&& check, const char* invariant) {
  if (auto v = doc.number(section, key)) {
    if (!check(*v)) doc.fail(doc.line_of(section, key), fmt::format("{}.{} = {} violates {}", section, key, *v, invariant));
    target = *v * scale;
  }
}

const auto any = [](double) { return true; };
const auto positive = [](double v) { return v > 0.0; };
const auto non_negative = [](double v) { return v >= 0.0; };
const auto probability = [](double v) { return v >= 0.0 && v <= 1.0; };

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
  Document doc(in, source);
  RunConfig cfg;
  cfg.cavity = CavityConfig::paper_default();
  cfg.drive.input_power_signal = 2e-3;

  auto& crystal = cfg.cavity.crystal;
  read(doc, "crystal", "length_mm", crystal.length, 1e-3, positive, "length > 0");
  read(doc, "crystal", "alpha_signal", crystal.alpha_signal, 1.0, non_negative, "alpha >= 0");
  read(doc, "crystal", "alpha_pump", crystal.alpha_pump, 1.0, non_negative, "alpha >= 0");
  read(doc, "crystal", "alpha_sum", crystal.alpha_sum, 1.0, non_negative, "alpha >= 0");
  read(doc, "crystal", "kappa", crystal.kappa, 1.0, non_negative, "kappa >= 0");
  read(doc, "crystal", "delta_k", crystal.delta_k, 1.0, any, "finite delta_k");

  auto& m = cfg.cavity.mirrors;
  for (auto side : {Side::left, Side::right}) {
    for (auto c : kAllChannels) {
      const std::string key = fmt::format("{}_{}", side == Side::left ? "left" : "right", to_string(c));
      read(doc, "mirrors", key, m.R(side, c), 1.0, probability, "0 <= R <= 1");
    }
  }

  for (auto c : kAllChannels) {
    read(doc, "cavity", fmt::format("phase_{}", to_string(c)), cfg.cavity.roundtrip_phase[index(c)], 1.0, any,
         "finite phase");
  }
  // Excess loss either directly or through a target cold-cavity finesse.
  for (auto c : kAllChannels) {
    const std::string loss_key = fmt::format("excess_loss_{}", to_string(c));
    const std::string finesse_key = fmt::format("finesse_{}", to_string(c));
    const auto loss = doc.number("cavity", loss_key);
    const auto target = doc.number("cavity", finesse_key);
    if (loss && target)
      doc.fail(doc.line_of("cavity", finesse_key), fmt::format("set either {} or {}, not both", loss_key, finesse_key));
    if (loss) {
      if (!(*loss >= 0.0 && *loss < 1.0))
        doc.fail(doc.line_of("cavity", loss_key), fmt::format("cavity.{} = {} violates 0 <= loss < 1", loss_key, *loss));
      cfg.cavity.excess_loss[index(c)] = *loss;
    }
    if (target) {
      try {
        cfg.cavity.excess_loss[index(c)] = excess_loss_for_finesse(cfg.cavity, c, *target);
      } catch (const DomainError& e) {
        doc.fail(doc.line_of("cavity", finesse_key), fmt::format("cavity.{}: {}", finesse_key, e.what()));
      }
    }
  }

  auto& solver = cfg.cavity.solver;
  if (auto v = doc.integer("solver", "max_roundtrips")) {
    if (*v < 1) doc.fail(doc.line_of("solver", "max_roundtrips"), "solver.max_roundtrips violates max_roundtrips >= 1");
    solver.max_roundtrips = *v;
  }
  read(doc, "solver", "rel_tolerance", solver.rel_tolerance, 1.0, positive, "rel_tolerance > 0");
  if (auto v = doc.integer("solver", "steps_per_pass")) {
    if (*v < 1) doc.fail(doc.line_of("solver", "steps_per_pass"), "solver.steps_per_pass violates steps >= 1");
    solver.steps_per_pass = *v;
  }

  read(doc, "drive", "signal_mW", cfg.drive.input_power_signal, 1e-3, non_negative, "power >= 0");
  read(doc, "drive", "pump_mW", cfg.drive.input_power_pump, 1e-3, non_negative, "power >= 0");
  read(doc, "drive", "phase_signal", cfg.drive.phase_signal, 1.0, any, "finite phase");
  read(doc, "drive", "phase_pump", cfg.drive.phase_pump, 1.0, any, "finite phase");

  if (doc.has_section("calibration")) {
    double peak = 0.0;
    read(doc, "calibration", "peak_pump_mW", peak, 1e-3, positive, "peak pump > 0");
    if (peak > 0.0) cfg.calibrate_peak_pump = peak;
  }

  if (doc.has_section("sweep")) {
    SweepBlock sweep;
    sweep.pump_powers = doc.list("sweep", "pump_list_mW");
    for (double& p : sweep.pump_powers) {
      if (p < 0.0) doc.fail(doc.line_of("sweep", "pump_list_mW"), "sweep.pump_list_mW violates power >= 0");
      p *= 1e-3;
    }
    const auto lo = doc.number("sweep", "pump_min_mW");
    const auto hi = doc.number("sweep", "pump_max_mW");
    const auto points = doc.integer("sweep", "points");
    if (lo || hi || points) {
      if (!sweep.pump_powers.empty())
        doc.fail(doc.line_of("sweep", "pump_list_mW"), "use either pump_list_mW or pump_min_mW/pump_max_mW/points");
      if (!lo || !hi || !points)
        doc.fail(doc.section_line("sweep"), "[sweep] needs pump_min_mW, pump_max_mW and points together");
      if (*lo < 0.0 || *hi < *lo) doc.fail(doc.line_of("sweep", "pump_max_mW"), "sweep grid violates 0 <= min <= max");
      if (*points < 1) doc.fail(doc.line_of("sweep", "points"), "sweep.points violates points >= 1");
      sweep.pump_powers = linear_grid(*lo * 1e-3, *hi * 1e-3, *points);
    }
    if (sweep.pump_powers.empty()) doc.fail(doc.section_line("sweep"), "[sweep] defines no pump powers");
    if (auto f = doc.text("sweep", "format")) {
      if (*f == "efficiency")
        sweep.format = SweepFormat::efficiency;
      else if (*f == "detectors")
        sweep.format = SweepFormat::detectors;
      else
        doc.fail(doc.line_of("sweep", "format"), fmt::format("sweep.format '{}' is not efficiency|detectors", *f));
    }
    read(doc, "sweep", "detector_gamma", sweep.detector_gamma, 1.0, positive, "gamma > 0");
    cfg.sweep = sweep;
  }

  if (doc.has_section("optimize")) {
    OptimizeBlock opt;
    read(doc, "optimize", "r_min", opt.r_min, 1.0, [](double v) { return v > 0.0 && v < 1.0; }, "0 < R < 1");
    read(doc, "optimize", "r_max", opt.r_max, 1.0, [](double v) { return v > 0.0 && v < 1.0; }, "0 < R < 1");
    if (opt.r_min > opt.r_max) doc.fail(doc.line_of("optimize", "r_max"), "optimize range violates r_min <= r_max");
    read(doc, "optimize", "pump_budget_mW", opt.pump_budget, 1e-3, positive, "budget > 0");
    if (auto v = doc.integer("optimize", "grid_points")) {
      if (*v < 3) doc.fail(doc.line_of("optimize", "grid_points"), "optimize.grid_points violates grid_points >= 3");
      opt.options.grid_points = *v;
    }
    read(doc, "optimize", "r_tolerance", opt.options.r_tolerance, 1.0, positive, "tolerance > 0");
    if (auto c = doc.text("optimize", "couple")) {
      if (*c == "signal")
        opt.options.channels = CouplerChannels::signal;
      else if (*c == "signal+pump")
        opt.options.channels = CouplerChannels::signal_and_pump;
      else
        doc.fail(doc.line_of("optimize", "couple"), fmt::format("optimize.couple '{}' is not signal|signal+pump", *c));
    }
    cfg.optimize = opt;
  }

  if (doc.has_section("fit")) {
    FitBlock fit;
    if (auto free = doc.text("fit", "free")) {
      std::string_view rest = *free;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string name = trim(rest.substr(0, comma));
        if (name == "gamma")
          fit.free.gamma = true;
        else if (name == "kappa")
          fit.free.kappa = true;
        else if (name == "delta_k")
          fit.free.delta_k = true;
        else if (!name.empty())
          doc.fail(doc.line_of("fit", "free"), fmt::format("fit.free: unknown parameter '{}' (gamma, kappa, delta_k)", name));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    }
    read(doc, "fit", "gamma_initial", fit.options.gamma_initial, 1.0, positive, "gamma > 0");
    if (auto v = doc.integer("fit", "max_iterations")) {
      if (*v < 1) doc.fail(doc.line_of("fit", "max_iterations"), "fit.max_iterations violates >= 1");
      fit.options.max_iterations = *v;
    }
    if (auto v = doc.integer("fit", "max_restarts")) {
      if (*v < 0) doc.fail(doc.line_of("fit", "max_restarts"), "fit.max_restarts violates >= 0");
      fit.options.max_restarts = *v;
    }
    read(doc, "fit", "tolerance", fit.options.tolerance, 1.0, positive, "tolerance > 0");
    if (auto n = doc.text("fit", "normalization")) {
      if (*n == "series")
        fit.options.normalization = DepletionNormalization::series;
      else if (*n == "per_row")
        fit.options.normalization = DepletionNormalization::per_row;
      else
        doc.fail(doc.line_of("fit", "normalization"), fmt::format("fit.normalization '{}' is not series|per_row", *n));
    }
    cfg.fit = fit;
  }

  if (doc.has_section("resonator")) {
    ResonatorBlock res;
    const auto set = [&](const char* key, std::optional<double>& target, double scale) {
      if (auto v = doc.number("resonator", key)) {
        if (!(*v > 0.0)) doc.fail(doc.line_of("resonator", key), fmt::format("resonator.{} violates value > 0", key));
        target = *v * scale;
      }
    };
    set("finesse", res.finesse, 1.0);
    set("optical_roundtrip_m", res.optical_roundtrip_length, 1.0);
    set("length_mm", res.length, 1e-3);
    set("refractive_index", res.refractive_index, 1.0);
    set("linewidth_MHz", res.linewidth, 1e6);
    if (auto v = doc.text("resonator", "standing_wave")) {
      if (*v == "true")
        res.standing_wave = true;
      else if (*v == "false")
        res.standing_wave = false;
      else
        doc.fail(doc.line_of("resonator", "standing_wave"), "resonator.standing_wave must be true|false");
    }
    cfg.resonator = res;
  }

  if (auto p = doc.text("output", "path")) cfg.output_path = *p;

  doc.reject_unused();
  try {
    cfg.cavity.validate();
    cfg.drive.validate();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open configuration file", path));
  return parse_config(in, path);
}

}  // namespace sfgcav
