#include "sfgcav/io.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <ostream>
#include <vector>

namespace sfgcav {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(std::move(cell));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double to_double(const std::string& cell, const std::string& source, int line, const std::string& column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw CsvError(fmt::format("{}:{}: column {}: '{}' is not a number", source, line, column, cell));
  return v;
}

// Reads the header and the non-empty data lines.
struct Table {
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
};

Table read_table(std::istream& in, const std::string& source) {
  Table t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw CsvError(fmt::format("{}:{}: expected {} fields, found {}", source, line_no, t.header.size(), cells.size()));
    t.rows.emplace_back(line_no, std::move(cells));
  }
  if (t.header.empty()) throw CsvError(fmt::format("{}: empty CSV (no header)", source));
  return t;
}

std::size_t column(const Table& t, const std::string& name, const std::string& source) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw CsvError(fmt::format("{}:1: missing column '{}'", source, name));
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.9g}", v); }

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << kSweepHeader << '\n';
  for (const auto& r : sweep.rows) {
    out << format_number(r.pump_power * 1e3) << ',' << format_number(r.eta) << ',' << format_number(r.delta) << ','
        << (r.converged ? 1 : 0) << ',' << r.roundtrips << '\n';
  }
}

SweepResult read_sweep_csv(std::istream& in, const std::string& source) {
  const Table t = read_table(in, source);
  const auto c_pump = column(t, "pump_mW", source);
  const auto c_eta = column(t, "eta", source);
  const auto c_delta = column(t, "delta", source);
  const auto c_conv = column(t, "converged", source);
  const auto c_trips = column(t, "roundtrips", source);
  SweepResult s;
  for (const auto& [line, cells] : t.rows) {
    SweepRow r;
    r.pump_power = to_double(cells[c_pump], source, line, "pump_mW") * 1e-3;
    r.eta = to_double(cells[c_eta], source, line, "eta");
    r.delta = to_double(cells[c_delta], source, line, "delta");
    r.converged = to_double(cells[c_conv], source, line, "converged") != 0.0;
    r.roundtrips = static_cast<int>(to_double(cells[c_trips], source, line, "roundtrips"));
    s.rows.push_back(r);
  }
  return s;
}

void write_measurements_csv(std::ostream& out, const MeasurementSeries& series) {
  out << kMeasurementHeader << '\n';
  for (const auto& r : series.rows) {
    out << format_number(r.pump_power * 1e3) << ',' << format_number(r.pd_1550_in * 1e3) << ','
        << format_number(r.pd_1550_refl * 1e3) << ',' << format_number(r.pd_1550_trans * 1e3) << ','
        << format_number(r.pd_810_trans * 1e3) << ',' << format_number(r.pd_532_trans * 1e3) << '\n';
  }
}

MeasurementSeries read_measurements_csv(std::istream& in, const std::string& source) {
  const Table t = read_table(in, source);
  const char* names[] = {"pump_mW", "pd1550_in", "pd1550_refl", "pd1550_trans", "pd810_trans", "pd532_trans"};
  std::size_t cols[6];
  for (int i = 0; i < 6; ++i) cols[i] = column(t, names[i], source);
  if (t.rows.empty()) throw CsvError(fmt::format("{}: no measurement rows", source));

  MeasurementSeries s;
  for (const auto& [line, cells] : t.rows) {
    double v[6];
    for (int i = 0; i < 6; ++i) v[i] = to_double(cells[cols[i]], source, line, names[i]) * 1e-3;
    s.rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  return s;
}

void write_coupler_csv(std::ostream& out, const CouplerOptimum& optimum) {
  out << kCouplerHeader << '\n';
  for (const auto& g : optimum.grid) {
    out << format_number(g.reflectivity) << ',' << format_number(g.eta) << ',' << format_number(g.pump_power * 1e3)
        << ',' << (g.ok ? 1 : 0) << '\n';
  }
}

void write_fit_csv(std::ostream& out, const MeasurementSeries& series, const MeasuredMetrics& measured,
                   const ModelMetrics& model) {
  out << kFitHeader << '\n';
  for (std::size_t i = 0; i < series.rows.size(); ++i) {
    out << format_number(series.rows[i].pump_power * 1e3) << ',' << format_number(measured.eta[i]) << ','
        << format_number(model.eta[i]) << ',' << format_number(measured.delta[i]) << ','
        << format_number(model.delta[i]) << ',' << (model.converged[i] ? 1 : 0) << '\n';
  }
}

}  // namespace sfgcav
