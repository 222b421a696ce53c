#pragma once

// CSV emission and ingestion. Powers are written in mW, numbers with 9
// significant digits.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sfgcav/analysis.hpp"

namespace sfgcav {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSweepHeader = "pump_mW,eta,delta,converged,roundtrips";
inline constexpr const char* kMeasurementHeader = "pump_mW,pd1550_in,pd1550_refl,pd1550_trans,pd810_trans,pd532_trans";
inline constexpr const char* kCouplerHeader = "R,eta,pump_mW,ok";
inline constexpr const char* kFitHeader = "pump_mW,eta_measured,eta_model,delta_measured,delta_model,converged";

std::string format_number(double v);

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
SweepResult read_sweep_csv(std::istream& in, const std::string& source = "<csv>");

void write_measurements_csv(std::ostream& out, const MeasurementSeries& series);
/// Columns are matched by header name; a missing column is reported by name.
MeasurementSeries read_measurements_csv(std::istream& in, const std::string& source = "<csv>");

void write_coupler_csv(std::ostream& out, const CouplerOptimum& optimum);

void write_fit_csv(std::ostream& out, const MeasurementSeries& series, const MeasuredMetrics& measured,
                   const ModelMetrics& model);

}  // namespace sfgcav
