#pragma once

// Run configuration: a flat sectioned key = value format.
//
//   # comment
//   [crystal]
//   length_mm = 9.3
//
// Unknown sections or keys are rejected. Powers are given in mW, lengths in
// mm unless the key says otherwise, absorption in 1/m. The full schema is in
// docs/config.md.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfgcav/analysis.hpp"
#include "sfgcav/cavity.hpp"

namespace sfgcav {

/// Malformed or invalid configuration; `what()` starts with "<source>:<line>:".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepFormat { efficiency, detectors };

struct SweepBlock {
  std::vector<double> pump_powers;  // W
  SweepFormat format = SweepFormat::efficiency;
  double detector_gamma = 1.0;
};

struct OptimizeBlock {
  double r_min = 0.85;
  double r_max = 0.99;
  double pump_budget = 0.190;  // W
  CouplerOptions options;
};

struct FitBlock {
  FreeParameters free;
  FitOptions options;
};

struct ResonatorBlock {
  std::optional<double> finesse;
  std::optional<double> optical_roundtrip_length;  // m
  std::optional<double> length;                    // m, physical
  std::optional<double> refractive_index;
  bool standing_wave = true;
  std::optional<double> linewidth;  // Hz, for the inverse use
};

struct RunConfig {
  CavityConfig cavity;
  DriveConfig drive;
  std::optional<double> calibrate_peak_pump;  // W; calibrate kappa before running
  std::optional<SweepBlock> sweep;
  std::optional<OptimizeBlock> optimize;
  std::optional<FitBlock> fit;
  std::optional<ResonatorBlock> resonator;
  std::string output_path;
};

/// Starts from CavityConfig::paper_default() with a 2 mW signal and applies
/// the given keys on top.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace sfgcav
