#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixtopo/gaussian.hpp"
#include "mixtopo/model.hpp"
#include "mixtopo/uhlmann.hpp"

namespace mixtopo {

enum class TemperatureUnit { gap, energy };
enum class OutputFormat { csv, json };

/// Run configuration read from a flat `key = value` file. Energies are in units
/// of the hopping amplitude, k_B = hbar = a = 1.
struct RunConfig {
  std::string model = "qwz";  // qwz | atomic | tabulated
  QwzParams qwz{};
  double atomic_dz = 1.0;
  std::string hfict_file;
  double hfict_margin = 1e-3;

  double mu = 0.0;
  int nx = 32;
  int ny = 32;

  /// Temperatures in `temperature_unit`; 0 selects the pure ground state.
  std::vector<double> temperatures{0.0, 20.0};
  TemperatureUnit temperature_unit = TemperatureUnit::gap;

  int chain_length = 10;
  std::vector<int> chain_lengths{10, 50, 100};
  int transverse_points = 64;
  double transverse_k = kPi / 3.0;
  std::vector<Direction> directions{Direction::x, Direction::y};

  double scan_t_min = 1e-2;
  double scan_t_max = 1e2;
  int scan_points = 41;

  PathRefinement path{};

  std::string output_dir = "out";
  OutputFormat format = OutputFormat::csv;
  int jobs = 1;

  /// Effective key/value pairs, for the run manifest.
  std::map<std::string, std::string> echo() const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys, malformed
/// values and out-of-range numbers raise ConfigError naming the line and key.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Angle literal: a number, or [k*]pi[/n] with optional sign (e.g. "-pi/3").
double parse_angle(const std::string& text);

/// The Bloch model selected by the config; throws for tabulated configs,
/// which carry only a covariance grid.
BlochModel build_model(const RunConfig& config);
bool has_bloch_model(const RunConfig& config);

/// Single-particle gap of the configured model on the nx x ny grid.
double config_gap(const RunConfig& config);

/// Converts a configured temperature into an energy (using the gap when the
/// unit is `gap`). 0 stays 0.
double temperature_energy(const RunConfig& config, double t, double gap);

/// Thermal (or pure, for T = 0) state of the configured model, or the
/// tabulated covariance grid.
GaussianStateSpec build_state(const RunConfig& config, double temperature_energy);

}  // namespace mixtopo
