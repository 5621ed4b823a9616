#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kepr/ensemble.hpp"
#include "kepr/spectrum.hpp"

namespace kepr::cli {

enum class Subcommand { Simulate, Spectrum, Chsh, Trajectory, Sweep };

Subcommand parse_subcommand(const std::string& name);
std::string to_string(Subcommand cmd);

/// Flat `key = value` settings. Keys use underscores; flags use dashes.
using KeyValues = std::map<std::string, std::string>;

/// Every recognised key with its default value (empty string: unset).
const KeyValues& default_settings();

/// Parses `key = value` lines; `#` starts a comment. Throws InvalidArgument
/// on malformed lines or unknown keys.
KeyValues parse_config_text(std::istream& in);
KeyValues read_config_file(const std::string& path);

enum class SpectrumSolver { Auto, Closed, General };

struct RunConfig {
  Subcommand command = Subcommand::Simulate;
  /// Defaults overlaid with file values, then flag values.
  KeyValues resolved;

  // simulate
  std::size_t n = 8192;
  double coupling = 1.0;
  double dt = 0.01;
  double t_end = 8.0;
  std::size_t stride = 1;
  FrequencyDistribution dist = FrequencyDistribution::delta(0.0);
  InitMode init = InitMode::first_harmonic(1e-4);
  std::uint64_t seed = 1;
  std::optional<double> fit_t0;
  std::optional<double> fit_t1;
  double fit_floor = 0.0;
  double fit_ceiling = 0.1;

  // spectrum
  SpectrumSolver solver = SpectrumSolver::Auto;
  Frame frame = Frame::Lab;
  double search_lo = 1e-6;
  double search_hi = 100.0;

  // chsh
  std::array<double, 4> angles_deg{0.0, 22.5, 45.0, 67.5};
  std::size_t n_events = 1000000;

  // trajectory
  double omega1 = 1.0;
  double growth = 1.0;
  double alpha = 0.0;
  std::string mode = "derived";
  std::size_t samples = 401;
  std::optional<double> physical_frequency_scale;

  // sweep
  Subcommand target = Subcommand::Spectrum;
  std::string param = "K";
  std::vector<std::string> values;
  std::size_t jobs = 0;

  // output
  std::string output;
  std::string csv;
};

/// Merges `file` then `flags` over the defaults and validates the result.
RunConfig resolve(Subcommand command, const KeyValues& file, const KeyValues& flags);

/// Expands a sweep grid from `values` ("v1,v2,...") or `range` ("lo:hi:step").
std::vector<std::string> expand_grid(const std::string& values, const std::string& range);

}  // namespace kepr::cli
