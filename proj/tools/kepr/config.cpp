#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kepr/errors.hpp"

namespace kepr::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_real(const KeyValues& kv, const std::string& key) {
  const std::string& text = kv.at(key);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidArgument("'" + key + "' expects a real number, got '" + text + "'");
  }
  return value;
}

std::uint64_t to_count(const KeyValues& kv, const std::string& key) {
  const std::string& text = kv.at(key);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument("'" + key + "' expects a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::optional<double> to_optional_real(const KeyValues& kv, const std::string& key) {
  if (kv.at(key).empty()) return std::nullopt;
  return to_real(kv, key);
}

}  // namespace

Subcommand parse_subcommand(const std::string& name) {
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "spectrum") return Subcommand::Spectrum;
  if (name == "chsh") return Subcommand::Chsh;
  if (name == "trajectory") return Subcommand::Trajectory;
  if (name == "sweep") return Subcommand::Sweep;
  throw InvalidArgument("unknown subcommand '" + name + "'");
}

std::string to_string(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::Simulate:
      return "simulate";
    case Subcommand::Spectrum:
      return "spectrum";
    case Subcommand::Chsh:
      return "chsh";
    case Subcommand::Trajectory:
      return "trajectory";
    case Subcommand::Sweep:
      return "sweep";
  }
  return {};
}

const KeyValues& default_settings() {
  static const KeyValues defaults{
      {"N", "8192"},
      {"K", "1"},
      {"dt", "0.01"},
      {"t_end", "8"},
      {"stride", "1"},
      {"dist", "delta:0"},
      {"init", "first_harmonic:1e-4"},
      {"seed", "1"},
      {"fit_t0", ""},
      {"fit_t1", ""},
      {"fit_floor", "0"},
      {"fit_ceiling", "0.1"},
      {"solver", "auto"},
      {"frame", "lab"},
      {"search_lo", "1e-6"},
      {"search_hi", "100"},
      {"angles", "0,22.5,45,67.5"},
      {"n_events", "1000000"},
      {"omega1", "1"},
      {"Omega", "1"},
      {"alpha", "0"},
      {"mode", "derived"},
      {"samples", "401"},
      {"physical_frequency_scale", ""},
      {"target", "spectrum"},
      {"param", "K"},
      {"values", ""},
      {"range", ""},
      {"jobs", "0"},
      {"output", ""},
      {"csv", ""},
  };
  return defaults;
}

KeyValues parse_config_text(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!default_settings().contains(key)) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  return parse_config_text(in);
}

std::vector<std::string> expand_grid(const std::string& values, const std::string& range) {
  if (!values.empty() && !range.empty()) throw InvalidArgument("give either values or range, not both");
  if (!values.empty()) {
    auto out = split(values, ',');
    for (const auto& v : out) {
      if (v.empty()) throw InvalidArgument("empty entry in sweep values");
    }
    return out;
  }
  if (range.empty()) throw InvalidArgument("sweep needs values or range");
  const auto parts = split(range, ':');
  if (parts.size() != 3) throw InvalidArgument("range expects lo:hi:step");
  KeyValues tmp{{"lo", parts[0]}, {"hi", parts[1]}, {"step", parts[2]}};
  const double lo = to_real(tmp, "lo");
  const double hi = to_real(tmp, "hi");
  const double step = to_real(tmp, "step");
  if (!(step > 0.0) || hi < lo) throw InvalidArgument("range needs lo <= hi and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw InvalidArgument("range has too many grid points");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double v = lo + step * static_cast<double>(k);
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.emplace_back(buf, ptr);
  }
  return out;
}

RunConfig resolve(Subcommand command, const KeyValues& file, const KeyValues& flags) {
  RunConfig cfg;
  cfg.command = command;
  cfg.resolved = default_settings();
  for (const KeyValues* layer : {&file, &flags}) {
    for (const auto& [key, value] : *layer) {
      if (!cfg.resolved.contains(key)) throw InvalidArgument("unknown setting '" + key + "'");
      cfg.resolved[key] = value;
    }
  }
  const KeyValues& kv = cfg.resolved;

  cfg.n = to_count(kv, "N");
  if (cfg.n == 0) throw InvalidArgument("N must be positive");
  cfg.coupling = to_real(kv, "K");
  cfg.dt = to_real(kv, "dt");
  cfg.t_end = to_real(kv, "t_end");
  cfg.stride = to_count(kv, "stride");
  cfg.dist = FrequencyDistribution::parse(kv.at("dist"));
  cfg.init = InitMode::parse(kv.at("init"));
  cfg.seed = to_count(kv, "seed");
  cfg.fit_t0 = to_optional_real(kv, "fit_t0");
  cfg.fit_t1 = to_optional_real(kv, "fit_t1");
  cfg.fit_floor = to_real(kv, "fit_floor");
  cfg.fit_ceiling = to_real(kv, "fit_ceiling");

  const std::string& solver = kv.at("solver");
  if (solver == "auto") {
    cfg.solver = SpectrumSolver::Auto;
  } else if (solver == "closed") {
    cfg.solver = SpectrumSolver::Closed;
  } else if (solver == "general") {
    cfg.solver = SpectrumSolver::General;
  } else {
    throw InvalidArgument("solver must be auto, closed or general");
  }
  cfg.frame = parse_frame(kv.at("frame"));
  cfg.search_lo = to_real(kv, "search_lo");
  cfg.search_hi = to_real(kv, "search_hi");

  const auto angle_parts = split(kv.at("angles"), ',');
  if (angle_parts.size() != 4) throw InvalidArgument("angles expects four comma-separated degrees a,b,c,d");
  for (std::size_t k = 0; k < 4; ++k) {
    KeyValues tmp{{"angle", angle_parts[k]}};
    cfg.angles_deg[k] = to_real(tmp, "angle");
  }
  cfg.n_events = to_count(kv, "n_events");

  cfg.omega1 = to_real(kv, "omega1");
  cfg.growth = to_real(kv, "Omega");
  cfg.alpha = to_real(kv, "alpha");
  cfg.mode = kv.at("mode");
  if (cfg.mode != "both") parse_trajectory_mode(cfg.mode);
  cfg.samples = to_count(kv, "samples");
  cfg.physical_frequency_scale = to_optional_real(kv, "physical_frequency_scale");
  if (cfg.physical_frequency_scale && !(*cfg.physical_frequency_scale > 0.0)) {
    throw InvalidArgument("physical_frequency_scale must be positive");
  }

  cfg.target = parse_subcommand(kv.at("target"));
  cfg.param = kv.at("param");
  cfg.jobs = to_count(kv, "jobs");
  if (command == Subcommand::Sweep) {
    if (cfg.target == Subcommand::Sweep || cfg.target == Subcommand::Trajectory) {
      throw InvalidArgument("sweep target must be simulate, spectrum or chsh");
    }
    if (!default_settings().contains(cfg.param) || cfg.param == "target" || cfg.param == "param" ||
        cfg.param == "values" || cfg.param == "range" || cfg.param == "output" || cfg.param == "csv" ||
        cfg.param == "jobs") {
      throw InvalidArgument("cannot sweep over '" + cfg.param + "'");
    }
    cfg.values = expand_grid(kv.at("values"), kv.at("range"));
  }

  cfg.output = kv.at("output");
  cfg.csv = kv.at("csv");

  switch (command) {
    case Subcommand::Chsh:
      if (cfg.n_events == 1) throw InvalidArgument("n_events must be 0 (analytic only) or at least 2");
      break;
    case Subcommand::Trajectory:
      if (!(cfg.omega1 > 0.0)) throw InvalidArgument("omega1 must be positive");
      if (!(cfg.t_end > 0.0)) throw InvalidArgument("t_end must be positive");
      if (cfg.samples < 2) throw InvalidArgument("samples must be at least 2");
      break;
    case Subcommand::Spectrum:
      if (!(cfg.coupling > 0.0)) throw InvalidArgument("K must be positive");
      break;
    default:
      break;
  }
  return cfg;
}

}  // namespace kepr::cli
