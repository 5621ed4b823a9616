#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kepr/bellchsh.hpp"
#include "kepr/errors.hpp"
#include "kepr/meanfield.hpp"
#include "kepr/random.hpp"
#include "kepr/spectrum.hpp"

namespace kepr::cli {

using nlohmann::json;

namespace {

constexpr const char* kTimeConvention =
    "t_seconds = t / physical_frequency_scale, with the scale read as omega_1 in rad/s";

json config_json(const RunConfig& cfg) {
  json c = json::object();
  c["command"] = to_string(cfg.command);
  for (const auto& [key, value] : cfg.resolved) c[key] = value;
  return c;
}

json base_document(const RunConfig& cfg, const std::string& timestamp) {
  json doc;
  doc["command"] = to_string(cfg.command);
  doc["config"] = config_json(cfg);
  doc["metadata"] = {{"generated_at", timestamp}, {"time_convention", kTimeConvention}};
  return doc;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string csv_provenance(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# kepr " << to_string(cfg.command) << '\n';
  for (const auto& [key, value] : cfg.resolved) out << "# " << key << " = " << value << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateResult {
  Trajectory trajectory;
  std::optional<double> growth_rate;
  std::optional<TimeWindow> window;
  std::string fit_status;
  std::string fit_diagnostic;
  double mean_phase_slope = 0.0;
  double mean_frequency = 0.0;
};

SimulateResult compute_simulate(const RunConfig& cfg) {
  auto freqs = sample_frequencies(cfg.dist, cfg.n, derive_seed(cfg.seed, 0));
  auto phases = init_phases(cfg.init, cfg.n, derive_seed(cfg.seed, 1));
  SimulateResult res;
  for (double w : freqs) res.mean_frequency += w;
  res.mean_frequency /= static_cast<double>(freqs.size());

  const OscillatorEnsemble ensemble(std::move(phases), std::move(freqs));
  SimConfig sim;
  sim.coupling = cfg.coupling;
  sim.dt = cfg.dt;
  sim.t_end = cfg.t_end;
  sim.snapshot_stride = cfg.stride;
  res.trajectory = simulate(ensemble, sim);
  res.mean_phase_slope = mean_phase_slope(res.trajectory);

  for (double r : res.trajectory.r_series) {
    if (!std::isfinite(r)) throw NumericalError("non-finite order parameter in trajectory");
  }

  if (cfg.fit_t0 || cfg.fit_t1) {
    res.window = TimeWindow{cfg.fit_t0.value_or(0.0), cfg.fit_t1.value_or(cfg.t_end)};
  } else {
    res.window = linear_regime_window(res.trajectory, cfg.fit_ceiling);
  }
  if (!res.window) {
    res.fit_status = "rejected";
    res.fit_diagnostic = "no linear-regime window: r reaches the ceiling within three samples";
    return res;
  }
  try {
    GrowthFitOptions opts;
    opts.floor = cfg.fit_floor;
    opts.ceiling = cfg.fit_ceiling;
    res.growth_rate = fit_growth_rate(res.trajectory, *res.window, opts);
    res.fit_status = "ok";
  } catch (const GrowthFitRejected& e) {
    res.fit_status = "rejected";
    res.fit_diagnostic = e.what();
  }
  return res;
}

Payload run_simulate(const RunConfig& cfg, const std::string& timestamp) {
  const SimulateResult res = compute_simulate(cfg);
  const Trajectory& traj = res.trajectory;

  json doc = base_document(cfg, timestamp);
  json fit = {{"status", res.fit_status}};
  if (res.window) fit["window"] = {res.window->t_begin, res.window->t_end};
  if (!res.fit_diagnostic.empty()) fit["diagnostic"] = res.fit_diagnostic;
  doc["summary"] = {
      {"initial_r", traj.r_series.front()},
      {"final_r", traj.r_series.back()},
      {"growth_rate", res.growth_rate ? json(*res.growth_rate) : json(nullptr)},
      {"growth_fit", fit},
      {"mean_phase_slope", res.mean_phase_slope},
      {"mean_natural_frequency", res.mean_frequency},
      {"samples", traj.size()},
  };

  std::ostringstream csv;
  csv << csv_provenance(cfg);
  csv << "t,r,phi,mean_phase";
  if (cfg.physical_frequency_scale) csv << ",t_seconds";
  csv << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    csv << format_number(traj.times[k]) << ',' << format_number(traj.r_series[k]) << ','
        << format_number(traj.phi_series[k].value()) << ','
        << format_number(traj.mean_unwrapped_phase[k]);
    if (cfg.physical_frequency_scale) csv << ',' << format_number(traj.times[k] / *cfg.physical_frequency_scale);
    csv << '\n';
  }
  return {doc.dump(2) + "\n", csv.str(), kOk};
}

// ---------------------------------------------------------------------------
// spectrum

SpectrumResult compute_spectrum(const RunConfig& cfg) {
  SpectrumSolver solver = cfg.solver;
  if (solver == SpectrumSolver::Auto) {
    solver = cfg.dist.is_delta() && cfg.dist.center() > 0.0 ? SpectrumSolver::Closed
                                                            : SpectrumSolver::General;
  }
  if (solver == SpectrumSolver::Closed) {
    if (!cfg.dist.is_delta()) throw InvalidArgument("the closed-form solver needs a delta distribution");
    return spectrum_delta(cfg.dist.center(), cfg.coupling);
  }
  return spectrum_general(cfg.dist, cfg.coupling, {cfg.search_lo, cfg.search_hi}, cfg.frame);
}

Payload run_spectrum(const RunConfig& cfg, const std::string& timestamp) {
  const SpectrumResult res = compute_spectrum(cfg);
  json doc = base_document(cfg, timestamp);
  json re = json::array();
  json im = json::array();
  for (const auto& ev : res.eigenvalues) {
    re.push_back(ev.real());
    im.push_back(ev.imag());
  }
  doc["eigenvalues"] = re;
  doc["eigenvalues_imag"] = im;
  doc["residuals"] = res.residuals;
  doc["imaginary_parts"] = res.imaginary_parts;
  doc["frame"] = to_string(res.frame);
  doc["distribution"] = res.distribution.to_string();
  if (!res.diagnostic.empty()) doc["diagnostic"] = res.diagnostic;
  return {doc.dump(2) + "\n", std::nullopt, res.empty() ? kNumericalFailure : kOk};
}

// ---------------------------------------------------------------------------
// chsh

struct ChshResult {
  ChshScenario scenario;
  std::optional<ChshEstimate> estimate;
};

ChshResult compute_chsh(const RunConfig& cfg) {
  const auto& d = cfg.angles_deg;
  const auto a = AnalyzerAngle::degrees(d[0]);
  const auto b = AnalyzerAngle::degrees(d[1]);
  const auto c = AnalyzerAngle::degrees(d[2]);
  const auto dd = AnalyzerAngle::degrees(d[3]);
  ChshResult res{make_scenario(a, b, c, dd), std::nullopt};
  if (cfg.n_events >= 2) res.estimate = estimate_chsh(a, b, c, dd, cfg.n_events, cfg.seed);
  return res;
}

Payload run_chsh(const RunConfig& cfg, const std::string& timestamp) {
  const ChshResult res = compute_chsh(cfg);
  const auto& s = res.scenario;
  json doc = base_document(cfg, timestamp);
  doc["angles_deg"] = cfg.angles_deg;
  doc["correlations"] = {{"P_ab", s.correlations.ab},
                         {"P_ad", s.correlations.ad},
                         {"P_cd", s.correlations.cd},
                         {"P_cb", s.correlations.cb}};
  doc["S"] = s.s;
  doc["classical_bound"] = deterministic_bound();
  doc["violates_classical_bound"] = s.s > 2.0;
  if (res.estimate) {
    const ChshEstimate& e = *res.estimate;
    auto pair = [](const McEstimate& m) {
      return json{{"P_hat", m.p_hat}, {"standard_error", m.standard_error}, {"seed", m.seed}};
    };
    doc["monte_carlo"] = {{"n_events", cfg.n_events},
                          {"seed", cfg.seed},
                          {"S_hat", e.s_hat},
                          {"standard_error", e.standard_error},
                          {"pairs", {{"ab", pair(e.ab)}, {"ad", pair(e.ad)}, {"cd", pair(e.cd)}, {"cb", pair(e.cb)}}}};
  } else {
    doc["monte_carlo"] = nullptr;
  }
  return {doc.dump(2) + "\n", std::nullopt, kOk};
}

// ---------------------------------------------------------------------------
// trajectory

Payload run_trajectory(const RunConfig& cfg) {
  CoherenceTrajectoryParams params;
  params.omega1 = cfg.omega1;
  params.growth = cfg.growth;
  params.alpha = cfg.alpha;

  std::ostringstream csv;
  csv << csv_provenance(cfg);
  csv << "# time_convention = " << kTimeConvention << '\n';
  csv << 't';
  if (cfg.physical_frequency_scale) csv << ",t_seconds";
  if (cfg.mode == "both") {
    csv << ",r1_paper_literal,r1_derived";
  } else {
    csv << ",r1";
  }
  csv << '\n';

  for (std::size_t k = 0; k < cfg.samples; ++k) {
    const double t = cfg.t_end * static_cast<double>(k) / static_cast<double>(cfg.samples - 1);
    csv << format_number(t);
    if (cfg.physical_frequency_scale) csv << ',' << format_number(t / *cfg.physical_frequency_scale);
    auto emit = [&](TrajectoryMode mode) {
      params.mode = mode;
      const double r1 = coherence_trajectory(params, t);
      if (!std::isfinite(r1)) throw NumericalError("coherence trajectory overflowed at t = " + format_number(t));
      csv << ',' << format_number(r1);
    };
    if (cfg.mode == "both") {
      emit(TrajectoryMode::PaperLiteral);
      emit(TrajectoryMode::Derived);
    } else {
      emit(parse_trajectory_mode(cfg.mode));
    }
    csv << '\n';
  }
  return {csv.str(), std::nullopt, kOk};
}

// ---------------------------------------------------------------------------
// sweep

std::vector<std::string> sweep_columns(Subcommand target) {
  switch (target) {
    case Subcommand::Simulate:
      return {"growth_rate", "fit_status", "initial_r", "final_r", "mean_phase_slope"};
    case Subcommand::Spectrum:
      return {"n_roots", "omega_max", "omega_min", "max_residual"};
    case Subcommand::Chsh:
      return {"S", "S_hat", "standard_error"};
    default:
      return {};
  }
}

std::vector<std::string> sweep_row(const RunConfig& point) {
  switch (point.command) {
    case Subcommand::Simulate: {
      const SimulateResult res = compute_simulate(point);
      return {res.growth_rate ? format_number(*res.growth_rate) : "", res.fit_status,
              format_number(res.trajectory.r_series.front()),
              format_number(res.trajectory.r_series.back()), format_number(res.mean_phase_slope)};
    }
    case Subcommand::Spectrum: {
      const SpectrumResult res = compute_spectrum(point);
      if (res.empty()) throw NumericalError("no spectrum root: " + res.diagnostic);
      double worst = 0.0;
      for (double r : res.residuals) worst = std::max(worst, r);
      return {std::to_string(res.eigenvalues.size()), format_number(res.eigenvalues.front().real()),
              format_number(res.eigenvalues.back().real()), format_number(worst)};
    }
    case Subcommand::Chsh: {
      const ChshResult res = compute_chsh(point);
      return {format_number(res.scenario.s), res.estimate ? format_number(res.estimate->s_hat) : "",
              res.estimate ? format_number(res.estimate->standard_error) : ""};
    }
    default:
      return {};
  }
}

Payload run_sweep(const RunConfig& cfg) {
  const std::size_t points = cfg.values.size();
  const auto columns = sweep_columns(cfg.target);
  struct Row {
    std::string status = "ok";
    std::string message;
    std::vector<std::string> cells;
    int severity = kOk;
  };
  std::vector<Row> rows(points);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < points; k = next++) {
      Row& row = rows[k];
      try {
        KeyValues point = cfg.resolved;
        point[cfg.param] = cfg.values[k];
        row.cells = sweep_row(resolve(cfg.target, {}, point));
      } catch (const InvalidArgument& e) {
        row = {"invalid", e.what(), {}, kInvalidConfig};
      } catch (const NumericalError& e) {
        row = {"numerical_failure", e.what(), {}, kNumericalFailure};
      }
      row.cells.resize(columns.size());
    }
  };
  std::size_t jobs = cfg.jobs != 0 ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(points, 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::ostringstream csv;
  csv << csv_provenance(cfg);
  csv << "index," << csv_field(cfg.param) << ",status";
  for (const auto& col : columns) csv << ',' << col;
  csv << ",message\n";
  int exit_code = kOk;
  for (std::size_t k = 0; k < points; ++k) {
    const Row& row = rows[k];
    exit_code = std::max(exit_code, row.severity);
    csv << k << ',' << csv_field(cfg.values[k]) << ',' << row.status;
    for (const auto& cell : row.cells) csv << ',' << csv_field(cell);
    csv << ',' << csv_field(row.message) << '\n';
  }
  return {csv.str(), std::nullopt, exit_code};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open output file '" + path + "'");
  out << content;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Payload execute(const RunConfig& config, const std::string& timestamp) {
  switch (config.command) {
    case Subcommand::Simulate:
      return run_simulate(config, timestamp);
    case Subcommand::Spectrum:
      return run_spectrum(config, timestamp);
    case Subcommand::Chsh:
      return run_chsh(config, timestamp);
    case Subcommand::Trajectory:
      return run_trajectory(config);
    case Subcommand::Sweep:
      return run_sweep(config);
  }
  throw InvalidArgument("unhandled subcommand");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Payload payload = execute(config, utc_timestamp());
    if (config.output.empty()) {
      out << payload.primary;
    } else {
      write_file(config.output, payload.primary);
    }
    if (payload.csv && !config.csv.empty()) write_file(config.csv, *payload.csv);
    if (payload.exit_code == kNumericalFailure) err << "kepr: numerical failure (see output)\n";
    return payload.exit_code;
  } catch (const InvalidArgument& e) {
    err << "kepr: invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const NumericalError& e) {
    err << "kepr: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace kepr::cli
