#include <locale>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "kepr/errors.hpp"

using namespace kepr;
using namespace kepr::cli;
using nlohmann::json;

namespace {

RunConfig make(Subcommand cmd, KeyValues flags, KeyValues file = {}) {
  return resolve(cmd, file, flags);
}

// Data rows of a CSV payload (comment lines dropped).
std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

}  // namespace

TEST_CASE("config file parsing") {
  std::istringstream text("# comment\nK = 2.5\n\n  dist=lorentzian:0:0.5   # trailing\nseed = 9\n");
  const auto kv = parse_config_text(text);
  CHECK(kv.at("K") == "2.5");
  CHECK(kv.at("dist") == "lorentzian:0:0.5");
  CHECK(kv.at("seed") == "9");

  std::istringstream unknown("bogus = 1\n");
  CHECK_THROWS_AS(parse_config_text(unknown), InvalidArgument);
  std::istringstream malformed("K 2\n");
  CHECK_THROWS_AS(parse_config_text(malformed), InvalidArgument);
  CHECK_THROWS(read_config_file("/nonexistent/kepr.conf"));
}

TEST_CASE("flags override the file, the file overrides defaults") {
  const auto cfg = make(Subcommand::Simulate, {{"K", "3"}}, {{"K", "2"}, {"N", "128"}});
  CHECK(cfg.coupling == 3.0);
  CHECK(cfg.n == 128);
  CHECK(cfg.dt == 0.01);
  CHECK(cfg.resolved.at("K") == "3");
}

TEST_CASE("invalid configurations") {
  CHECK_THROWS_AS(make(Subcommand::Simulate, {{"N", "0"}}), InvalidArgument);
  CHECK_THROWS_AS(make(Subcommand::Simulate, {{"K", "abc"}}), InvalidArgument);
  CHECK_THROWS_AS(make(Subcommand::Simulate, {{"dist", "cauchy:0:1"}}), InvalidArgument);
  CHECK_THROWS_AS(make(Subcommand::Spectrum, {{"frame", "rotating"}}), InvalidArgument);
  CHECK_THROWS_AS(make(Subcommand::Chsh, {{"angles", "0,1,2"}}), InvalidArgument);
  CHECK_THROWS_AS(make(Subcommand::Trajectory, {{"mode", "exact"}}), InvalidArgument);
  CHECK_THROWS_AS(make(Subcommand::Sweep, {{"target", "trajectory"}, {"values", "1"}}), InvalidArgument);
}

TEST_CASE("sweep grid") {
  CHECK(expand_grid("1,2,3", "") == std::vector<std::string>{"1", "2", "3"});
  const auto g = expand_grid("", "0.5:1.5:0.5");
  REQUIRE(g.size() == 3);
  CHECK(std::stod(g[2]) == doctest::Approx(1.5));
  CHECK_THROWS_AS(expand_grid("", "1:0:0.5"), InvalidArgument);
  CHECK_THROWS_AS(expand_grid("", "0:1:0"), InvalidArgument);
}

TEST_CASE("identical configuration gives identical output") {
  const auto cfg = make(Subcommand::Simulate, {{"N", "512"}, {"t_end", "4"}, {"K", "2"}});
  const auto p1 = execute(cfg, "T");
  const auto p2 = execute(cfg, "T");
  CHECK(p1.primary == p2.primary);
  CHECK(p1.csv == p2.csv);
  CHECK(p1.exit_code == kOk);
  // only the timestamp differs between runs at different times
  auto j1 = json::parse(p1.primary);
  auto j2 = json::parse(execute(cfg, "later").primary);
  j1["metadata"].erase("generated_at");
  j2["metadata"].erase("generated_at");
  CHECK(j1 == j2);
  CHECK(j1["config"]["N"] == "512");
}

TEST_CASE("simulate summary") {
  const auto cfg = make(Subcommand::Simulate, {{"N", "2048"}, {"t_end", "8"}, {"K", "2"}});
  const auto p = execute(cfg, "T");
  const auto j = json::parse(p.primary);
  CHECK(j["command"] == "simulate");
  CHECK(j["summary"]["growth_rate"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(p.csv.has_value());
  const auto rows = csv_rows(*p.csv);
  CHECK(rows.front() == "t,r,phi,mean_phase");
  CHECK(rows.size() == 802);
}

TEST_CASE("exit codes") {
  const auto none = execute(make(Subcommand::Spectrum, {{"dist", "lorentzian:0:2"}, {"K", "3"}}), "T");
  CHECK(none.exit_code == kNumericalFailure);
  CHECK_FALSE(json::parse(none.primary)["diagnostic"].get<std::string>().empty());

  const auto ok = execute(make(Subcommand::Spectrum, {{"dist", "delta:1"}, {"K", "5"}}), "T");
  CHECK(ok.exit_code == kOk);
  const auto ev = json::parse(ok.primary)["eigenvalues"];
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].get<double>() == doctest::Approx(2.0));

  std::ostringstream out, err;
  CHECK(run(make(Subcommand::Chsh, {{"n_events", "0"}}), out, err) == kOk);
  const auto chsh = json::parse(out.str());
  CHECK(chsh["S"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(chsh["monte_carlo"].is_null());
  CHECK(chsh["violates_classical_bound"] == true);
}

TEST_CASE("trajectory output") {
  const auto p = execute(make(Subcommand::Trajectory, {{"samples", "5"}, {"mode", "both"},
                                                      {"physical_frequency_scale", "2"}}), "T");
  const auto rows = csv_rows(p.primary);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "t,t_seconds,r1_paper_literal,r1_derived");
  CHECK(rows[1].rfind("0,0,0,3.14159265358979", 0) == 0);
  CHECK(p.primary.find("time_convention") != std::string::npos);

  const auto plain = csv_rows(execute(make(Subcommand::Trajectory, {{"samples", "3"}}), "T").primary);
  CHECK(plain[0] == "t,r1");
}

TEST_CASE("sweep is ordered and independent of the worker count") {
  KeyValues flags{{"target", "simulate"}, {"param", "K"}, {"values", "0.5,1,1.5,2,3"},
                  {"N", "256"}, {"t_end", "4"}};
  flags["jobs"] = "1";
  const auto serial = execute(make(Subcommand::Sweep, flags), "T");
  flags["jobs"] = "4";
  const auto parallel = execute(make(Subcommand::Sweep, flags), "T");
  // the provenance header records the worker count; the data rows must not depend on it
  const auto rows = csv_rows(parallel.primary);
  CHECK(csv_rows(serial.primary) == rows);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].rfind(std::to_string(k - 1) + ",", 0) == 0);
  }

  const auto mixed = execute(make(Subcommand::Sweep, {{"target", "spectrum"}, {"dist", "lorentzian:0:1"},
                                                       {"values", "1,3"}}), "T");
  CHECK(mixed.exit_code == kNumericalFailure);
  const auto mixed_rows = csv_rows(mixed.primary);
  CHECK(mixed_rows[1].rfind("0,1,numerical_failure,", 0) == 0);
  CHECK(mixed_rows[2].rfind("1,3,ok,1,", 0) == 0);
}

TEST_CASE("numbers are locale independent") {
  const auto before = execute(make(Subcommand::Trajectory, {{"samples", "4"}}), "T").primary;
  const auto old = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  const auto after = execute(make(Subcommand::Trajectory, {{"samples", "4"}}), "T").primary;
  const auto sweep = execute(make(Subcommand::Sweep, {{"values", "4.5"}, {"dist", "delta:1"}}), "T").primary;
  std::locale::global(old);
  CHECK(before == after);
  CHECK(sweep.find("4.5") != std::string::npos);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-300) == "-2.5e-300");
}
