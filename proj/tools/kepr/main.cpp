#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "kepr/errors.hpp"

namespace {

std::string flag_name(const std::string& key) {
  std::string flag = key;
  for (char& ch : flag) {
    if (ch == '_') ch = '-';
  }
  return "--" + flag;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kepr::cli;

  CLI::App app{"Vector Kuramoto synchronisation toolkit: mean-field simulation, coherence spectrum and CHSH evaluation"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> descriptions{
      {"simulate", "integrate the mean-field dynamics; JSON summary (+ trajectory CSV via --csv)"},
      {"spectrum", "solve the discrete-spectrum equation; JSON"},
      {"chsh", "analytic CHSH value and Monte Carlo estimate; JSON"},
      {"trajectory", "first-order coherence r1(t); CSV"},
      {"sweep", "run a target subcommand over a parameter grid; CSV"},
  };

  std::string config_path;
  std::map<std::string, std::string> flag_values;
  for (const auto& [name, description] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "flat key = value settings file (flags override it)");
    for (const auto& [key, fallback] : default_settings()) {
      std::string help = "default: " + (fallback.empty() ? std::string("unset") : fallback);
      sub->add_option(flag_name(key), flag_values[name + "/" + key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    KeyValues flags;
    for (const auto& [key, fallback] : default_settings()) {
      if (chosen->count(flag_name(key)) > 0) flags[key] = flag_values[name + "/" + key];
    }
    const KeyValues file = config_path.empty() ? KeyValues{} : read_config_file(config_path);
    const RunConfig config = resolve(parse_subcommand(name), file, flags);
    return run(config, std::cout, std::cerr);
  } catch (const kepr::InvalidArgument& e) {
    std::cerr << "kepr: invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  }
}
