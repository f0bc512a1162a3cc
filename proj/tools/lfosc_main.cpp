#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lfosc.h"

namespace {

int exit_code_for(int status, int run_exit) {
  if (status == LFOSC_OK) return run_exit;
  if (status == LFOSC_E_IO) return 3;
  return 1;
}

int cmd_run(const std::string& config, const std::vector<std::string>& overrides) {
  std::vector<const char*> raw;
  raw.reserve(overrides.size());
  for (const auto& s : overrides) raw.push_back(s.c_str());
  int run_exit = 0;
  int status = lfosc_run_config(config.c_str(), raw.empty() ? nullptr : raw.data(),
                                raw.size(), &run_exit);
  if (status != LFOSC_OK) std::fprintf(stderr, "lfosc: %s\n", lfosc_last_error());
  return exit_code_for(status, run_exit);
}

int cmd_selfcheck() {
  int failures = 0;
  int status = lfosc_selfcheck(&failures);
  if (status != LFOSC_OK) {
    std::fprintf(stderr, "lfosc: %s\n", lfosc_last_error());
    return exit_code_for(status, 0);
  }
  return failures == 0 ? 0 : 2;
}

int cmd_presets() {
  char* table = nullptr;
  int status = lfosc_presets_table(&table);
  if (status != LFOSC_OK) {
    std::fprintf(stderr, "lfosc: %s\n", lfosc_last_error());
    return exit_code_for(status, 0);
  }
  std::fputs(table, stdout);
  lfosc_string_free(table);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sign-change experiments on L-function coefficient series"};
  app.set_version_flag("--version", std::string(lfosc_version()));
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "execute the experiment described by a config file");
  run->add_option("config", config, "key=value config file")->required();
  run->add_option("--set", overrides, "override a config entry, e.g. --set N=20000")
      ->take_all();

  auto* selfcheck =
      app.add_subcommand("selfcheck", "run the built-in fixed-value checks");
  auto* presets = app.add_subcommand("presets", "list exponent presets and their origin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (run->parsed()) return cmd_run(config, overrides);
  if (selfcheck->parsed()) return cmd_selfcheck();
  if (presets->parsed()) return cmd_presets();
  return 1;
}
