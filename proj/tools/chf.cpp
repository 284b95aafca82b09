// Command-line front end: run, compare, picard, resume.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chf/experiment.hpp"

namespace {

/// Pulls "--section.key=value" overrides out of argv; CLI11 sees the rest.
std::vector<std::string> split_overrides(int argc, char** argv, std::vector<std::string>& rest) {
  std::vector<std::string> overrides;
  for (int i = 0; i < argc; ++i) {
    const std::string a = argv[i];
    const auto eq = a.find('=');
    if (i > 0 && a.rfind("--", 0) == 0 && eq != std::string::npos && a.substr(0, eq).find('.') != std::string::npos)
      overrides.push_back(a.substr(2));
    else
      rest.push_back(a);
  }
  return overrides;
}

void apply_threads() {
  if (const char* env = std::getenv("CHF_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw chf::ConfigError("CHF_THREADS must be a positive integer");
    chf::set_thread_count(static_cast<int>(n));
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> rest;
  const std::vector<std::string> overrides = split_overrides(argc, argv, rest);

  CLI::App app{"Conformal heat flow of harmonic maps on a flat torus"};
  app.require_subcommand(1);
  std::string config_path, snapshot_path;

  auto* run = app.add_subcommand("run", "run the flow and write diagnostics");
  run->add_option("config", config_path, "INI config file")->required();
  auto* compare = app.add_subcommand("compare", "conformal flow against the classic heat flow");
  compare->add_option("config", config_path, "INI config file")->required();
  auto* picard = app.add_subcommand("picard", "Picard iteration of the fixed-point map");
  picard->add_option("config", config_path, "INI config file")->required();
  auto* resume = app.add_subcommand("resume", "continue a run from a CHF1 snapshot");
  resume->add_option("snapshot", snapshot_path, "snapshot file")->required();
  resume->add_option("config", config_path, "INI config file")->required();
  app.footer("Config keys can be overridden as --section.key=value. CHF_THREADS caps the thread count.");

  std::vector<char*> args;
  for (auto& s : rest) args.push_back(s.data());
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    apply_threads();
    const chf::RunConfig config = chf::load_config(config_path, overrides);
    if (*run || *resume) {
      const chf::ExperimentResult r =
          *run ? chf::run_experiment(config) : chf::resume_experiment(snapshot_path, config);
      std::cout << r.summary << std::endl;
      if (r.exit_status != 0) std::cerr << "error: " << r.run.failure << std::endl;
      return r.exit_status;
    }
    if (*compare) {
      const chf::ComparisonReport r = chf::compare_baseline(config);
      std::cout << r.summary << std::endl;
      return r.exit_status;
    }
    const chf::PicardRun r = chf::run_picard(config);
    std::cout << r.summary << std::endl;
    return 0;
  } catch (const chf::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return e.exit_status();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
