#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tlreflect/jobrunner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Temperley-Lieb / reflection-equation verification workbench"};
  app.set_version_flag("--version", std::string(tlr::kToolVersion));

  std::string config_path;
  std::string out_path;
  std::uint64_t seed_override = 0;
  bool have_seed_override = false;
  bool json_only = false;
  double tol_override = 0.0;
  bool have_tol_override = false;
  int parallel = 1;

  app.add_option("--config", config_path, "Path to the JSON job description")
      ->required();
  app.add_option("--out", out_path, "Write the JSON report to this file");
  app.add_option("--seed", seed_override,
                 "Override the config seed list with a single seed")
      ->trigger_on_parse()
      ->each([&](const std::string&) { have_seed_override = true; });
  app.add_flag("--json-only", json_only, "Suppress the human-readable summary");
  app.add_option("--tol", tol_override, "Override eps_rel uniformly")
      ->each([&](const std::string&) { have_tol_override = true; });
  app.add_option("--parallel", parallel,
                 "Worker threads for independent seeds")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << tlr::kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config file: " << config_path << "\n";
      return 2;
    }
    nlohmann::json config_json;
    try {
      config_json = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "config is not valid JSON: " << e.what() << "\n";
      return 2;
    }

    tlr::JobConfig config = tlr::parse_config(config_json);
    if (have_seed_override) config.seeds = {seed_override};
    if (have_tol_override) {
      config.tol.eps_rel = tol_override;
      config.tol.validate();
    }
    config.parallel = parallel;

    const tlr::RunResult result = tlr::run_job(config);
    const std::string serialized = result.report.dump(2) + "\n";
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "cannot write report to " << out_path << "\n";
        return 2;
      }
      out << serialized;
    } else {
      std::cout << serialized;
    }
    if (!json_only) {
      std::cerr << tlr::summarize(result.report);
    }
    return result.all_pass ? 0 : 1;
  } catch (const tlr::Error& e) {
    if (e.code() == tlr::ErrorCode::ConfigInvalid) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
