// Command-line driver: run built-in or file-defined scenarios, or estimate on recorded data.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ftfreq/harness.hpp"

namespace fs = std::filesystem;
using namespace ftfreq;

namespace {

enum ExitCode : int { kOk = 0, kConfigInvalid = 2, kNumericFault = 3, kNotExcited = 4 };

void write_file(const fs::path& path, auto&& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("--out", "output file must be writable", path.string());
  writer(out);
}

int finish(const ScenarioConfig& cfg, const RunResult& result, const fs::path& out_dir,
           const std::optional<SampledTrace>& trace) {
  if (trace) write_file(out_dir / cfg.output.trace_path, [&](std::ostream& os) { write_trace_csv(os, *trace); });
  write_file(out_dir / cfg.output.estimate_path,
             [&](std::ostream& os) { write_trajectory_csv(os, result.records, cfg.model.n); });
  write_file(out_dir / cfg.output.metadata_path, [&](std::ostream& os) { write_metadata(os, result.metadata); });

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "scenario: " << cfg.name << '\n';
  if (!result.records.empty()) {
    const auto& last = result.records.back();
    std::cout << "omega_grad(" << format_double(last.time) << ") = " << last.omega_grad.transpose() << '\n';
  }
  if (!result.extracted()) {
    std::cout << "omega_ft: not extracted (insufficient excitation)\n";
    return kNotExcited;
  }
  for (const auto& [key, value] : result.metadata)
    if (key == "extraction_time" || key == "omega_ft") std::cout << key << " = " << value << '\n';
  if (result.nonphysical_samples)
    std::cout << "non-physical gradient samples held: " << result.nonphysical_samples << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-time frequency estimation for multi-sinusoidal signals"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  app.add_option("--seed", seed, "Override the uniform-noise seed");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string config_path, input_path, scenario_name;
  bool print_config = false;

  auto* simulate = app.add_subcommand("simulate", "Generate the configured signal and estimate its frequencies");
  simulate->add_option("--config", config_path, "Scenario config file")->required();

  auto* estimate = app.add_subcommand("estimate", "Estimate frequencies of a recorded (time,y) CSV trace");
  estimate->add_option("--config", config_path, "Scenario config file (signal section ignored)")->required();
  estimate->add_option("--input", input_path, "Input CSV with header 'time,y'")->required();

  auto* scenario = app.add_subcommand("scenario", "Run a built-in scenario");
  scenario->add_option("name", scenario_name, "Built-in scenario name")
      ->required()
      ->check(CLI::IsMember(builtin_scenario_names()));
  scenario->add_flag("--print-config", print_config, "Print the scenario config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigInvalid;
  }

  try {
    ScenarioConfig cfg;
    if (*scenario) {
      cfg = builtin_scenario(scenario_name);
    } else {
      cfg = load_config(config_path);
    }
    if (seed) apply_seed(cfg, *seed);

    if (print_config) {
      std::cout << format_config(cfg);
      return kOk;
    }

    if (*estimate) {
      const auto result = estimate_from_file(input_path, cfg);
      return finish(cfg, result, out_dir, std::nullopt);
    }
    require_valid(cfg);
    const auto trace = generate_trace(cfg.signal, cfg.run.sample_period, cfg.run.duration);
    const auto result = run_trace(cfg, trace);
    return finish(cfg, result, out_dir, trace);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration:\n" << e.what() << '\n';
    return kConfigInvalid;
  } catch (const NumericError& e) {
    std::cerr << "numeric fault: " << e.what() << '\n';
    return kNumericFault;
  } catch (const UsageError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kConfigInvalid;
  }
}
