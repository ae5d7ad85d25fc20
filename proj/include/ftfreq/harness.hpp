#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftfreq/drem.hpp"
#include "ftfreq/errors.hpp"
#include "ftfreq/estimation.hpp"
#include "ftfreq/parameterization.hpp"
#include "ftfreq/recovery.hpp"
#include "ftfreq/signal.hpp"

namespace ftfreq {

/// Which admissible-delay rule validation enforces.
enum class DelayBound {
  Quarter,  // h < pi / (2 omega_max)
  Half,     // h < pi / omega_max: the widest range on which arccos stays invertible
};

struct DremConfig {
  double d = 0.13;
  double epsilon = 1.0;
};

struct EstimatorSettings {
  std::vector<double> gamma;   // one per parameter
  std::vector<double> omega0;  // initial frequency guess; theta_hat(0) follows via Vieta
  double t_ft = 5.0;
  double w_floor = 1e-6;
  IntegrationScheme scheme = IntegrationScheme::Exponential;
};

struct RunConfig {
  double sample_period = 1e-3;
  double duration = 40.0;
  std::vector<double> reset_times;
};

struct OutputConfig {
  std::string trace_path = "trace.csv";
  std::string estimate_path = "estimates.csv";
  std::string metadata_path = "metadata.txt";
};

struct ScenarioConfig {
  std::string name = "custom";
  SignalSpec signal;
  ModelConfig model;
  DelayBound delay_bound = DelayBound::Quarter;
  DremConfig drem;
  EstimatorSettings estimator;
  double imag_tol = 1e-3;
  RunConfig run;
  OutputConfig output;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

/// Checks every constraint and reports all failures together.
/// With `check_signal` false the signal section is ignored (recorded-data runs).
ValidationReport validate_config(const ScenarioConfig& cfg, bool check_signal = true);

/// Throws ConfigError unless validate_config passes; returns the warnings.
std::vector<std::string> require_valid(const ScenarioConfig& cfg, bool check_signal = true);

/// Flat "section.key = value" text; '#' starts a comment.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string format_config(const ScenarioConfig& cfg);

std::vector<std::string> builtin_scenario_names();
ScenarioConfig builtin_scenario(const std::string& name);

/// Overrides the uniform-noise seed, if the scenario has one.
void apply_seed(ScenarioConfig& cfg, std::uint64_t seed);

struct TrajectoryRecord {
  double time = 0.0;
  double y = 0.0;
  double Delta = 0.0;
  VectorXd theta_hat;
  std::optional<VectorXd> theta_ft;
  VectorXd omega_grad;
  std::optional<VectorXd> omega_ft;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct RunResult {
  std::vector<TrajectoryRecord> records;
  Metadata metadata;
  std::optional<VectorXd> final_theta_ft;
  std::optional<VectorXd> final_omega_ft;
  std::size_t nonphysical_samples = 0;
  double max_step_gain = 0.0;
  std::vector<std::string> warnings;

  bool extracted() const { return final_theta_ft.has_value(); }
};

/// Signal -> delay lines -> regression -> mixing -> gradient -> recovery, one sample at a time.
class Pipeline {
public:
  /// `cfg` must already be valid.
  explicit Pipeline(const ScenarioConfig& cfg);

  TrajectoryRecord push(double y, double time);

  /// New estimation epoch starting at `time`, holding integration for one pipeline latency.
  void reset(double time);

  const EstimatorState<double>& state() const { return state_; }
  const EstimatorConfig<double>& estimator_config() const { return est_cfg_; }
  std::size_t latency_steps() const { return extender_.latency_steps(); }
  std::size_t nonphysical_samples() const { return nonphysical_; }

private:
  ScenarioConfig cfg_;
  FrequencyBounds bounds_;
  Regressor<double> regressor_;
  Extender<double> extender_;
  EstimatorConfig<double> est_cfg_;
  EstimatorState<double> state_;
  VectorXd omega_grad_;
  std::optional<VectorXd> omega_ft_;
  std::size_t nonphysical_ = 0;
  std::size_t index_ = 0;
};

/// Runs the pipeline over a recorded trace (its sample period must match the config).
RunResult run_trace(const ScenarioConfig& cfg, const SampledTrace& trace);

/// Generates the configured signal and runs the pipeline on it.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Reads a (time, y) CSV and runs the pipeline on it; the signal section of `cfg` is ignored.
RunResult estimate_from_file(const std::string& trace_path, const ScenarioConfig& cfg);

SampledTrace read_trace_csv(std::istream& in, double sample_period);
SampledTrace read_trace_csv(const std::string& path, double sample_period);
void write_trace_csv(std::ostream& out, const SampledTrace& trace);

/// Header: time,y,Delta,theta_hat_1..n,theta_ft_1..n,omega_grad_1..n,omega_ft_1..n.
/// Values not yet extracted are written as empty fields.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records, int n);
void write_metadata(std::ostream& out, const Metadata& metadata);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace ftfreq
