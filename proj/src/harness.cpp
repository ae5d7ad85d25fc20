#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ftfreq/harness.hpp"

namespace ftfreq {
namespace {

constexpr const char* kVersion = "ftfreq 1.0.0";

std::size_t steps_of(double delay, double ts) {
  std::size_t s = 0;
  if (!delay_in_samples(delay, ts, s)) throw UsageError("delay is not on the sample grid");
  return s;
}

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string join(const VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

void append_vector(std::string& line, const VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    line += ',';
    line += format_double(v(i));
  }
}

void append_optional(std::string& line, const std::optional<VectorXd>& v, int n) {
  if (v) {
    append_vector(line, *v);
    return;
  }
  for (int i = 0; i < n; ++i) line += ',';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Pipeline::Pipeline(const ScenarioConfig& cfg)
    : cfg_(cfg),
      bounds_{cfg.model.omega_min, cfg.model.omega_max},
      regressor_(RegressorLayout{cfg.model.n, steps_of(cfg.model.h, cfg.run.sample_period)}),
      extender_(RegressorLayout{cfg.model.n, steps_of(cfg.model.h, cfg.run.sample_period)},
                steps_of(cfg.drem.d, cfg.run.sample_period)) {
  est_cfg_.gamma = to_vector(cfg.estimator.gamma);
  est_cfg_.t_ft = cfg.estimator.t_ft;
  est_cfg_.w_floor = cfg.estimator.w_floor;
  est_cfg_.scheme = cfg.estimator.scheme;
  const VectorXd c = (to_vector(cfg.estimator.omega0) * cfg.model.h).array().cos().matrix();
  est_cfg_.theta0 = theta_from_cosines(c);
  state_ = make_estimator_state(est_cfg_);
  omega_grad_ = recover_frequencies(state_.theta_hat, cfg_.model.h, bounds_, cfg_.imag_tol).omega_hat;
}

void Pipeline::reset(double time) {
  const double ts = cfg_.run.sample_period;
  const double hold = time + (static_cast<double>(latency_steps()) - 0.5) * ts;
  reset_estimator(state_, time, hold);
  omega_ft_.reset();
}

TrajectoryRecord Pipeline::push(double y, double time) {
  const auto index = static_cast<std::ptrdiff_t>(index_++);
  try {
    if (!std::isfinite(y)) throw NumericError("non-finite measurement");
    const auto sample = regressor_.push(y, time);
    const auto ext = extender_.push(sample);
    const auto mixed = mix(ext, cfg_.drem.epsilon);
    state_ = step_gradient(std::move(state_), mixed, est_cfg_, cfg_.run.sample_period);

    const bool had_ft = state_.theta_ft.has_value();
    finite_time_estimate(state_, est_cfg_);
    if (!had_ft && state_.theta_ft)
      omega_ft_ = recover_frequencies(*state_.theta_ft, cfg_.model.h, bounds_, cfg_.imag_tol).omega_hat;

    try {
      omega_grad_ = recover_frequencies(state_.theta_hat, cfg_.model.h, bounds_, cfg_.imag_tol).omega_hat;
    } catch (const NotPhysicalError&) {
      ++nonphysical_;  // hold the last physical estimate
    }

    TrajectoryRecord rec;
    rec.time = time;
    rec.y = y;
    rec.Delta = mixed.Delta;
    rec.theta_hat = state_.theta_hat;
    rec.theta_ft = state_.theta_ft;
    rec.omega_grad = omega_grad_;
    rec.omega_ft = omega_ft_;
    return rec;
  } catch (const NumericError& e) {
    if (e.sample_index() >= 0) throw;
    throw NumericError(std::string(e.what()) + " (sample " + std::to_string(index) + ", t = " +
                           format_double(time) + ")",
                       index);
  }
}

RunResult run_trace(const ScenarioConfig& cfg, const SampledTrace& trace) {
  RunResult result;
  result.warnings = require_valid(cfg, /*check_signal=*/false);
  const double ts = cfg.run.sample_period;
  if (std::abs(trace.sample_period - ts) > 1e-9 * ts)
    throw ConfigError("run.sample_period", "must match the trace sample period " + format_double(trace.sample_period),
                      format_double(ts));

  Pipeline pipeline(cfg);
  auto next_reset = cfg.run.reset_times.begin();
  std::vector<double> applied_resets;
  result.records.reserve(trace.values.size());
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    const double t = trace.time_at(k);
    bool do_reset = false;
    while (next_reset != cfg.run.reset_times.end() && *next_reset <= t + 1e-9 * std::max(1.0, std::abs(t))) {
      do_reset = true;
      ++next_reset;
    }
    if (do_reset) {
      pipeline.reset(t);
      applied_resets.push_back(t);
    }
    result.records.push_back(pipeline.push(trace.values[k], t));
  }

  const auto& st = pipeline.state();
  result.final_theta_ft = st.theta_ft;
  if (!result.records.empty()) result.final_omega_ft = result.records.back().omega_ft;
  result.nonphysical_samples = pipeline.nonphysical_samples();
  result.max_step_gain = st.max_step_gain;

  auto& md = result.metadata;
  md.emplace_back("generator", kVersion);
  md.emplace_back("scenario", cfg.name);
  md.emplace_back("sign_convention", kSignConvention);
  md.emplace_back("integration_scheme",
                  cfg.estimator.scheme == IntegrationScheme::Exponential ? "exponential" : "euler");
  if (const auto* u = std::get_if<UniformDisturbance>(&cfg.signal.disturbance)) {
    md.emplace_back("noise_generator", kNoiseGenerator);
    md.emplace_back("seed", std::to_string(u->seed));
  }
  md.emplace_back("samples", std::to_string(trace.values.size()));
  md.emplace_back("start_time", format_double(trace.start_time));
  md.emplace_back("latency_steps", std::to_string(pipeline.latency_steps()));
  md.emplace_back("warmup_time", format_double(static_cast<double>(pipeline.latency_steps()) * ts));
  {
    std::string resets;
    for (double t : applied_resets) resets += (resets.empty() ? "" : " ") + format_double(t);
    md.emplace_back("resets_applied", resets);
  }
  md.emplace_back("status", result.extracted() ? "extracted" : "not_extracted");
  md.emplace_back("extraction_time", st.extraction_time ? format_double(*st.extraction_time) : "");
  md.emplace_back("theta_ft", result.final_theta_ft ? join(*result.final_theta_ft) : "");
  md.emplace_back("omega_ft", result.final_omega_ft ? join(*result.final_omega_ft) : "");
  md.emplace_back("excitation_integral", format_double(st.integral));
  md.emplace_back("max_gamma_delta2_dt", format_double(result.max_step_gain));
  md.emplace_back("nonphysical_samples", std::to_string(result.nonphysical_samples));
  for (std::size_t i = 0; i < result.warnings.size(); ++i)
    md.emplace_back("warning." + std::to_string(i + 1), result.warnings[i]);
  std::istringstream echo(format_config(cfg));
  for (std::string line; std::getline(echo, line);) {
    const auto eq = line.find(" = ");
    md.emplace_back("config." + line.substr(0, eq), eq == std::string::npos ? "" : line.substr(eq + 3));
  }
  return result;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  require_valid(cfg, /*check_signal=*/true);
  return run_trace(cfg, generate_trace(cfg.signal, cfg.run.sample_period, cfg.run.duration));
}

RunResult estimate_from_file(const std::string& trace_path, const ScenarioConfig& cfg) {
  return run_trace(cfg, read_trace_csv(trace_path, cfg.run.sample_period));
}

SampledTrace read_trace_csv(std::istream& in, double sample_period) {
  SampledTrace trace;
  trace.sample_period = sample_period;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what, const std::string& got) -> void {
    throw ConfigError("input line " + std::to_string(lineno), what, got);
  };
  auto parse = [&](std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && !text.empty() && std::isfinite(out);
  };

  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      std::string compact;
      for (char ch : line)
        if (ch != ' ') compact += ch;
      if (compact != "time,y") fail("header must be 'time,y'", "'" + line + "'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    double t = 0.0, y = 0.0;
    if (comma == std::string::npos || !parse(std::string_view(line).substr(0, comma), t) ||
        !parse(std::string_view(line).substr(comma + 1), y))
      fail("row must be two finite numbers 'time,y'", "'" + line + "'");
    if (trace.values.empty()) {
      trace.start_time = t;
    } else {
      const double expected = trace.time_at(trace.values.size());
      if (std::abs(t - expected) > 1e-6 * sample_period)
        fail("time must continue the uniform grid (expected " + format_double(expected) + ")", format_double(t));
    }
    trace.values.push_back(y);
  }
  if (!header) throw ConfigError("input", "file is empty; expected header 'time,y'", "");
  if (trace.values.empty()) throw ConfigError("input", "no data rows", "");
  return trace;
}

SampledTrace read_trace_csv(const std::string& path, double sample_period) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--input", "file must be readable", path);
  return read_trace_csv(in, sample_period);
}

void write_trace_csv(std::ostream& out, const SampledTrace& trace) {
  out << "time,y\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k)
    out << format_double(trace.time_at(k)) << ',' << format_double(trace.values[k]) << '\n';
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records, int n) {
  std::string header = "time,y,Delta";
  for (const char* name : {"theta_hat", "theta_ft", "omega_grad", "omega_ft"})
    for (int i = 1; i <= n; ++i) header += std::string(",") + name + "_" + std::to_string(i);
  out << header << '\n';
  std::string line;
  for (const auto& r : records) {
    line = format_double(r.time) + ',' + format_double(r.y) + ',' + format_double(r.Delta);
    append_vector(line, r.theta_hat);
    append_optional(line, r.theta_ft, n);
    append_vector(line, r.omega_grad);
    append_optional(line, r.omega_ft, n);
    out << line << '\n';
  }
}

void write_metadata(std::ostream& out, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << key << " = " << value << '\n';
}

}  // namespace ftfreq
