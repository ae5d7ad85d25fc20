#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string_view>

#include "ftfreq/harness.hpp"

namespace ftfreq {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto t = trim(text);
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || t.empty()) throw ConfigError(key, "expected a number", "'" + t + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key, "expected a non-negative integer", "'" + t + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(key, item));
  return out;
}

std::vector<HarmonicSpec> parse_harmonics(const std::string& key, const std::string& text) {
  std::vector<HarmonicSpec> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError(key, "harmonic must be amplitude:frequency:phase", "'" + item + "'");
    out.push_back({parse_number(key, parts[0]), parse_number(key, parts[1]), parse_number(key, parts[2])});
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string join(const std::vector<HarmonicSpec>& hs) {
  std::string out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(hs[i].amplitude) + ":" + format_double(hs[i].frequency) + ":" + format_double(hs[i].phase);
  }
  return out;
}

std::string str(double v) { return format_double(v); }

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'", "'" + trim(line) + "'");
    auto key = trim(std::string_view(line).substr(0, eq));
    if (kv.count(key)) throw ConfigError(key, "duplicate key", "line " + std::to_string(lineno));
    kv[key] = trim(std::string_view(line).substr(eq + 1));
  }

  ScenarioConfig cfg;
  std::map<int, FrequencySwitch> switches;
  std::optional<int> n;
  std::string disturbance = "none";
  HarmonicDisturbance harmonic;
  UniformDisturbance uniform;
  std::vector<double> gamma;

  for (const auto& [key, value] : kv) {
    if (key == "scenario.name") cfg.name = value;
    else if (key == "signal.harmonics") cfg.signal.harmonics = parse_harmonics(key, value);
    else if (key == "signal.disturbance") disturbance = value;
    else if (key == "signal.disturbance.amplitude") harmonic.amplitude = parse_number(key, value);
    else if (key == "signal.disturbance.frequency") harmonic.frequency = parse_number(key, value);
    else if (key == "signal.disturbance.phase") harmonic.phase = parse_number(key, value);
    else if (key == "signal.disturbance.half_range") uniform.half_range = parse_number(key, value);
    else if (key == "signal.disturbance.sample_period") uniform.sample_period = parse_number(key, value);
    else if (key == "signal.disturbance.seed") uniform.seed = parse_unsigned(key, value);
    else if (key.rfind("signal.switch.", 0) == 0) {
      const auto rest = key.substr(std::string("signal.switch.").size());
      const auto dot = rest.find('.');
      if (dot == std::string::npos) throw ConfigError(key, "expected signal.switch.<k>.time|harmonics", key);
      const auto idx = static_cast<int>(parse_unsigned(key, rest.substr(0, dot)));
      const auto field = rest.substr(dot + 1);
      if (field == "time") switches[idx].switch_time = parse_number(key, value);
      else if (field == "harmonics") switches[idx].harmonics = parse_harmonics(key, value);
      else throw ConfigError(key, "unknown key", value);
    }
    else if (key == "model.n") n = static_cast<int>(parse_unsigned(key, value));
    else if (key == "model.h") cfg.model.h = parse_number(key, value);
    else if (key == "model.omega_min") cfg.model.omega_min = parse_number(key, value);
    else if (key == "model.omega_max") cfg.model.omega_max = parse_number(key, value);
    else if (key == "model.h_bound") {
      if (value == "quarter") cfg.delay_bound = DelayBound::Quarter;
      else if (value == "half") cfg.delay_bound = DelayBound::Half;
      else throw ConfigError(key, "must be 'quarter' or 'half'", value);
    }
    else if (key == "drem.d") cfg.drem.d = parse_number(key, value);
    else if (key == "drem.epsilon") cfg.drem.epsilon = parse_number(key, value);
    else if (key == "estimator.gamma") gamma = parse_list(key, value);
    else if (key == "estimator.omega0") cfg.estimator.omega0 = parse_list(key, value);
    else if (key == "estimator.t_ft") cfg.estimator.t_ft = parse_number(key, value);
    else if (key == "estimator.w_floor") cfg.estimator.w_floor = parse_number(key, value);
    else if (key == "estimator.scheme") {
      if (value == "exponential") cfg.estimator.scheme = IntegrationScheme::Exponential;
      else if (value == "euler") cfg.estimator.scheme = IntegrationScheme::ForwardEuler;
      else throw ConfigError(key, "must be 'exponential' or 'euler'", value);
    }
    else if (key == "recovery.imag_tol") cfg.imag_tol = parse_number(key, value);
    else if (key == "run.sample_period") cfg.run.sample_period = parse_number(key, value);
    else if (key == "run.duration") cfg.run.duration = parse_number(key, value);
    else if (key == "run.reset_times") cfg.run.reset_times = parse_list(key, value);
    else if (key == "output.trace_path") cfg.output.trace_path = value;
    else if (key == "output.estimate_path") cfg.output.estimate_path = value;
    else if (key == "output.metadata_path") cfg.output.metadata_path = value;
    else throw ConfigError(key, "unknown key", value);
  }

  if (disturbance == "none") cfg.signal.disturbance = NoDisturbance{};
  else if (disturbance == "harmonic") cfg.signal.disturbance = harmonic;
  else if (disturbance == "uniform") cfg.signal.disturbance = uniform;
  else throw ConfigError("signal.disturbance", "must be none, harmonic or uniform", disturbance);

  for (auto& [idx, sw] : switches) cfg.signal.schedule.push_back(std::move(sw));

  cfg.model.n = n.value_or(static_cast<int>(cfg.signal.harmonics.size()));
  if (gamma.size() == 1 && cfg.model.n > 1) gamma.assign(static_cast<std::size_t>(cfg.model.n), gamma.front());
  cfg.estimator.gamma = gamma;
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "file must be readable", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "scenario.name = " << cfg.name << '\n';
  os << "signal.harmonics = " << join(cfg.signal.harmonics) << '\n';
  std::visit(
      [&os](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, NoDisturbance>) {
          os << "signal.disturbance = none\n";
        } else if constexpr (std::is_same_v<D, HarmonicDisturbance>) {
          os << "signal.disturbance = harmonic\n"
             << "signal.disturbance.amplitude = " << str(d.amplitude) << '\n'
             << "signal.disturbance.frequency = " << str(d.frequency) << '\n'
             << "signal.disturbance.phase = " << str(d.phase) << '\n';
        } else {
          os << "signal.disturbance = uniform\n"
             << "signal.disturbance.half_range = " << str(d.half_range) << '\n'
             << "signal.disturbance.sample_period = " << str(d.sample_period) << '\n'
             << "signal.disturbance.seed = " << d.seed << '\n';
        }
      },
      cfg.signal.disturbance);
  for (std::size_t i = 0; i < cfg.signal.schedule.size(); ++i) {
    const auto& sw = cfg.signal.schedule[i];
    os << "signal.switch." << i + 1 << ".time = " << str(sw.switch_time) << '\n';
    os << "signal.switch." << i + 1 << ".harmonics = " << join(sw.harmonics) << '\n';
  }
  os << "model.n = " << cfg.model.n << '\n'
     << "model.h = " << str(cfg.model.h) << '\n'
     << "model.omega_min = " << str(cfg.model.omega_min) << '\n'
     << "model.omega_max = " << str(cfg.model.omega_max) << '\n'
     << "model.h_bound = " << (cfg.delay_bound == DelayBound::Quarter ? "quarter" : "half") << '\n'
     << "drem.d = " << str(cfg.drem.d) << '\n'
     << "drem.epsilon = " << str(cfg.drem.epsilon) << '\n'
     << "estimator.gamma = " << join(cfg.estimator.gamma) << '\n'
     << "estimator.omega0 = " << join(cfg.estimator.omega0) << '\n'
     << "estimator.t_ft = " << str(cfg.estimator.t_ft) << '\n'
     << "estimator.w_floor = " << str(cfg.estimator.w_floor) << '\n'
     << "estimator.scheme = " << (cfg.estimator.scheme == IntegrationScheme::Exponential ? "exponential" : "euler")
     << '\n'
     << "recovery.imag_tol = " << str(cfg.imag_tol) << '\n'
     << "run.sample_period = " << str(cfg.run.sample_period) << '\n'
     << "run.duration = " << str(cfg.run.duration) << '\n'
     << "run.reset_times = " << join(cfg.run.reset_times) << '\n'
     << "output.trace_path = " << cfg.output.trace_path << '\n'
     << "output.estimate_path = " << cfg.output.estimate_path << '\n'
     << "output.metadata_path = " << cfg.output.metadata_path << '\n';
  return os.str();
}

ValidationReport validate_config(const ScenarioConfig& cfg, bool check_signal) {
  ValidationReport r;
  auto& v = r.violations;
  const auto& m = cfg.model;
  const double ts = cfg.run.sample_period;
  const bool ts_ok = ts > 0.0 && std::isfinite(ts);

  if (!ts_ok) v.push_back({"run.sample_period", "must be finite and > 0", str(ts)});
  if (!(cfg.run.duration > 0.0) || !std::isfinite(cfg.run.duration))
    v.push_back({"run.duration", "must be finite and > 0", str(cfg.run.duration)});
  if (m.n < 1 || m.n > static_cast<int>(kMaxAdjugateOrder))
    v.push_back({"model.n", "must be in [1, 8]", std::to_string(m.n)});

  std::size_t steps = 0;
  if (!(m.h > 0.0) || !std::isfinite(m.h))
    v.push_back({"model.h", "must be finite and > 0", str(m.h)});
  else if (ts_ok && !delay_in_samples(m.h, ts, steps))
    v.push_back({"model.h", "must be an integer multiple of run.sample_period (" + str(ts) + ")", str(m.h)});
  if (!(cfg.drem.d > 0.0) || !std::isfinite(cfg.drem.d))
    v.push_back({"drem.d", "must be finite and > 0", str(cfg.drem.d)});
  else if (ts_ok && !delay_in_samples(cfg.drem.d, ts, steps))
    v.push_back({"drem.d", "must be an integer multiple of run.sample_period (" + str(ts) + ")", str(cfg.drem.d)});
  if (!(cfg.drem.epsilon > 0.0) || !std::isfinite(cfg.drem.epsilon))
    v.push_back({"drem.epsilon", "must be finite and > 0", str(cfg.drem.epsilon)});

  const bool band_ok = m.omega_min > 0.0 && m.omega_max > m.omega_min && std::isfinite(m.omega_max);
  if (!band_ok)
    v.push_back({"model.omega_min/omega_max", "require 0 < omega_min < omega_max",
                 str(m.omega_min) + " / " + str(m.omega_max)});
  if (band_ok && m.h > 0.0) {
    const double pi = std::numbers::pi;
    if (cfg.delay_bound == DelayBound::Quarter) {
      const double limit = pi / (2.0 * m.omega_max);
      if (!(m.h < limit)) v.push_back({"model.h", "must satisfy h < pi / (2 omega_max) = " + str(limit), str(m.h)});
    } else {
      const double limit = pi / m.omega_max;
      if (!(m.h < limit)) v.push_back({"model.h", "must satisfy h < pi / omega_max = " + str(limit), str(m.h)});
      r.warnings.push_back("model.h_bound = half: h may exceed pi / (2 omega_max); only h < pi / omega_max is enforced");
    }
    if (m.omega_max * m.h > 1.4)
      r.warnings.push_back("omega_max * h = " + str(m.omega_max * m.h) +
                           " > 1.4: cos(omega h) near the band edge is ill-conditioned for recovery");
  }

  const auto n = static_cast<std::size_t>(std::max(m.n, 0));
  const auto& est = cfg.estimator;
  if (est.gamma.size() != n)
    v.push_back({"estimator.gamma", "needs one value or n = " + std::to_string(n) + " values",
                 std::to_string(est.gamma.size()) + " values"});
  for (double g : est.gamma)
    if (!(g > 0.0) || !std::isfinite(g)) v.push_back({"estimator.gamma", "every gain must be finite and > 0", str(g)});
  if (est.omega0.size() != n)
    v.push_back({"estimator.omega0", "needs n = " + std::to_string(n) + " values",
                 std::to_string(est.omega0.size()) + " values"});
  for (double w : est.omega0) {
    if (!(w > 0.0) || !std::isfinite(w))
      v.push_back({"estimator.omega0", "every initial frequency must be finite and > 0", str(w)});
    else if (m.h > 0.0 && w * m.h >= std::numbers::pi)
      r.warnings.push_back("estimator.omega0 = " + str(w) + " aliases: omega0 * h >= pi");
  }
  if (!(est.w_floor > 0.0 && est.w_floor < 1.0))
    v.push_back({"estimator.w_floor", "must lie in (0, 1)", str(est.w_floor)});
  const double t_min = static_cast<double>(m.n) * (m.h + cfg.drem.d);
  if (!(est.t_ft > t_min))
    v.push_back({"estimator.t_ft", "must satisfy t_ft > n (h + d) = " + str(t_min), str(est.t_ft)});
  if (!(cfg.run.duration > est.t_ft))
    v.push_back({"run.duration", "must exceed estimator.t_ft = " + str(est.t_ft), str(cfg.run.duration)});
  if (!(cfg.imag_tol > 0.0)) v.push_back({"recovery.imag_tol", "must be > 0", str(cfg.imag_tol)});

  double last = 0.0;
  for (double t : cfg.run.reset_times) {
    if (!(t > last) || !(t < cfg.run.duration))
      v.push_back({"run.reset_times", "must be strictly increasing within (0, run.duration)", str(t)});
    last = t;
  }

  if (check_signal) {
    try {
      validate_signal(cfg.signal);
    } catch (const ConfigError& e) {
      v.insert(v.end(), e.violations().begin(), e.violations().end());
    }
    auto check_band = [&](const std::vector<HarmonicSpec>& hs, const std::string& field) {
      for (const auto& h : hs)
        if (band_ok && (h.frequency < m.omega_min || h.frequency > m.omega_max))
          v.push_back({field, "frequency must lie in [omega_min, omega_max] = [" + str(m.omega_min) + ", " +
                                  str(m.omega_max) + "]",
                       str(h.frequency)});
      if (hs.size() != n)
        r.warnings.push_back(field + " has " + std::to_string(hs.size()) + " harmonics but model.n = " +
                             std::to_string(n));
    };
    check_band(cfg.signal.harmonics, "signal.harmonics");
    for (std::size_t i = 0; i < cfg.signal.schedule.size(); ++i)
      check_band(cfg.signal.schedule[i].harmonics, "signal.switch." + std::to_string(i + 1) + ".harmonics");
  }
  return r;
}

std::vector<std::string> require_valid(const ScenarioConfig& cfg, bool check_signal) {
  auto report = validate_config(cfg, check_signal);
  if (!report.ok()) throw ConfigError(std::move(report.violations));
  return std::move(report.warnings);
}

std::vector<std::string> builtin_scenario_names() {
  return {"noiseless-2h", "harmonic-noise", "uniform-noise", "step-change"};
}

ScenarioConfig builtin_scenario(const std::string& name) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.model.n = 2;
  cfg.model.omega_min = 0.5;
  cfg.signal.harmonics = {{1.0, 2.0, 0.0}, {1.0, 3.0, half_pi}};  // sin 2t + cos 3t
  cfg.estimator.omega0 = {2.0, 5.0};
  cfg.run.sample_period = 1e-3;

  if (name == "noiseless-2h") {
    cfg.model.h = 0.1;
    cfg.model.omega_max = 10.0;
    cfg.drem = {0.13, 100.0};
    cfg.estimator.gamma = {0.005, 0.005};
    cfg.estimator.t_ft = 5.0;
    cfg.run.duration = 40.0;
  } else if (name == "harmonic-noise") {
    cfg.model.h = 1.0;
    cfg.model.omega_max = 3.1;
    cfg.delay_bound = DelayBound::Half;
    cfg.drem = {0.37, 0.1};
    cfg.estimator.gamma = {1.0, 1.0};
    cfg.estimator.t_ft = 10.0;
    cfg.run.duration = 60.0;
    cfg.signal.disturbance = HarmonicDisturbance{0.25, 15.0, 0.0};
  } else if (name == "uniform-noise") {
    cfg.model.h = 0.6;
    cfg.model.omega_max = 5.2;
    cfg.delay_bound = DelayBound::Half;
    cfg.drem = {0.4, 0.1};
    cfg.estimator.gamma = {1.0, 1.0};
    cfg.estimator.t_ft = 10.0;
    cfg.run.duration = 60.0;
    cfg.signal.disturbance = UniformDisturbance{0.2, 1e-3, 1};
  } else if (name == "step-change") {
    cfg.model.h = 0.7;
    cfg.model.omega_max = 4.4;
    cfg.delay_bound = DelayBound::Half;
    cfg.drem = {0.4, 0.1};
    cfg.estimator.gamma = {1.0, 1.0};
    cfg.estimator.t_ft = 10.0;
    cfg.run.duration = 60.0;
    cfg.signal.harmonics = {{1.0, 1.8, 0.0}, {1.0, 3.2, half_pi}};
    cfg.signal.schedule = {{30.0, {{1.0, 2.0, 0.0}, {1.0, 3.0, half_pi}}}};
  } else {
    throw ConfigError("scenario", "unknown built-in scenario", name);
  }
  return cfg;
}

void apply_seed(ScenarioConfig& cfg, std::uint64_t seed) {
  if (auto* u = std::get_if<UniformDisturbance>(&cfg.signal.disturbance)) u->seed = seed;
}

}  // namespace ftfreq
