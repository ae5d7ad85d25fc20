#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ftfreq/harness.hpp"

using namespace ftfreq;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ftfreq_test_" + name);
  fs::create_directories(dir);
  return dir;
}

std::string csv_of(const RunResult& r, int n) {
  std::ostringstream os;
  write_trajectory_csv(os, r.records, n);
  return os.str();
}

bool has_violation(const ValidationReport& r, const std::string& field, const std::string& needle = "") {
  for (const auto& v : r.violations)
    if (v.field == field && v.constraint.find(needle) != std::string::npos) return true;
  return false;
}

double max_err(const VectorXd& w, double a, double b) { return std::max(std::abs(w(0) - a), std::abs(w(1) - b)); }

}  // namespace

TEST(Validate, DelayBound) {
  auto cfg = builtin_scenario("noiseless-2h");
  EXPECT_TRUE(validate_config(cfg).ok());  // 0.1 < pi/20
  cfg.model.h = 0.2;
  EXPECT_TRUE(has_violation(validate_config(cfg), "model.h", "pi / (2 omega_max)"));
  cfg.delay_bound = DelayBound::Half;  // 0.2 < pi/10
  EXPECT_FALSE(has_violation(validate_config(cfg), "model.h"));
}

TEST(Validate, PublishedDremDelayIsOnGrid) {
  auto cfg = builtin_scenario("noiseless-2h");
  cfg.drem.d = 0.13;
  EXPECT_TRUE(validate_config(cfg).ok());
  cfg.drem.d = 0.1305;
  EXPECT_TRUE(has_violation(validate_config(cfg), "drem.d", "integer multiple"));
  cfg.drem.d = 0.13;
  cfg.model.h = 0.1004;
  EXPECT_TRUE(has_violation(validate_config(cfg), "model.h", "integer multiple"));
}

TEST(Validate, FiniteTimeLowerBound) {
  auto cfg = builtin_scenario("noiseless-2h");
  cfg.estimator.t_ft = 0.1;
  const auto r = validate_config(cfg);
  ASSERT_TRUE(has_violation(r, "estimator.t_ft", "0.46"));
  cfg.estimator.t_ft = 0.47;
  EXPECT_TRUE(validate_config(cfg).ok());
}

TEST(Validate, ReportsAllViolationsAtOnce) {
  auto cfg = builtin_scenario("noiseless-2h");
  cfg.model.h = 0.2;
  cfg.drem.d = 0.1305;
  cfg.estimator.t_ft = 0.1;
  cfg.signal.harmonics[1].frequency = 12.0;  // outside [0.5, 10]
  const auto r = validate_config(cfg);
  EXPECT_GE(r.violations.size(), 4u);
  EXPECT_TRUE(has_violation(r, "signal.harmonics", "omega_min"));
  try {
    require_valid(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations().size(), r.violations.size());
    EXPECT_NE(std::string(e.what()).find("drem.d"), std::string::npos);
  }
}

TEST(Validate, PublishedNoisyTuningsNeedHalfBound) {
  for (const char* name : {"harmonic-noise", "uniform-noise", "step-change"}) {
    auto cfg = builtin_scenario(name);
    const auto ok = validate_config(cfg);
    EXPECT_TRUE(ok.ok()) << name;
    EXPECT_FALSE(ok.warnings.empty()) << name;
    cfg.delay_bound = DelayBound::Quarter;
    EXPECT_TRUE(has_violation(validate_config(cfg), "model.h")) << name;
  }
}

TEST(Config, FormatParseRoundTrip) {
  for (const auto& name : builtin_scenario_names()) {
    const auto cfg = builtin_scenario(name);
    const auto text = format_config(cfg);
    EXPECT_EQ(format_config(parse_config(text)), text) << name;
  }
}

TEST(Config, ShippedScenarioFilesMatchBuiltins) {
  for (const auto& name : builtin_scenario_names()) {
    const auto path = fs::path(FTFREQ_SOURCE_DIR) / "scenarios" / (name + ".cfg");
    ASSERT_TRUE(fs::exists(path)) << path;
    EXPECT_EQ(format_config(load_config(path.string())), format_config(builtin_scenario(name))) << name;
  }
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(parse_config("model.h = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("model.bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("model.h 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config("signal.harmonics = 1:2\n"), ConfigError);
  EXPECT_THROW(parse_config("model.h = 0.1\nmodel.h = 0.2\n"), ConfigError);
}

TEST(Config, GammaBroadcastsAndCommentsIgnored) {
  const auto cfg = parse_config(
      "# comment\n"
      "signal.harmonics = 1:2:0, 0.5:3:0   # two tones\n"
      "estimator.gamma = 0.5\n"
      "signal.switch.1.time = 4\n"
      "signal.switch.1.harmonics = 1:2.5:0, 1:3:0\n");
  EXPECT_EQ(cfg.model.n, 2);
  EXPECT_EQ(cfg.estimator.gamma, (std::vector<double>{0.5, 0.5}));
  ASSERT_EQ(cfg.signal.schedule.size(), 1u);
  EXPECT_EQ(cfg.signal.schedule[0].harmonics[0].frequency, 2.5);
}

TEST(Run, NoiselessTwoToneRecoversFrequencies) {
  const auto result = run_scenario(builtin_scenario("noiseless-2h"));
  ASSERT_TRUE(result.extracted());
  EXPECT_LT(max_err(*result.final_omega_ft, 2.0, 3.0), 1e-2);

  // Held from extraction on.
  std::optional<VectorXd> first;
  for (const auto& r : result.records) {
    if (!r.omega_ft) continue;
    if (!first) {
      first = r.omega_ft;
      EXPECT_NEAR(r.time, 5.0, 1e-9);
    }
    ASSERT_EQ(*r.omega_ft, *first);
  }
}

TEST(Run, GradientEnvelopeNonIncreasingAfterWarmup) {
  auto cfg = builtin_scenario("noiseless-2h");
  cfg.drem.epsilon = 10.0;  // slow enough that the envelope is resolved over several windows
  cfg.run.duration = 20.0;
  const auto result = run_scenario(cfg);
  std::vector<double> window_max;
  double cur = 0.0;
  for (std::size_t k = 0; k < result.records.size(); ++k) {
    const auto& r = result.records[k];
    if (r.time < 1.0) continue;
    cur = std::max(cur, max_err(r.omega_grad, 2.0, 3.0));
    if ((k + 1) % 1000 == 0) {
      window_max.push_back(cur);
      cur = 0.0;
    }
  }
  ASSERT_GT(window_max.size(), 5u);
  for (std::size_t i = 1; i < window_max.size(); ++i) EXPECT_LE(window_max[i], window_max[i - 1] + 1e-12) << i;
  EXPECT_LT(window_max.back(), window_max.front());
}

TEST(Run, ZeroSignalNeverExtracts) {
  const auto dir = temp_dir("zero");
  {
    std::ofstream f(dir / "zero.csv");
    f << "time,y\n";
    for (int k = 0; k <= 8000; ++k) f << format_double(k * 1e-3) << ",0\n";
  }
  const auto result = estimate_from_file((dir / "zero.csv").string(), builtin_scenario("noiseless-2h"));
  EXPECT_FALSE(result.extracted());
  for (const auto& r : result.records) {
    EXPECT_EQ(r.Delta, 0.0);
    EXPECT_FALSE(r.omega_ft);
  }
  const auto csv = csv_of(result, 2);
  const auto last_line = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  EXPECT_NE(last_line.find(",,"), std::string::npos);  // empty sentinel fields
}

TEST(Run, StepChangeWithResetReconverges) {
  auto cfg = builtin_scenario("step-change");
  cfg.run.reset_times = {30.0};
  cfg.run.duration = 45.0;
  const auto result = run_scenario(cfg);
  ASSERT_TRUE(result.extracted());
  EXPECT_LT(max_err(*result.final_omega_ft, 2.0, 3.0), 1e-2);
  // Cleared at the reset, re-extracted t_ft later.
  for (const auto& r : result.records)
    if (r.time >= 30.0 && r.time < 39.999) ASSERT_FALSE(r.omega_ft) << r.time;
}

TEST(Files, TraceRoundTripIsBitwiseIdentical) {
  auto cfg = builtin_scenario("uniform-noise");
  cfg.run.duration = 12.0;
  const auto dir = temp_dir("roundtrip");
  const auto trace = generate_trace(cfg.signal, cfg.run.sample_period, cfg.run.duration);
  {
    std::ofstream f(dir / "trace.csv");
    write_trace_csv(f, trace);
  }
  const auto direct = run_scenario(cfg);
  const auto replay = estimate_from_file((dir / "trace.csv").string(), cfg);
  EXPECT_EQ(csv_of(direct, 2), csv_of(replay, 2));
}

TEST(Files, ReproducibleOutputs) {
  auto cfg = builtin_scenario("uniform-noise");
  cfg.run.duration = 11.0;
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  EXPECT_EQ(csv_of(a, 2), csv_of(b, 2));
  std::ostringstream ma, mb;
  write_metadata(ma, a.metadata);
  write_metadata(mb, b.metadata);
  EXPECT_EQ(ma.str(), mb.str());
  EXPECT_NE(ma.str().find("seed = 1"), std::string::npos);
  EXPECT_NE(ma.str().find("sign_convention = "), std::string::npos);
  EXPECT_NE(ma.str().find(kNoiseGenerator), std::string::npos);
}

TEST(Files, GapIsRejectedWithRow) {
  std::istringstream in("time,y\n0,0.1\n0.001,0.2\n0.003,0.3\n");
  try {
    read_trace_csv(in, 1e-3);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations().front().field, "input line 4");
  }
  std::istringstream bad_header("t,value\n0,1\n");
  EXPECT_THROW(read_trace_csv(bad_header, 1e-3), ConfigError);
  std::istringstream bad_value("time,y\n0,abc\n");
  EXPECT_THROW(read_trace_csv(bad_value, 1e-3), ConfigError);
}

TEST(Files, ExternallySynthesizedTwoTone) {
  const auto dir = temp_dir("external");
  {
    std::ofstream f(dir / "ext.csv");
    f.precision(17);
    f << "time,y\n";
    for (int k = 0; k <= 12000; ++k) {
      const double t = 2.0 + k * 1e-3;  // non-zero start time
      f << t << ',' << 0.8 * std::sin(1.5 * t + 0.3) + 1.2 * std::sin(2.5 * t - 1.0) << '\n';
    }
  }
  auto cfg = builtin_scenario("noiseless-2h");
  cfg.estimator.omega0 = {1.0, 4.0};
  cfg.run.duration = 12.0;
  const auto result = estimate_from_file((dir / "ext.csv").string(), cfg);
  ASSERT_TRUE(result.extracted());
  EXPECT_LT(max_err(*result.final_omega_ft, 1.5, 2.5), 1e-2);
}

TEST(Files, TrajectoryHeader) {
  const auto cfg = builtin_scenario("noiseless-2h");
  std::ostringstream os;
  write_trajectory_csv(os, {}, 2);
  EXPECT_EQ(os.str(),
            "time,y,Delta,theta_hat_1,theta_hat_2,theta_ft_1,theta_ft_2,omega_grad_1,omega_grad_2,omega_ft_1,"
            "omega_ft_2\n");
}
