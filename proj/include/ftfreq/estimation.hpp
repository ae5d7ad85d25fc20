#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <optional>

#include "ftfreq/drem.hpp"
#include "ftfreq/errors.hpp"
#include "ftfreq/parameterization.hpp"

namespace ftfreq {

enum class IntegrationScheme {
  /// Exact solution of the scalar error ODE with Delta^2 and Delta*Psi linear
  /// between samples. Unconditionally stable.
  Exponential,
  /// theta += gamma Delta (Psi - Delta theta) dt at the left sample. Stable
  /// only while gamma Delta^2 dt < 2.
  ForwardEuler,
};

template <typename Scalar = double>
struct EstimatorConfig {
  Vector<Scalar> gamma;   // per-parameter gains, > 0
  double t_ft = 5.0;      // extraction time, measured from the last reset
  Scalar w_floor = Scalar(1e-6);
  Vector<Scalar> theta0;  // initial estimate
  IntegrationScheme scheme = IntegrationScheme::Exponential;
};

template <typename Scalar = double>
struct EstimatorState {
  Vector<Scalar> theta_hat;
  Vector<Scalar> theta0;       // initial condition of the current epoch
  Scalar integral = Scalar(0);  // trapezoidal int Delta^2 since the epoch start
  double time = 0.0;
  double epoch_start = 0.0;
  double hold_until = -INFINITY;  // samples before this time are not integrated
  std::optional<Vector<Scalar>> theta_ft;
  std::optional<double> extraction_time;

  // Previous integrated sample, for the trapezoid.
  bool has_prev = false;
  Scalar prev_Delta = Scalar(0);
  Vector<Scalar> prev_Psi;

  Scalar max_step_gain = Scalar(0);  // max gamma_i Delta^2 dt seen
};

template <typename Scalar>
EstimatorState<Scalar> make_estimator_state(const EstimatorConfig<Scalar>& cfg) {
  if (cfg.gamma.size() != cfg.theta0.size() || cfg.gamma.size() < 1)
    throw UsageError("EstimatorConfig: gamma and theta0 must have the same length n >= 1");
  if ((cfg.gamma.array() <= Scalar(0)).any()) throw UsageError("EstimatorConfig: gamma must be positive");
  if (!(cfg.w_floor > Scalar(0) && cfg.w_floor < Scalar(1)))
    throw UsageError("EstimatorConfig: w_floor must be in (0, 1)");
  EstimatorState<Scalar> s;
  s.theta_hat = cfg.theta0;
  s.theta0 = cfg.theta0;
  s.prev_Psi = Vector<Scalar>::Zero(cfg.theta0.size());
  return s;
}

/// W_i = exp(-gamma_i int Delta^2).
template <typename Scalar>
Vector<Scalar> weights(const EstimatorState<Scalar>& state, const EstimatorConfig<Scalar>& cfg) {
  return (-cfg.gamma.array() * state.integral).exp().matrix();
}

/// int_0^t Delta^2 = -ln(W_i) / gamma_i, same for every i.
template <typename Scalar>
Vector<Scalar> excitation_level(const EstimatorState<Scalar>& state) {
  return Vector<Scalar>::Constant(state.theta_hat.size(), state.integral);
}

namespace detail {

/// (1 - e^-a) / a, continuous at a = 0.
template <typename Scalar>
Scalar phi1(Scalar a) {
  using std::abs;
  using std::expm1;
  if (abs(a) < Scalar(1e-300)) return Scalar(1);
  return -expm1(-a) / a;
}

}  // namespace detail

/// Advances the gradient law theta_hat' = gamma Delta (Psi - Delta theta_hat)
/// by one sample. Samples that are not warm, or fall inside a post-reset
/// hold, leave the estimate and the excitation integral untouched.
template <typename Scalar>
EstimatorState<Scalar> step_gradient(EstimatorState<Scalar> state, const MixedSample<Scalar>& mixed,
                                     const EstimatorConfig<Scalar>& cfg, double dt) {
  using std::exp;
  using std::isfinite;
  const auto n = state.theta_hat.size();
  if (mixed.Psi.size() != n) throw UsageError("step_gradient: mixed sample length does not match n");
  if (!isfinite(mixed.Delta) || !mixed.Psi.allFinite())
    throw NumericError("step_gradient: non-finite Delta or Psi");

  state.time = mixed.time;
  if (!mixed.warm || mixed.time < state.hold_until) {
    state.has_prev = false;
    return state;
  }

  if (state.has_prev) {
    const Scalar d0 = state.prev_Delta;
    const Scalar d1 = mixed.Delta;
    const Scalar mean_d2 = (d0 * d0 + d1 * d1) / Scalar(2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar g = cfg.gamma(i);
      state.max_step_gain = std::max(state.max_step_gain, g * std::max(d0 * d0, d1 * d1) * Scalar(dt));
      if (cfg.scheme == IntegrationScheme::Exponential) {
        const Scalar a = g * mean_d2 * Scalar(dt);
        const Scalar b = g * (d0 * state.prev_Psi(i) + d1 * mixed.Psi(i)) / Scalar(2) * Scalar(dt);
        state.theta_hat(i) = exp(-a) * state.theta_hat(i) + detail::phi1(a) * b;
      } else {
        state.theta_hat(i) += g * d0 * (state.prev_Psi(i) - d0 * state.theta_hat(i)) * Scalar(dt);
      }
    }
    state.integral += mean_d2 * Scalar(dt);
    if (!state.theta_hat.allFinite()) throw NumericError("step_gradient: estimate diverged");
  }
  state.has_prev = true;
  state.prev_Delta = mixed.Delta;
  state.prev_Psi = mixed.Psi;
  return state;
}

/// (theta_hat - theta0 W) / (1 - W), or nullopt while 1 - W_i < w_floor for any i.
/// Pure: no time gate and no caching.
template <typename Scalar>
std::optional<Vector<Scalar>> finite_time_formula(const EstimatorState<Scalar>& state,
                                                  const EstimatorConfig<Scalar>& cfg) {
  using std::expm1;
  using std::exp;
  const auto n = state.theta_hat.size();
  Vector<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar x = cfg.gamma(i) * state.integral;
    const Scalar one_minus_w = -expm1(-x);
    if (!(one_minus_w >= cfg.w_floor)) return std::nullopt;
    const Scalar w = exp(-x);
    out(i) = (state.theta_hat(i) - state.theta0(i) * w) / one_minus_w;
  }
  return out;
}

/// Extracts and caches the finite-time estimate once the epoch is t_ft old and
/// sufficiently excited. Returns the held value afterwards.
template <typename Scalar>
std::optional<Vector<Scalar>> finite_time_estimate(EstimatorState<Scalar>& state,
                                                   const EstimatorConfig<Scalar>& cfg) {
  if (state.theta_ft) return state.theta_ft;
  // Times are k * Ts; a relative slack keeps t_ft = k * Ts itself eligible.
  if (state.time - state.epoch_start < cfg.t_ft - 1e-9 * std::max(1.0, cfg.t_ft)) return std::nullopt;
  auto est = finite_time_formula(state, cfg);
  if (!est) return std::nullopt;
  if (!est->allFinite()) throw NumericError("finite_time_estimate: non-finite result");
  state.theta_ft = est;
  state.extraction_time = state.time;
  return state.theta_ft;
}

/// Starts a new estimation epoch at `time`: the integral restarts from zero,
/// the current estimate becomes the initial condition, any extracted value is
/// dropped and integration is held until `hold_until`.
template <typename Scalar>
void reset_estimator(EstimatorState<Scalar>& state, double time, double hold_until) {
  state.theta0 = state.theta_hat;
  state.integral = Scalar(0);
  state.epoch_start = time;
  state.hold_until = hold_until;
  state.theta_ft.reset();
  state.extraction_time.reset();
  state.has_prev = false;
}

}  // namespace ftfreq
