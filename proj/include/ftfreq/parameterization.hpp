#pragma once

#include <algorithm>
#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <string>

#include "ftfreq/errors.hpp"
#include "ftfreq/tapped_delay.hpp"

namespace ftfreq {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

inline constexpr int kMaxBinomialOrder = 20;

/// Sign convention tag recorded in run metadata.
inline constexpr const char* kSignConvention = "psi=[Z^2+1]^n y; theta_k=(-1)^(k+1) e_k(cos(w_i h))";

/// Exact C(n, i) for 0 <= i <= n <= 20.
inline std::uint64_t binomial(int n, int i) {
  if (n < 0 || n > kMaxBinomialOrder || i < 0 || i > n)
    throw UsageError("binomial(" + std::to_string(n) + ", " + std::to_string(i) + ") out of range");
  std::uint64_t c = 1;
  for (int k = 1; k <= i; ++k) c = c * static_cast<std::uint64_t>(n - i + k) / static_cast<std::uint64_t>(k);
  return c;
}

/// Model order and the parameterization delay, already on the sample grid.
struct RegressorLayout {
  int n = 1;
  std::size_t h_steps = 1;

  /// Deepest tap read by psi (2nh).
  std::size_t depth() const { return 2 * static_cast<std::size_t>(n) * h_steps; }
};

struct ModelConfig {
  int n = 1;
  double h = 0.1;
  double omega_min = 0.5;
  double omega_max = 10.0;
};

/// psi(t) = [Z^2 + 1]^n y = sum_i C(n,i) y(t - 2h(n-i)).
template <typename Scalar>
Scalar compute_psi(const TappedDelayLine<Scalar>& y, const RegressorLayout& layout) {
  const int n = layout.n;
  Scalar psi(0);
  for (int i = 0; i <= n; ++i)
    psi += static_cast<Scalar>(binomial(n, i)) * y.tap(2 * static_cast<std::size_t>(n - i) * layout.h_steps);
  return psi;
}

/// phi_k(t) = 2^k Z^k [Z^2 + 1]^(n-k) y
///          = 2^k sum_i C(n-k, i) y(t - h(2(n-k-i) + k)),  k = 1..n.
template <typename Scalar>
Vector<Scalar> compute_phi(const TappedDelayLine<Scalar>& y, const RegressorLayout& layout) {
  const int n = layout.n;
  Vector<Scalar> phi(n);
  Scalar scale(1);
  for (int k = 1; k <= n; ++k) {
    scale *= Scalar(2);
    Scalar acc(0);
    for (int i = 0; i <= n - k; ++i) {
      const auto lag = static_cast<std::size_t>(2 * (n - k - i) + k) * layout.h_steps;
      acc += static_cast<Scalar>(binomial(n - k, i)) * y.tap(lag);
    }
    phi(k - 1) = scale * acc;
  }
  return phi;
}

/// Elementary symmetric polynomials e_0..e_n of `values`.
template <typename Derived>
Vector<typename Derived::Scalar> elementary_symmetric(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const auto n = values.size();
  Vector<Scalar> e = Vector<Scalar>::Zero(n + 1);
  e(0) = Scalar(1);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k >= 1; --k) e(k) += values(j) * e(k - 1);
  return e;
}

/// theta_k = (-1)^(k+1) e_k(c), c_i = cos(w_i h): the Vieta map from cosines.
template <typename Derived>
Vector<typename Derived::Scalar> theta_from_cosines(const Eigen::MatrixBase<Derived>& cosines) {
  using Scalar = typename Derived::Scalar;
  const auto e = elementary_symmetric(cosines);
  const auto n = cosines.size();
  Vector<Scalar> theta(n);
  for (Eigen::Index k = 1; k <= n; ++k) theta(k - 1) = (k % 2 == 1 ? Scalar(1) : Scalar(-1)) * e(k);
  return theta;
}

/// Regression parameter vector for known frequencies. Repeated frequencies are rejected.
template <typename Derived>
Vector<typename Derived::Scalar> true_theta(const Eigen::MatrixBase<Derived>& frequencies,
                                            typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  using std::cos;
  const auto n = frequencies.size();
  if (n < 1) throw UsageError("true_theta: at least one frequency required");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (frequencies(i) == frequencies(j)) throw UsageError("true_theta: repeated frequency");
  // Sorted so the result does not depend on input order, bit for bit.
  Vector<Scalar> c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = cos(frequencies(i) * h);
  std::sort(c.begin(), c.end());
  return theta_from_cosines(c);
}

/// Regressand/regressor pair of the n-th order model at one sample.
template <typename Scalar>
struct RegressionSample {
  double time = 0.0;
  Scalar psi = Scalar(0);
  Vector<Scalar> phi;
  bool valid = false;  // every tap read real history (t >= 2nh)
};

/// Streams measurements into a delay line and emits RegressionSamples.
template <typename Scalar = double>
class Regressor {
public:
  explicit Regressor(RegressorLayout layout) : layout_(layout), line_(layout.depth()) {
    if (layout.n < 1 || layout.n > kMaxBinomialOrder) throw UsageError("Regressor: n out of range");
  }

  RegressionSample<Scalar> push(Scalar y, double time) {
    line_.push(y);
    RegressionSample<Scalar> s;
    s.time = time;
    s.psi = compute_psi(line_, layout_);
    s.phi = compute_phi(line_, layout_);
    s.valid = line_.count() > layout_.depth();
    return s;
  }

  const RegressorLayout& layout() const { return layout_; }
  const TappedDelayLine<Scalar>& line() const { return line_; }

private:
  RegressorLayout layout_;
  TappedDelayLine<Scalar> line_;
};

}  // namespace ftfreq
