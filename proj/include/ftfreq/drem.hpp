#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ftfreq/errors.hpp"
#include "ftfreq/parameterization.hpp"
#include "ftfreq/tapped_delay.hpp"

namespace ftfreq {

inline constexpr Eigen::Index kMaxAdjugateOrder = 8;

namespace detail {

/// Matrix with row `skip_row` and column `skip_col` removed.
template <typename Derived>
Matrix<typename Derived::Scalar> minor_of(const Eigen::MatrixBase<Derived>& m, Eigen::Index skip_row,
                                          Eigen::Index skip_col) {
  const auto n = m.rows();
  Matrix<typename Derived::Scalar> out(n - 1, n - 1);
  for (Eigen::Index i = 0, r = 0; i < n; ++i) {
    if (i == skip_row) continue;
    for (Eigen::Index j = 0, c = 0; j < n; ++j) {
      if (j == skip_col) continue;
      out(r, c++) = m(i, j);
    }
    ++r;
  }
  return out;
}

template <typename Derived>
typename Derived::Scalar small_determinant(const Eigen::MatrixBase<Derived>& m) {
  switch (m.rows()) {
    case 0: return typename Derived::Scalar(1);
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: return Eigen::FullPivLU<Matrix<typename Derived::Scalar>>(m).determinant();
  }
}

template <typename Derived>
Matrix<typename Derived::Scalar> cofactor_adjugate(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto n = m.rows();
  Matrix<Scalar> adj(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar sign = ((i + j) % 2 == 0) ? Scalar(1) : Scalar(-1);
      adj(j, i) = sign * small_determinant(minor_of(m, i, j));
    }
  return adj;
}

}  // namespace detail

/// Determinant; closed forms up to 3x3, LU beyond.
template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw UsageError("determinant: matrix must be square");
  if (m.rows() <= 3) return detail::small_determinant(m);
  return Eigen::PartialPivLU<Matrix<typename Derived::Scalar>>(m).determinant();
}

/// Classical adjoint: adj(M) M = M adj(M) = det(M) I, also for singular M.
///
/// Cofactor expansion for n <= 4. For 5 <= n <= 8 the LU route det(M) M^-1 is
/// used when M is safely invertible, falling back to cofactors otherwise.
template <typename Derived>
Matrix<typename Derived::Scalar> adjugate(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  const auto n = m.rows();
  if (n != m.cols()) throw UsageError("adjugate: matrix must be square");
  if (n < 1 || n > kMaxAdjugateOrder) throw UsageError("adjugate: order must be in [1, 8]");
  if (!m.allFinite()) throw NumericError("adjugate: non-finite matrix entry");
  if (n == 1) return Matrix<Scalar>::Ones(1, 1);
  if (n <= 4) return detail::cofactor_adjugate(m);

  const Eigen::PartialPivLU<Matrix<Scalar>> lu(m);
  const Scalar det = lu.determinant();
  // Hadamard bound: |det| <= prod of row norms.
  Scalar hadamard(1);
  for (Eigen::Index i = 0; i < n; ++i) hadamard *= m.row(i).norm();
  if (hadamard > Scalar(0) && abs(det) > Scalar(1e-8) * hadamard) return det * lu.inverse();
  return detail::cofactor_adjugate(m);
}

/// Stacked system built from n successive d-delays of the regression.
template <typename Scalar>
struct ExtendedRegression {
  double time = 0.0;
  Vector<Scalar> Psi_f;  // Psi_f(i) = psi(t - (i+1) d)
  Matrix<Scalar> Phi_f;  // row i = phi^T(t - (i+1) d)
  bool warm = false;     // every contributing tap holds real history
};

/// Decoupled scalar regressions Psi_i = Delta theta_i.
template <typename Scalar>
struct MixedSample {
  double time = 0.0;
  Scalar Delta = Scalar(0);
  Vector<Scalar> Psi;
  bool warm = false;
};

/// Applies H^i (i = 1..n) to the regression stream.
template <typename Scalar = double>
class Extender {
public:
  Extender(RegressorLayout layout, std::size_t d_steps)
      : layout_(layout), d_steps_(d_steps), psi_(n_steps()), phi_(layout.n, TappedDelayLine<Scalar>(n_steps())) {
    if (d_steps == 0) throw UsageError("Extender: d must be at least one sample");
  }

  ExtendedRegression<Scalar> push(const RegressionSample<Scalar>& sample) {
    const int n = layout_.n;
    if (sample.phi.size() != n) throw UsageError("Extender: regressor length does not match n");
    psi_.push(sample.psi);
    for (int k = 0; k < n; ++k) phi_[k].push(sample.phi(k));
    ++pushed_;

    ExtendedRegression<Scalar> ext;
    ext.time = sample.time;
    ext.Psi_f.resize(n);
    ext.Phi_f.resize(n, n);
    for (int i = 0; i < n; ++i) {
      const auto lag = static_cast<std::size_t>(i + 1) * d_steps_;
      ext.Psi_f(i) = psi_.tap(lag);
      for (int k = 0; k < n; ++k) ext.Phi_f(i, k) = phi_[k].tap(lag);
    }
    ext.warm = pushed_ > latency_steps();
    return ext;
  }

  /// Samples needed before every tap is real: 2nh + nd.
  std::size_t latency_steps() const { return layout_.depth() + n_steps(); }

  void clear() {
    psi_.clear();
    for (auto& line : phi_) line.clear();
    pushed_ = 0;
  }

private:
  std::size_t n_steps() const { return static_cast<std::size_t>(layout_.n) * d_steps_; }

  RegressorLayout layout_;
  std::size_t d_steps_;
  TappedDelayLine<Scalar> psi_;
  std::vector<TappedDelayLine<Scalar>> phi_;
  std::size_t pushed_ = 0;
};

/// Delta = det(eps Phi_f), Psi = adj(eps Phi_f) eps Psi_f.
template <typename Scalar>
MixedSample<Scalar> mix(const ExtendedRegression<Scalar>& ext, Scalar epsilon) {
  using std::pow;
  if (!(epsilon > Scalar(0))) throw UsageError("mix: epsilon must be positive");
  const auto n = ext.Phi_f.rows();
  const Scalar eps_n = pow(epsilon, static_cast<int>(n));
  MixedSample<Scalar> out;
  out.time = ext.time;
  out.warm = ext.warm;
  out.Delta = eps_n * determinant(ext.Phi_f);
  // adj(eps M) eps v = eps^(n-1) adj(M) eps v
  out.Psi = eps_n * (adjugate(ext.Phi_f) * ext.Psi_f);
  return out;
}

}  // namespace ftfreq
