#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "ftfreq/errors.hpp"
#include "ftfreq/parameterization.hpp"

namespace ftfreq {

inline constexpr Eigen::Index kMaxRootDegree = 8;

/// Monic x^n - theta_1 x^(n-1) - ... - theta_n, coefficients highest degree first.
/// Its roots are the cosines c_i that theta was built from.
template <typename Derived>
Vector<typename Derived::Scalar> theta_to_polynomial(const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> poly(theta.size() + 1);
  poly(0) = Scalar(1);
  poly.tail(theta.size()) = -theta;
  return poly;
}

namespace detail {

template <typename Scalar>
std::complex<long double> horner(const Vector<Scalar>& poly, std::complex<long double> z,
                                 std::complex<long double>* derivative = nullptr) {
  std::complex<long double> p = 0.0L, dp = 0.0L;
  for (Eigen::Index i = 0; i < poly.size(); ++i) {
    dp = dp * z + p;
    p = p * z + static_cast<long double>(poly(i));
  }
  if (derivative) *derivative = dp;
  return p;
}

template <typename Scalar>
void polish(const Vector<Scalar>& poly, std::complex<Scalar>& root) {
  std::complex<long double> z(root.real(), root.imag());
  std::complex<long double> dp;
  long double best = std::abs(horner(poly, z, &dp));
  for (int it = 0; it < 8 && best > 0.0L; ++it) {
    if (dp == std::complex<long double>(0.0L)) break;
    const auto p = horner(poly, z);
    const auto next = z - p / dp;
    std::complex<long double> dnext;
    const long double val = std::abs(horner(poly, next, &dnext));
    if (!(val < best)) break;
    z = next;
    dp = dnext;
    best = val;
  }
  root = {static_cast<Scalar>(z.real()), static_cast<Scalar>(z.imag())};
}

}  // namespace detail

/// All roots of a monic polynomial (highest degree first), repeated by multiplicity,
/// ordered by real part then imaginary part.
///
/// Closed forms for degree <= 2, companion-matrix eigenvalues (Hessenberg + shifted QR)
/// above. Every root is Newton-polished in extended precision.
template <typename Derived>
std::vector<std::complex<typename Derived::Scalar>> find_roots(const Eigen::MatrixBase<Derived>& coefficients) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  using std::abs;
  using std::sqrt;

  const Vector<Scalar> poly = coefficients;
  const auto degree = poly.size() - 1;
  if (degree < 1 || degree > kMaxRootDegree) throw UsageError("find_roots: degree must be in [1, 8]");
  if (poly(0) != Scalar(1)) throw UsageError("find_roots: polynomial must be monic");
  if (!poly.allFinite()) throw NumericError("find_roots: non-finite coefficient");

  std::vector<Complex> roots;
  if (degree == 1) {
    roots.push_back(Complex(-poly(1), Scalar(0)));
  } else if (degree == 2) {
    const Scalar b = poly(1), c = poly(2);
    const Scalar disc = b * b - Scalar(4) * c;
    if (disc >= Scalar(0)) {
      // Stable pairing: the larger-magnitude root first, the other via c / q.
      const Scalar q = -(b + (b >= Scalar(0) ? sqrt(disc) : -sqrt(disc))) / Scalar(2);
      roots.push_back(Complex(q, 0));
      roots.push_back(q != Scalar(0) ? Complex(c / q, 0) : Complex(0, 0));
    } else {
      const Scalar im = sqrt(-disc) / Scalar(2);
      roots.push_back(Complex(-b / Scalar(2), -im));
      roots.push_back(Complex(-b / Scalar(2), im));
    }
  } else {
    Matrix<Scalar> companion = Matrix<Scalar>::Zero(degree, degree);
    companion.row(0) = -poly.tail(degree).transpose();
    companion.diagonal(-1).setOnes();
    Eigen::EigenSolver<Matrix<Scalar>> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
      throw NumericError("find_roots: eigenvalue iteration did not converge for degree " +
                         std::to_string(degree));
    for (Eigen::Index i = 0; i < degree; ++i) roots.push_back(solver.eigenvalues()(i));
  }

  Scalar max_coef(0);
  for (Eigen::Index i = 0; i < poly.size(); ++i) max_coef = std::max(max_coef, abs(poly(i)));
  const Scalar tol = Scalar(1e-10) * (Scalar(1) + max_coef);
  for (auto& r : roots) {
    detail::polish(poly, r);
    const auto residual = static_cast<Scalar>(std::abs(detail::horner(poly, {r.real(), r.imag()})));
    if (!(residual <= tol)) {
      std::ostringstream os;
      os << "find_roots: residual " << residual << " at root " << r << " exceeds " << tol;
      throw NumericError(os.str());
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

struct FrequencyBounds {
  double omega_min = 0.0;
  double omega_max = INFINITY;
};

template <typename Scalar = double>
struct FrequencyEstimate {
  Vector<Scalar> omega_hat;  // ascending
  Vector<Scalar> cosines;    // c_i actually used, after clamping, in omega order
  Scalar residual = Scalar(0);  // largest |Im| among the roots before it was dropped
  bool clamped = false;         // some real part was pulled into [-1, 1]
  bool projected = false;       // some frequency was pulled into [omega_min, omega_max]
};

/// omega_i = arccos(Re c_i) / h, projected into the band and sorted ascending.
/// Roots with |Im| > imag_tol (1 + |Re|) are rejected as non-physical.
template <typename Scalar>
FrequencyEstimate<Scalar> roots_to_frequencies(const std::vector<std::complex<Scalar>>& roots, Scalar h,
                                               const FrequencyBounds& bounds, Scalar imag_tol = Scalar(1e-3)) {
  using std::abs;
  using std::acos;
  if (!(h > Scalar(0))) throw UsageError("roots_to_frequencies: h must be positive");
  FrequencyEstimate<Scalar> est;
  const auto n = static_cast<Eigen::Index>(roots.size());
  est.omega_hat.resize(n);
  for (const auto& r : roots) {
    est.residual = std::max(est.residual, abs(r.imag()));
    if (abs(r.imag()) > imag_tol * (Scalar(1) + abs(r.real()))) {
      std::vector<std::complex<double>> raw;
      for (const auto& q : roots) raw.emplace_back(static_cast<double>(q.real()), static_cast<double>(q.imag()));
      std::ostringstream os;
      os << "estimate not physical: root " << r << " has imaginary part beyond tolerance " << imag_tol;
      throw NotPhysicalError(os.str(), std::move(raw));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar c = roots[static_cast<std::size_t>(i)].real();
    if (c > Scalar(1) || c < Scalar(-1)) {
      c = std::clamp(c, Scalar(-1), Scalar(1));
      est.clamped = true;
    }
    Scalar w = acos(c) / h;
    if (w < Scalar(bounds.omega_min) || w > Scalar(bounds.omega_max)) {
      w = std::clamp(w, Scalar(bounds.omega_min), Scalar(bounds.omega_max));
      est.projected = true;
    }
    est.omega_hat(i) = w;
  }
  std::sort(est.omega_hat.begin(), est.omega_hat.end());
  est.cosines = (est.omega_hat * h).array().cos().matrix();
  return est;
}

/// theta -> polynomial -> roots -> frequencies.
template <typename Derived>
FrequencyEstimate<typename Derived::Scalar> recover_frequencies(const Eigen::MatrixBase<Derived>& theta,
                                                                typename Derived::Scalar h,
                                                                const FrequencyBounds& bounds,
                                                                typename Derived::Scalar imag_tol = 1e-3) {
  return roots_to_frequencies(find_roots(theta_to_polynomial(theta)), h, bounds, imag_tol);
}

}  // namespace ftfreq
