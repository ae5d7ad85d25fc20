#pragma once

// Reference computations that share no code path with the library.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline std::uint64_t factorial_binomial(int n, int i) {
  std::uint64_t num = 1, den = 1;
  for (int k = 2; k <= n; ++k) num *= static_cast<std::uint64_t>(k);
  for (int k = 2; k <= i; ++k) den *= static_cast<std::uint64_t>(k);
  for (int k = 2; k <= n - i; ++k) den *= static_cast<std::uint64_t>(k);
  return num / den;
}

inline double at(const std::vector<double>& y, long k) { return k < 0 ? 0.0 : y[static_cast<std::size_t>(k)]; }

/// Applies Z^2 + 1 - 2 c Z (zero pre-history) to a whole array.
inline std::vector<double> second_difference(const std::vector<double>& y, double c, long h) {
  std::vector<double> out(y.size());
  for (long k = 0; k < static_cast<long>(y.size()); ++k) out[k] = at(y, k - 2 * h) + at(y, k) - 2.0 * c * at(y, k - h);
  return out;
}

/// Applies Z^2 + 1 (zero pre-history) to a whole array.
inline std::vector<double> z2_plus_one(const std::vector<double>& y, long h) {
  std::vector<double> out(y.size());
  for (long k = 0; k < static_cast<long>(y.size()); ++k) out[k] = at(y, k - 2 * h) + at(y, k);
  return out;
}

inline std::vector<double> shift(const std::vector<double>& y, long steps, double scale) {
  std::vector<double> out(y.size());
  for (long k = 0; k < static_cast<long>(y.size()); ++k) out[k] = scale * at(y, k - steps);
  return out;
}

/// psi and phi built by repeated operator application on the whole trace.
struct OperatorRegression {
  std::vector<double> psi;
  std::vector<std::vector<double>> phi;  // phi[k-1][t]
};

inline OperatorRegression operator_regression(const std::vector<double>& y, int n, long h) {
  OperatorRegression r;
  std::vector<std::vector<double>> powers{y};  // powers[m] = [Z^2+1]^m y
  for (int m = 1; m <= n; ++m) powers.push_back(z2_plus_one(powers.back(), h));
  r.psi = powers[n];
  for (int k = 1; k <= n; ++k) r.phi.push_back(shift(powers[n - k], k * h, std::pow(2.0, k)));
  return r;
}

/// Coefficients of prod (x - c_i), highest degree first.
inline std::vector<double> poly_from_roots(const std::vector<double>& roots) {
  std::vector<double> p{1.0};
  for (double c : roots) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] -= c * p[i];
    }
    p = q;
  }
  return p;
}

/// Leibniz-formula determinant (n! terms).
inline double leibniz_det(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long double det = 0.0L;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    long double term = (inversions % 2) ? -1.0L : 1.0L;
    for (int i = 0; i < n; ++i) term *= m(i, perm[i]);
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(det);
}

inline Eigen::MatrixXd leibniz_adjugate(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  Eigen::MatrixXd adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::MatrixXd minor(n - 1, n - 1);
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      adj(j, i) = (((i + j) % 2) ? -1.0 : 1.0) * leibniz_det(minor);
    }
  return adj;
}

/// Distinct frequencies in [lo, hi] whose cosines cos(w h) are pairwise >= min_sep apart.
inline std::vector<double> random_frequencies(std::mt19937_64& rng, int n, double lo, double hi, double h,
                                              double min_sep) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (;;) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (auto& x : w) x = dist(rng);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < i && ok; ++j)
        if (std::abs(std::cos(w[i] * h) - std::cos(w[j] * h)) < min_sep) ok = false;
    if (ok) return w;
  }
}

}  // namespace oracle
