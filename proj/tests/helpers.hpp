// SPDX-License-Identifier: Apache-2.0
//
// Independent oracles used by the tests. They deliberately avoid the
// library code paths they are checking.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

// Fourier coefficient of (i kappa_1 cos + i kappa_2 sin) e^{i m theta}
// against e^{i m' theta}, by trapezoid quadrature (exact for trig
// polynomials once the node count exceeds the bandwidth).
inline Complex x_coefficient(double kappa1, double kappa2, int m_out, int m_in,
                             int nodes = 256) {
  Complex acc(0.0, 0.0);
  for (int j = 0; j < nodes; ++j) {
    const double th = 2.0 * M_PI * j / nodes;
    const Complex f =
        Complex(0.0, kappa1 * std::cos(th) + kappa2 * std::sin(th)) *
        std::exp(Complex(0.0, m_in * th));
    acc += std::exp(Complex(0.0, -m_out * th)) * f;
  }
  return acc / static_cast<double>(nodes);
}

// Brute-force lattice count of |kappa|^2 values equal to `value` (within
// tol) for kappa_j = 2 pi k_j / L_j.
inline int lattice_multiplicity(double value, double L1, double L2, double tol = 1e-9) {
  const double f1 = 2.0 * M_PI / L1, f2 = 2.0 * M_PI / L2;
  const int b1 = static_cast<int>(std::ceil(std::sqrt(value + 1.0) / f1)) + 1;
  const int b2 = static_cast<int>(std::ceil(std::sqrt(value + 1.0) / f2)) + 1;
  int count = 0;
  for (int k1 = -b1; k1 <= b1; ++k1)
    for (int k2 = -b2; k2 <= b2; ++k2)
      if (std::abs(f1 * f1 * k1 * k1 + f2 * f2 * k2 * k2 - value) <= tol) ++count;
  return count;
}

inline int lattice_count_in_range(double lo, double hi, double L1, double L2) {
  const double f1 = 2.0 * M_PI / L1, f2 = 2.0 * M_PI / L2;
  const int b1 = static_cast<int>(std::ceil(std::sqrt(std::max(hi, 0.0)) / f1)) + 1;
  const int b2 = static_cast<int>(std::ceil(std::sqrt(std::max(hi, 0.0)) / f2)) + 1;
  int count = 0;
  for (int k1 = -b1; k1 <= b1; ++k1)
    for (int k2 = -b2; k2 <= b2; ++k2) {
      const double v = f1 * f1 * k1 * k1 + f2 * f2 * k2 * k2;
      if (v >= lo && v <= hi) ++count;
    }
  return count;
}

// Simpson quadrature on [0, t].
inline double simpson(const std::function<double(double)>& f, double t, int n = 2000) {
  if (n % 2) ++n;
  const double h = t / n;
  double acc = f(0.0) + f(t);
  for (int j = 1; j < n; ++j) acc += f(j * h) * (j % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// msd oracle: 2 * integral_0^t (t - s) vacf(s) ds with vacf(s) = g^2 e^{-g^2 s/2}.
// Node count scales with gamma^2 t so the decay layer (width 2/gamma^2) is
// resolved.
inline double msd_by_quadrature(double gamma, double t) {
  const int n = std::max(2000, static_cast<int>(20.0 * gamma * gamma * t));
  return 2.0 * simpson(
                   [&](double s) {
                     return (t - s) * gamma * gamma *
                            std::exp(-gamma * gamma * s / 2.0);
                   },
                   t, n);
}

// standard normal tail P(N > a)
inline double normal_tail(double a) { return 0.5 * std::erfc(a / std::sqrt(2.0)); }

}  // namespace oracle
