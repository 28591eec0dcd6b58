// SPDX-License-Identifier: Apache-2.0
//
// Flat-torus geometry, horizontal Fourier modes, Sobolev weights, and the
// exact base-Laplacian spectrum everything else is compared against.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "kbm/errors.hpp"

namespace kbm {

using Complex = std::complex<double>;

// Base manifold: flat torus R^2/(L1 Z x L2 Z). The unit tangent bundle is
// T^2 x S^1 with the product (Sasaki) metric, so the total Laplacian acts
// diagonally on e^{i(kappa.x + m theta)} with eigenvalue |kappa|^2 + m^2.
// Dimension is kept as a field so other fibers can be added later; v1
// accepts only n = 2.
struct TorusSpec {
  int n = 2;
  std::array<double, 2> lengths{2.0 * M_PI, 2.0 * M_PI};

  // c_n = 1/(n(n-1)); exactly 1/2 for n = 2.
  double c_n() const { return 1.0 / (n * (n - 1.0)); }

  void validate() const {
    if (n != 2)
      throw InvalidArgument("TorusSpec: only n = 2 is implemented (got n = " +
                            std::to_string(n) + ")");
    if (!(lengths[0] > 0.0) || !(lengths[1] > 0.0))
      throw InvalidArgument("TorusSpec: side lengths must be positive");
  }
};

// One horizontal Fourier mode e^{i kappa.x}, kappa_j = 2 pi k_j / L_j.
struct HMode {
  std::array<int, 2> k{0, 0};
  std::array<double, 2> kappa{0.0, 0.0};

  HMode() = default;
  HMode(std::array<int, 2> k_, const TorusSpec& spec)
      : k(k_),
        kappa{2.0 * M_PI * k_[0] / spec.lengths[0],
              2.0 * M_PI * k_[1] / spec.lengths[1]} {}

  double kappa_sq() const { return kappa[0] * kappa[0] + kappa[1] * kappa[1]; }
};

// Vertical truncation |m| <= M; fiber harmonic e^{i m theta} has vertical
// eigenvalue |m|(|m| + n - 2) = m^2 for n = 2.
struct VIndexRange {
  int M = 1;

  explicit VIndexRange(int M_) : M(M_) {
    if (M < 1) throw InvalidArgument("VIndexRange: M must be >= 1");
  }
  int size() const { return 2 * M + 1; }
  // row/column index of vertical index m in a full mode block
  int index_of(int m) const { return m + M; }
  static double vertical_eigenvalue(int m) {
    return static_cast<double>(m) * m;
  }
};

// Rectangle U in the complex plane.
struct SpectralWindow {
  double re_min, re_max, im_min, im_max;

  SpectralWindow(double re_min_, double re_max_, double im_min_, double im_max_)
      : re_min(re_min_), re_max(re_max_), im_min(im_min_), im_max(im_max_) {
    if (!(re_min < re_max) || !(im_min < im_max))
      throw InvalidArgument("SpectralWindow: need re_min < re_max and im_min < im_max");
  }

  bool contains(Complex z, double margin = 0.0) const {
    return z.real() >= re_min + margin && z.real() <= re_max - margin &&
           z.imag() >= im_min + margin && z.imag() <= im_max - margin;
  }
  // distance from z to the rectangle boundary (positive inside)
  double boundary_distance(Complex z) const {
    double d = z.real() - re_min;
    d = std::min(d, re_max - z.real());
    d = std::min(d, z.imag() - im_min);
    d = std::min(d, im_max - z.imag());
    return d;
  }
};

// H^s weight on Fourier coefficients: w_s(k, m) = (1 + |kappa|^2 + m^2)^{s/2}.
double sobolev_weight(double s, const HMode& mode, int m);

// All base-Laplacian eigenvalues |kappa|^2 inside the window, with lattice
// multiplicities, sorted ascending. The window's imaginary range must
// contain 0 for a (real) base eigenvalue to be included.
std::vector<std::pair<double, int>> base_spectrum(const TorusSpec& spec,
                                                  const SpectralWindow& window);

// All lattice modes with |kappa|^2 <= cutoff (used by sweeps).
std::vector<HMode> modes_up_to(const TorusSpec& spec, double kappa_sq_cutoff);

// Distinct |kappa|^2 shells with multiplicity, ascending, up to cutoff.
std::vector<std::pair<double, int>> kappa_sq_shells(const TorusSpec& spec,
                                                    double kappa_sq_cutoff);

}  // namespace kbm
