// SPDX-License-Identifier: Apache-2.0
//
// Heat semigroup e^{-tP_gamma} by per-mode eigendecomposition, the spectral
// gap, and the finite eigenvalue expansion behind the equilibrium rate.

#pragma once

#include <map>

#include "kbm/spectra.hpp"

namespace kbm {

// Fourier coefficients of a state on SM, grouped by horizontal mode. Each
// mode holds the vertical coefficients m = -M..M; the L^2 norm is the
// coefficient 2-norm (orthonormal basis convention).
struct StateVector {
  double s = 0.0;  // ambient H^s exponent used by norm_hs
  int M = 1;
  std::map<std::array<int, 2>, Vector> modes;

  double norm_l2() const;
  double norm_hs(const TorusSpec& spec) const;

  Complex& coeff(std::array<int, 2> k, int m);
  Complex coeff(std::array<int, 2> k, int m) const;
};

// Test vector with Gaussian-decaying random coefficients, fixed seed.
StateVector default_state(double kappa_sq_max, int M, std::uint64_t seed,
                          const TorusSpec& spec = TorusSpec{});

struct PropagateOptions {
  int buffer = 16;          // extra vertical margin for the operator block
  double cond_limit = 1e8;  // eigenvector condition triggering expm fallback
};

// e^{-tP_gamma} u. Diagonalizes each mode block (with the vector's support
// padded by `buffer`); a badly conditioned eigenvector basis falls back to
// a scaling-and-squaring matrix exponential on that block.
StateVector propagate(double gamma, const StateVector& u, double t,
                      const TorusSpec& spec = TorusSpec{},
                      const PropagateOptions& opts = PropagateOptions{});

// min Re over nonzero eigenvalues of a certified window sweep. The zero
// eigenvalue (|lambda| < 1e-8) must be present and unique.
double spectral_gap(double gamma, const TorusSpec& spec,
                    std::optional<SpectralWindow> search_window = std::nullopt,
                    double tol = 1e-8);

struct RetainedGroup {
  Complex lambda;    // cluster representative (mean)
  int multiplicity;  // number of clustered eigenpairs across modes
};

struct ExpansionReport {
  double beta = 0.0;
  std::vector<RetainedGroup> retained;
  std::vector<std::pair<double, double>> remainder_norms;  // (t, L2 remainder)
  double fitted_rate = 0.0;  // -slope of log remainder vs t
};

// Theorem-style expansion: retain spectral groups with Re lambda <= beta,
// project u on their generalized eigenspaces (eigenbasis projectors;
// contour integrals for clusters), tabulate the L^2 remainder of
// e^{-tP}u minus the retained terms, and fit its exponential rate.
ExpansionReport equilibrium_decay(double gamma, const StateVector& u,
                                  const std::vector<double>& t_grid, double beta,
                                  const TorusSpec& spec = TorusSpec{});

}  // namespace kbm
