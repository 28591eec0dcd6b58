// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra with residual certification: eigenpairs,
// extreme singular values, Sobolev-weighted operator norms, and the
// doubling truncation controller.

#pragma once

#include <functional>
#include <vector>

#include "kbm/assembly.hpp"

namespace kbm {

inline constexpr double kEigResidualRel = 1e-10;
inline constexpr int kTruncationCeiling = 512;

struct EigenPair {
  Complex value;
  Vector right_vector;  // unit Euclidean norm
  double residual;      // ||A v - lambda v||_2
  bool certified;       // residual <= 1e-10 * ||A||_2
};

// Full eigendecomposition with per-pair residuals, sorted by (Re, Im).
// Throws on non-finite entries or solver failure; pairs whose residual
// exceeds the certificate threshold are flagged, never dropped.
std::vector<EigenPair> eig(const Matrix& A);

// Smallest singular value (= 1/||A^-1||_2 when invertible).
double smin(const Matrix& A);

// Largest singular value (spectral norm).
double opnorm2(const Matrix& A);

// Sobolev weight vector for a full block (m = -M..M, size 2M+1) or a
// restricted block (m != 0, size 2M); dispatch is by size parity.
Eigen::VectorXd sobolev_weights_for_block(double s, const HMode& mode, int size);

// || W_{s_out} A W_{s_in}^{-1} ||_2 with W_s = diag(w_s(k, m)).
double weighted_opnorm(const Matrix& block, double s_in, double s_out,
                       const HMode& mode);

struct TruncationReport {
  int M_used = 0;
  int M_check = 0;       // 2 * M_used
  double max_drift = 0;  // largest in-window eigenvalue movement M -> 2M
  bool converged = false;
};

struct TruncationResult {
  TruncationReport report;
  // Eigenpairs of the final (doubled) truncation, all of them.
  std::vector<EigenPair> pairs;
};

// Doubles M starting at M0 until every eigenvalue inside `window` moves
// less than `tol` when M doubles again (symmetric matching distance, so a
// count change also blocks convergence). Stops with converged = false once
// M exceeds `ceiling`; partial data is returned either way.
TruncationResult truncation_search(const std::function<Matrix(int)>& builder,
                                   const SpectralWindow& window, double tol,
                                   int M0, int ceiling = kTruncationCeiling);

}  // namespace kbm
