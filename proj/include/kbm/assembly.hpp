// SPDX-License-Identifier: Apache-2.0
//
// Finite matrices of Delta_V, X, P_gamma, Q_A and the rescaled restricted
// operator on a single horizontal mode, truncated to |m| <= M.
//
// Basis: complex fiber exponentials e^{i m theta}, m = -M..M, so Delta_V is
// diag(m^2) and the geodesic field is exactly tridiagonal with couplings
//   X[m+1, m] = (i kappa_1 + kappa_2)/2,   X[m-1, m] = (i kappa_1 - kappa_2)/2.

#pragma once

#include <Eigen/Dense>

#include "kbm/model.hpp"

namespace kbm {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class MatrixKind { DeltaV, X, P, Q, ScaledRestricted };

// A truncated operator block on one horizontal mode. Rows/columns are
// indexed by m = -M..M (size 2M+1), except ScaledRestricted which has the
// m = 0 row and column deleted (size 2M).
struct ModeMatrix {
  double gamma = 0.0;  // meaningful for kind P (and h = 1/gamma for ScaledRestricted)
  HMode mode;
  int M = 0;
  MatrixKind kind = MatrixKind::DeltaV;
  Matrix entries;

  int index_of(int m) const { return m + M; }
};

ModeMatrix assemble_delta_v(const HMode& mode, int M);

// Exactly anti-Hermitian tridiagonal block of the geodesic field.
ModeMatrix assemble_X(const HMode& mode, int M);

// P = -gamma X + c_n gamma^2 Delta_V; diagonal gamma^2 m^2 / 2 for n = 2.
ModeMatrix assemble_P(double gamma, const HMode& mode, int M,
                      const TorusSpec& spec = TorusSpec{});

// Rank <= 1 absorbing potential: (0,0) entry A^2 when |kappa|^2 <= A^2.
ModeMatrix assemble_Q(double A, const HMode& mode, int M);

// Pi_perp (P~_h - h^2 lambda) Pi_perp with P~_h = c_n Delta_V - h X:
// the 2M x 2M block with row/column m = 0 deleted. Restricted rows map
// m in {-M..-1, 1..M} to 0..2M-1 in order.
ModeMatrix assemble_scaled_restricted(double h, Complex lambda, const HMode& mode,
                                      int M, const TorusSpec& spec = TorusSpec{});

// Index sets {m = 0} and {m != 0} as positions in the full 2M+1 ordering.
std::pair<std::vector<int>, std::vector<int>> projector_indices(int M);

}  // namespace kbm
