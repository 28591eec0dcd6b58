// SPDX-License-Identifier: Apache-2.0

#include "kbm/assembly.hpp"

namespace kbm {

namespace {
void require_M(int M) {
  if (M < 1) throw InvalidArgument("assembly: truncation M must be >= 1");
}
}  // namespace

ModeMatrix assemble_delta_v(const HMode& mode, int M) {
  require_M(M);
  const int n = 2 * M + 1;
  Matrix D = Matrix::Zero(n, n);
  for (int m = -M; m <= M; ++m)
    D(m + M, m + M) = VIndexRange::vertical_eigenvalue(m);
  return {0.0, mode, M, MatrixKind::DeltaV, std::move(D)};
}

ModeMatrix assemble_X(const HMode& mode, int M) {
  require_M(M);
  const int n = 2 * M + 1;
  Matrix X = Matrix::Zero(n, n);
  const Complex up(mode.kappa[1] / 2.0, mode.kappa[0] / 2.0);    // (i k1 + k2)/2
  const Complex down(-mode.kappa[1] / 2.0, mode.kappa[0] / 2.0); // (i k1 - k2)/2
  for (int m = -M; m <= M; ++m) {
    if (m + 1 <= M) X(m + 1 + M, m + M) = up;
    if (m - 1 >= -M) X(m - 1 + M, m + M) = down;
  }
  return {0.0, mode, M, MatrixKind::X, std::move(X)};
}

ModeMatrix assemble_P(double gamma, const HMode& mode, int M, const TorusSpec& spec) {
  if (!(gamma > 0.0)) throw InvalidArgument("assemble_P: gamma must be positive");
  require_M(M);
  spec.validate();
  const double cn = spec.c_n();
  Matrix P = -gamma * assemble_X(mode, M).entries;
  for (int m = -M; m <= M; ++m)
    P(m + M, m + M) += cn * gamma * gamma * VIndexRange::vertical_eigenvalue(m);
  return {gamma, mode, M, MatrixKind::P, std::move(P)};
}

ModeMatrix assemble_Q(double A, const HMode& mode, int M) {
  if (!(A > 0.0)) throw InvalidArgument("assemble_Q: A must be positive");
  require_M(M);
  const int n = 2 * M + 1;
  Matrix Q = Matrix::Zero(n, n);
  if (mode.kappa_sq() <= A * A) Q(M, M) = A * A;
  return {0.0, mode, M, MatrixKind::Q, std::move(Q)};
}

ModeMatrix assemble_scaled_restricted(double h, Complex lambda, const HMode& mode,
                                      int M, const TorusSpec& spec) {
  if (!(h > 0.0)) throw InvalidArgument("assemble_scaled_restricted: h must be positive");
  require_M(M);
  spec.validate();
  const double cn = spec.c_n();
  Matrix full = cn * assemble_delta_v(mode, M).entries - h * assemble_X(mode, M).entries;
  const int n = 2 * M + 1;
  for (int i = 0; i < n; ++i) full(i, i) -= h * h * lambda;
  Matrix R(2 * M, 2 * M);
  const auto [pi0, piPerp] = projector_indices(M);
  for (size_t r = 0; r < piPerp.size(); ++r)
    for (size_t c = 0; c < piPerp.size(); ++c)
      R(r, c) = full(piPerp[r], piPerp[c]);
  return {1.0 / h, mode, M, MatrixKind::ScaledRestricted, std::move(R)};
}

std::pair<std::vector<int>, std::vector<int>> projector_indices(int M) {
  require_M(M);
  std::vector<int> pi0{M};
  std::vector<int> piPerp;
  piPerp.reserve(2 * M);
  for (int i = 0; i < 2 * M + 1; ++i)
    if (i != M) piPerp.push_back(i);
  return {pi0, piPerp};
}

}  // namespace kbm
