// SPDX-License-Identifier: Apache-2.0

#include "kbm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>

namespace kbm {

namespace {

void require_finite(const Matrix& A, const char* who) {
  if (!A.allFinite())
    throw InvalidArgument(std::string(who) + ": matrix has non-finite entries");
}

// SVD backend: Jacobi is exact-ish and fine for the small dense blocks used
// here; BDC for anything bigger.
Eigen::VectorXd singular_values(const Matrix& A) {
  if (A.rows() <= 128) {
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues();
  }
  Eigen::BDCSVD<Matrix> svd(A);
  return svd.singularValues();
}

}  // namespace

std::vector<EigenPair> eig(const Matrix& A) {
  require_finite(A, "eig");
  if (A.rows() != A.cols()) throw InvalidArgument("eig: matrix must be square");
  Eigen::ComplexEigenSolver<Matrix> solver(A, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("eig: QR iteration failed to converge");
  const double scale = opnorm2(A);
  const int n = static_cast<int>(A.rows());
  std::vector<EigenPair> pairs;
  pairs.reserve(n);
  for (int j = 0; j < n; ++j) {
    Vector v = solver.eigenvectors().col(j);
    v.normalize();
    const Complex lambda = solver.eigenvalues()(j);
    const double res = (A * v - lambda * v).norm();
    pairs.push_back({lambda, std::move(v), res, res <= kEigResidualRel * std::max(scale, 1e-300)});
  }
  std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return pairs;
}

double smin(const Matrix& A) {
  require_finite(A, "smin");
  if (A.size() == 0) return 0.0;
  auto sv = singular_values(A);
  return sv(sv.size() - 1);
}

double opnorm2(const Matrix& A) {
  require_finite(A, "opnorm2");
  if (A.size() == 0) return 0.0;
  return singular_values(A)(0);
}

Eigen::VectorXd sobolev_weights_for_block(double s, const HMode& mode, int size) {
  Eigen::VectorXd w(size);
  if (size % 2 == 1) {
    const int M = (size - 1) / 2;
    for (int m = -M; m <= M; ++m) w(m + M) = sobolev_weight(s, mode, m);
  } else {
    // restricted block: m = -M..-1, 1..M
    const int M = size / 2;
    int i = 0;
    for (int m = -M; m <= M; ++m)
      if (m != 0) w(i++) = sobolev_weight(s, mode, m);
  }
  return w;
}

double weighted_opnorm(const Matrix& block, double s_in, double s_out,
                       const HMode& mode) {
  require_finite(block, "weighted_opnorm");
  if (block.rows() != block.cols())
    throw InvalidArgument("weighted_opnorm: block must be square");
  const int n = static_cast<int>(block.rows());
  Eigen::VectorXd w_out = sobolev_weights_for_block(s_out, mode, n);
  Eigen::VectorXd w_in = sobolev_weights_for_block(s_in, mode, n);
  Matrix scaled = w_out.asDiagonal() * block * w_in.cwiseInverse().asDiagonal();
  return opnorm2(scaled);
}

namespace {

std::vector<Complex> in_window_values(const std::vector<EigenPair>& pairs,
                                      const SpectralWindow& window) {
  std::vector<Complex> vals;
  for (const auto& p : pairs)
    if (window.contains(p.value)) vals.push_back(p.value);
  return vals;
}

// Symmetric matching distance between two in-window eigenvalue sets; a
// cardinality change reports infinity.
double drift_between(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& va : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& vb : b) best = std::min(best, std::abs(va - vb));
    worst = std::max(worst, best);
  }
  for (const auto& vb : b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& va : a) best = std::min(best, std::abs(va - vb));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TruncationResult truncation_search(const std::function<Matrix(int)>& builder,
                                   const SpectralWindow& window, double tol,
                                   int M0, int ceiling) {
  if (!(tol >= 0.0)) throw InvalidArgument("truncation_search: tol must be >= 0");
  if (M0 < 4) throw InvalidArgument("truncation_search: M0 must be >= 4");

  int M = M0;
  auto pairs_M = eig(builder(M));
  auto vals_M = in_window_values(pairs_M, window);

  TruncationResult out;
  while (true) {
    const int M2 = 2 * M;
    auto pairs_M2 = eig(builder(M2));
    auto vals_M2 = in_window_values(pairs_M2, window);
    const double drift = drift_between(vals_M, vals_M2);

    out.report = {M, M2, drift, tol > 0.0 && drift < tol};
    out.pairs = std::move(pairs_M2);
    if (out.report.converged) return out;
    if (M2 > ceiling) {
      out.report.converged = false;
      return out;
    }
    M = M2;
    vals_M = std::move(vals_M2);
  }
}

}  // namespace kbm
