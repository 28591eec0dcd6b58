// SPDX-License-Identifier: Apache-2.0

#include "kbm/spectra.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kbm/parallel.hpp"

namespace kbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Representative mode for a |kappa|^2 shell: every lattice mode on the
// shell is diagonal-unitarily similar to this one, so norms, eigenvalues
// and the Grushin scalar agree across the shell.
HMode shell_mode(double kappa_sq) {
  HMode m;
  m.k = {0, 0};
  m.kappa = {std::sqrt(kappa_sq), 0.0};
  return m;
}

double q_entry(double A, const HMode& mode) {
  return mode.kappa_sq() <= A * A ? A * A : 0.0;
}

// Cheap lower estimate of smin via inverse iteration on an existing LU.
double smin_estimate(const Eigen::PartialPivLU<Matrix>& lu, int n) {
  Vector v = Vector::Ones(n);
  v.normalize();
  double ratio = 0.0;
  for (int it = 0; it < 3; ++it) {
    Vector w = lu.solve(v);
    const double norm = w.norm();
    if (!(norm > 0.0) || !w.allFinite()) return 0.0;
    ratio = norm;
    v = w / norm;
  }
  return 1.0 / ratio;
}

}  // namespace

GrushinScalar::GrushinScalar(double gamma, const HMode& mode, int M, double A,
                             const TorusSpec& spec)
    : gamma_(gamma), h_(1.0 / gamma), q_(0.0), mode_(mode), M_(M) {
  if (!(gamma > 0.0)) throw InvalidArgument("GrushinScalar: gamma must be positive");
  if (A < 0.0) throw InvalidArgument("GrushinScalar: A must be >= 0");
  if (M < 1) throw InvalidArgument("GrushinScalar: M must be >= 1");
  spec.validate();
  q_ = A > 0.0 ? q_entry(A, mode) : 0.0;

  const Matrix X = assemble_X(mode, M).entries;
  base_ = spec.c_n() * assemble_delta_v(mode, M).entries - h_ * X;
  const auto [pi0, piPerp] = projector_indices(M);
  Matrix restricted(2 * M, 2 * M);
  x_col_.resize(2 * M);
  x_row_.resize(2 * M);
  for (int r = 0; r < 2 * M; ++r) {
    x_col_(r) = X(piPerp[r], M);
    x_row_(r) = X(M, piPerp[r]);
    for (int c = 0; c < 2 * M; ++c) restricted(r, c) = base_(piPerp[r], piPerp[c]);
  }
  base_ = std::move(restricted);
}

Complex GrushinScalar::operator()(Complex lambda) const {
  const int n = static_cast<int>(base_.rows());
  Matrix shifted = base_;
  for (int i = 0; i < n; ++i) shifted(i, i) -= h_ * h_ * lambda;
  Eigen::PartialPivLU<Matrix> lu(shifted);
  if (smin_estimate(lu, n) < kSminGuard)
    throw SingularBlockError("grushin_scalar: restricted block singular at lambda");
  const Complex coupling = x_row_ * lu.solve(x_col_);
  return (lambda + coupling - q_) / (gamma_ * gamma_);
}

Complex grushin_scalar(double gamma, Complex lambda, const HMode& mode, int M,
                       double A, const TorusSpec& spec) {
  return GrushinScalar(gamma, mode, M, A, spec)(lambda);
}

namespace {

// Phase accumulation along one boundary segment, bisecting while the
// increment is ambiguous (|delta arg| > pi/2). Depth 40 is far beyond any
// legitimate refinement need; hitting it means a zero sits on the boundary.
double phase_increment(const GrushinScalar& E, Complex za, Complex fa, Complex zb,
                       Complex fb, double zero_guard, int depth) {
  const double d = std::arg(fb / fa);
  if (std::abs(d) <= M_PI / 2.0) return d;
  if (depth >= 40)
    throw WindingError("grushin_zero_count: phase refinement exhausted (zero on boundary?)");
  const Complex zm = 0.5 * (za + zb);
  const Complex fm = E(zm);
  if (std::abs(fm) < zero_guard)
    throw WindingError("grushin_zero_count: |E_-+| vanishes on the window boundary");
  return phase_increment(E, za, fa, zm, fm, zero_guard, depth + 1) +
         phase_increment(E, zm, fm, zb, fb, zero_guard, depth + 1);
}

}  // namespace

int grushin_zero_count(double gamma, const HMode& mode, int M, double A,
                       const SpectralWindow& window, const TorusSpec& spec) {
  const GrushinScalar E(gamma, mode, M, A, spec);

  std::vector<Complex> corners = {
      {window.re_min, window.im_min},
      {window.re_max, window.im_min},
      {window.re_max, window.im_max},
      {window.re_min, window.im_max},
  };
  const int per_side = 16;
  std::vector<Complex> nodes;
  for (int side = 0; side < 4; ++side) {
    const Complex a = corners[side], b = corners[(side + 1) % 4];
    for (int i = 0; i < per_side; ++i)
      nodes.push_back(a + (b - a) * (static_cast<double>(i) / per_side));
  }
  nodes.push_back(nodes.front());

  double scale = 1.0;
  for (const auto& z : nodes) scale = std::max(scale, std::abs(z));
  const double zero_guard = 1e-10 / (gamma * gamma) * scale;

  std::vector<Complex> values(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    values[i] = E(nodes[i]);
    if (std::abs(values[i]) < zero_guard)
      throw WindingError("grushin_zero_count: |E_-+| vanishes on the window boundary");
  }

  double total = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    total += phase_increment(E, nodes[i], values[i], nodes[i + 1], values[i + 1],
                             zero_guard, 0);
  const double winding = total / (2.0 * M_PI);
  const double rounded = std::round(winding);
  if (std::abs(winding - rounded) > kWindingIntegerTol)
    throw WindingError("grushin_zero_count: winding integral not within 0.1 of an integer");
  return static_cast<int>(rounded);
}

Complex grushin_zero(double gamma, const HMode& mode, int M, double A,
                     Complex seed, const TorusSpec& spec) {
  const GrushinScalar E(gamma, mode, M, A, spec);
  const double g2 = gamma * gamma;
  auto done = [&](Complex z, Complex f) {
    return std::abs(f) <= 1e-12 / g2 * std::max(1.0, std::abs(z));
  };
  Complex z0 = seed;
  Complex z1 = seed + 1e-4 * std::max(1.0, std::abs(seed));
  Complex f0 = E(z0), f1 = E(z1);
  if (done(z0, f0)) return z0;
  for (int it = 0; it < 100; ++it) {
    if (done(z1, f1)) return z1;
    const Complex denom = f1 - f0;
    if (denom == Complex(0.0, 0.0))
      throw ConvergenceError("grushin_zero: secant stalled (flat E_-+)");
    const Complex z2 = z1 - f1 * (z1 - z0) / denom;
    z0 = z1;
    f0 = f1;
    z1 = z2;
    f1 = E(z1);
  }
  throw ConvergenceError("grushin_zero: no convergence in 100 iterations");
}

EigenSet spectrum_window(double gamma, const SpectralWindow& window,
                         const TorusSpec& spec, double tol,
                         const SweepOptions& opts) {
  if (!(gamma > 0.0)) throw InvalidArgument("spectrum_window: gamma must be positive");
  spec.validate();

  EigenSet out;
  out.gamma = gamma;
  out.window = window;
  out.horizontal_cutoff = std::max(4.0 * (window.re_max + 1.0), 0.0);

  const auto modes = modes_up_to(spec, out.horizontal_cutoff);
  struct ModeResult {
    std::vector<EigenItem> items;
    std::string failure;
  };
  std::vector<ModeResult> results(modes.size());

  parallel_for(static_cast<int>(modes.size()), [&](int i) {
    const HMode& mode = modes[i];
    auto builder = [&](int M) { return assemble_P(gamma, mode, M, spec).entries; };
    auto trunc = truncation_search(builder, window, tol, opts.M0, opts.ceiling);
    if (!trunc.report.converged) {
      std::ostringstream oss;
      oss << "mode k=(" << mode.k[0] << "," << mode.k[1] << ") |kappa|^2="
          << mode.kappa_sq() << ": truncation drift " << trunc.report.max_drift
          << " above tol at ceiling M=" << trunc.report.M_used;
      results[i].failure = oss.str();
      return;
    }
    for (const auto& pair : trunc.pairs) {
      if (!window.contains(pair.value)) continue;
      if (!pair.certified) {
        std::ostringstream oss;
        oss << "mode k=(" << mode.k[0] << "," << mode.k[1]
            << "): eigenpair residual " << pair.residual << " above certificate";
        results[i].failure = oss.str();
        return;
      }
      if (pair.value.real() < -kAccretivityTol * std::max(1.0, std::abs(pair.value))) {
        std::ostringstream oss;
        oss << "mode k=(" << mode.k[0] << "," << mode.k[1]
            << "): eigenvalue " << pair.value << " violates accretivity";
        results[i].failure = oss.str();
        return;
      }
      results[i].items.push_back({pair.value, mode, pair.residual, trunc.report});
    }
  });

  std::vector<std::string> failures;
  for (const auto& r : results)
    if (!r.failure.empty()) failures.push_back(r.failure);
  if (!failures.empty()) {
    std::string msg = "spectrum_window: " + std::to_string(failures.size()) +
                      " mode(s) failed certification:";
    for (const auto& f : failures) msg += "\n  " + f;
    throw TruncationCeilingError(msg);
  }
  for (auto& r : results)
    out.items.insert(out.items.end(), r.items.begin(), r.items.end());
  std::sort(out.items.begin(), out.items.end(), [](const EigenItem& a, const EigenItem& b) {
    if (a.mode.k[0] != b.mode.k[0]) return a.mode.k[0] < b.mode.k[0];
    if (a.mode.k[1] != b.mode.k[1]) return a.mode.k[1] < b.mode.k[1];
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });

  // Tail certificate: no Grushin zero in the window for any shell in
  // (cutoff, 4*cutoff]. The Schur-complement capture argument needs the
  // restricted block accretive throughout the window.
  if (window.re_max > 0.45 * gamma * gamma) {
    out.tail_certified = false;
    out.tail_note = "window re_max exceeds 0.45*gamma^2; restricted-block accretivity "
                    "not guaranteed, tail not certified";
    return out;
  }
  const auto shells = kappa_sq_shells(spec, 4.0 * out.horizontal_cutoff);
  std::vector<std::string> tail_failures(shells.size());
  parallel_for(static_cast<int>(shells.size()), [&](int i) {
    const double ks = shells[i].first;
    if (ks <= out.horizontal_cutoff) return;
    try {
      const int zeros = grushin_zero_count(gamma, shell_mode(ks), opts.tail_M, 0.0,
                                           window, spec);
      if (zeros != 0) {
        std::ostringstream oss;
        oss << "shell |kappa|^2=" << ks << ": " << zeros << " Grushin zero(s) in window";
        tail_failures[i] = oss.str();
      }
    } catch (const std::exception& e) {
      tail_failures[i] = std::string("shell |kappa|^2=") + std::to_string(ks) + ": " + e.what();
    }
  });
  out.tail_certified = true;
  for (const auto& f : tail_failures) {
    if (!f.empty()) {
      out.tail_certified = false;
      out.tail_note = out.tail_note.empty() ? f : out.tail_note + "; " + f;
    }
  }
  return out;
}

namespace {

// Minimum-cost assignment (shortest augmenting path with potentials) for an
// n x m cost matrix, n <= m. Returns row -> column.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

MatchReport match_spectra(const EigenSet& found, const TorusSpec& spec, double margin) {
  if (!(margin > 0.0)) throw InvalidArgument("match_spectra: margin must be positive");
  MatchReport report;

  std::vector<Complex> lamP;
  for (const auto& item : found.items)
    if (found.window.boundary_distance(item.lambda) > margin)
      lamP.push_back(item.lambda);

  std::vector<double> base;
  for (const auto& [value, mult] : base_spectrum(spec, found.window)) {
    const double bd = found.window.boundary_distance(Complex(value, 0.0));
    if (bd > margin)
      for (int c = 0; c < mult; ++c) base.push_back(value);
  }

  const int nP = static_cast<int>(lamP.size());
  const int nB = static_cast<int>(base.size());
  if (nP == 0 || nB == 0) {
    report.unmatched_P = lamP;
    report.unmatched_base = base;
    report.hausdorff = (nP == 0 && nB == 0) ? 0.0 : kInf;
    return report;
  }

  const bool p_rows = nP <= nB;
  const int rows = p_rows ? nP : nB;
  const int cols = p_rows ? nB : nP;
  Eigen::MatrixXd cost(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Complex zp = p_rows ? lamP[r] : lamP[c];
      const double zb = p_rows ? base[c] : base[r];
      cost(r, c) = std::abs(zp - zb);
    }
  const auto assignment = min_cost_assignment(cost);

  std::vector<char> col_used(cols, 0);
  for (int r = 0; r < rows; ++r) {
    const int c = assignment[r];
    col_used[c] = 1;
    const Complex zp = p_rows ? lamP[r] : lamP[c];
    const double zb = p_rows ? base[assignment[r]] : base[r];
    report.pairs.push_back({zp, zb, cost(r, c)});
  }
  for (int c = 0; c < cols; ++c) {
    if (col_used[c]) continue;
    if (p_rows)
      report.unmatched_base.push_back(base[c]);
    else
      report.unmatched_P.push_back(lamP[c]);
  }
  std::sort(report.pairs.begin(), report.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) {
              if (a.lambda_base != b.lambda_base) return a.lambda_base < b.lambda_base;
              if (a.lambda_P.real() != b.lambda_P.real())
                return a.lambda_P.real() < b.lambda_P.real();
              return a.lambda_P.imag() < b.lambda_P.imag();
            });

  report.hausdorff = 0.0;
  for (const auto& pr : report.pairs) report.hausdorff = std::max(report.hausdorff, pr.distance);
  if (!report.unmatched_P.empty() || !report.unmatched_base.empty())
    report.hausdorff = kInf;
  return report;
}

namespace {

// Weighted H^{s_in} -> H^{s_out} norm of the inverse of `block` on a mode:
// 1 / smin(W_in block W_out^{-1}). Returns +inf when effectively singular.
double weighted_inverse_norm(const Matrix& block, double s_in, double s_out,
                             const HMode& mode) {
  const int n = static_cast<int>(block.rows());
  Eigen::VectorXd w_in = sobolev_weights_for_block(s_in, mode, n);
  Eigen::VectorXd w_out = sobolev_weights_for_block(s_out, mode, n);
  Matrix scaled = w_in.asDiagonal() * block * w_out.cwiseInverse().asDiagonal();
  const double sv = smin(scaled);
  if (!(sv > 0.0)) return kInf;
  return 1.0 / sv;
}

Matrix shifted_block(double gamma, const HMode& mode, int M, double A,
                     Complex lambda, const TorusSpec& spec) {
  Matrix P = assemble_P(gamma, mode, M, spec).entries;
  P(M, M) += q_entry(A, mode);
  for (int i = 0; i < 2 * M + 1; ++i) P(i, i) -= lambda;
  return P;
}

// Per-shell profile check for the resolvent difference: the profile must
// attain its max away from the boundary region and be non-increasing (2%
// slack) from the argmax on.
void check_monotone_tail(const std::vector<double>& profile,
                         const std::vector<double>& shells, const char* who) {
  std::ostringstream oss;
  if (profile.size() < 8) {
    oss << who << ": only " << profile.size()
        << " shells swept, too few to certify the tail; increase K_max";
    throw TailControlError(oss.str());
  }
  const size_t n = profile.size();
  size_t argmax = 0;
  for (size_t i = 1; i < n; ++i)
    if (profile[i] > profile[argmax]) argmax = i;
  const size_t decile_start = n - std::max<size_t>(1, n / 10);
  if (argmax >= decile_start) {
    oss << who << ": per-shell profile peaks at |kappa|^2=" << shells[argmax]
        << ", inside the boundary decile; increase K_max";
    throw TailControlError(oss.str());
  }
  for (size_t i = argmax + 1; i < n; ++i) {
    if (profile[i] > 1.02 * profile[i - 1]) {
      oss << who << ": per-shell profile rises again at |kappa|^2=" << shells[i]
          << "; increase K_max";
      throw TailControlError(oss.str());
    }
  }
  if (profile[n - 1] > 0.9 * profile[argmax]) {
    oss << who << ": boundary shell at |kappa|^2=" << shells[n - 1]
        << " still at " << profile[n - 1] / profile[argmax]
        << " of the sup; increase K_max";
    throw TailControlError(oss.str());
  }
}

// Tail control for the inverse-bound studies. The profile has structure up
// to |kappa|^2 ~ max(A^2, |lambda|) (the absorbing potential switches off at
// A^2); beyond twice that scale it must decay towards the boundary.
void check_bound_tail(const std::vector<double>& profile,
                      const std::vector<double>& shells, double tail_start,
                      const char* who) {
  std::ostringstream oss;
  if (shells.empty() || shells.back() < 2.0 * tail_start) {
    oss << who << ": K_max " << (shells.empty() ? 0.0 : shells.back())
        << " below twice the structure scale " << tail_start << "; increase K_max";
    throw TailControlError(oss.str());
  }
  const size_t n = profile.size();
  double sup = 0.0;
  for (double v : profile) sup = std::max(sup, v);
  size_t first_tail = n;
  for (size_t i = 0; i < n; ++i) {
    if (shells[i] >= tail_start) {
      first_tail = i;
      break;
    }
  }
  for (size_t i = first_tail + 1; i < n; ++i) {
    if (profile[i] > 1.02 * profile[i - 1]) {
      oss << who << ": tail profile rises at |kappa|^2=" << shells[i]
          << "; increase K_max";
      throw TailControlError(oss.str());
    }
  }
  if (profile[n - 1] > 0.9 * sup) {
    oss << who << ": boundary shell still at " << profile[n - 1] / sup
        << " of the sup; increase K_max";
    throw TailControlError(oss.str());
  }
}

BoundStudyTable bound_study_impl(const std::vector<double>& gamma_grid,
                                 const std::vector<double>& A_grid,
                                 const std::vector<Complex>& lambda_grid,
                                 double s, const TorusSpec& spec, double K_max,
                                 int M, bool quarter_gain) {
  spec.validate();
  for (double gamma : gamma_grid)
    for (double A : A_grid)
      if (!(gamma > A))
        throw InvalidArgument("bound study: requires gamma > A for every grid pair");

  const auto shells = kappa_sq_shells(spec, K_max);
  BoundStudyTable table;
  for (double gamma : gamma_grid) {
    for (double A : A_grid) {
      for (Complex lambda : lambda_grid) {
        std::vector<double> profile(shells.size());
        parallel_for(static_cast<int>(shells.size()), [&](int i) {
          const HMode mode = shell_mode(shells[i].first);
          const Matrix block = shifted_block(gamma, mode, M, A, lambda, spec);
          const double s_out = quarter_gain ? s + 0.25 : s;
          profile[i] = weighted_inverse_norm(block, s, s_out, mode);
        });
        double sup = 0.0;
        bool finite = true;
        for (double v : profile) {
          if (std::isinf(v)) finite = false;
          sup = std::max(sup, v);
        }
        if (finite) {
          std::vector<double> shell_vals(shells.size());
          for (size_t i = 0; i < shells.size(); ++i) shell_vals[i] = shells[i].first;
          const double tail_start = 2.0 * std::max(A * A, std::abs(lambda));
          check_bound_tail(profile, shell_vals, tail_start, "bound study");
        } else {
          table.all_finite = false;
        }
        const double norm_factor = quarter_gain ? std::sqrt(A) : A;
        table.rows.push_back({gamma, A, lambda, s, norm_factor * sup});
      }
    }
  }
  double lo = kInf, hi = 0.0;
  for (const auto& row : table.rows) {
    lo = std::min(lo, row.value);
    hi = std::max(hi, row.value);
  }
  table.max_over_min = (lo > 0.0 && std::isfinite(hi)) ? hi / lo : kInf;
  return table;
}

}  // namespace

BoundStudyTable inverse_bound_study(const std::vector<double>& gamma_grid,
                                    const std::vector<double>& A_grid,
                                    const std::vector<Complex>& lambda_grid,
                                    double s, const TorusSpec& spec,
                                    double K_max, int M) {
  return bound_study_impl(gamma_grid, A_grid, lambda_grid, s, spec, K_max, M, false);
}

BoundStudyTable regularity_bound_study(const std::vector<double>& gamma_grid,
                                       const std::vector<double>& A_grid,
                                       const std::vector<Complex>& lambda_grid,
                                       double s, const TorusSpec& spec,
                                       double K_max, int M) {
  return bound_study_impl(gamma_grid, A_grid, lambda_grid, s, spec, K_max, M, true);
}

std::vector<RestrictedInverseRow> restricted_inverse_study(
    const std::vector<double>& h_grid, const std::vector<Complex>& lambda_grid,
    const std::vector<HMode>& modes, double s, int M, const TorusSpec& spec) {
  spec.validate();
  std::vector<RestrictedInverseRow> rows;
  for (double h : h_grid) {
    if (!(h > 0.0)) throw InvalidArgument("restricted_inverse_study: h must be positive");
    for (Complex lambda : lambda_grid) {
      std::vector<double> vals(modes.size());
      parallel_for(static_cast<int>(modes.size()), [&](int i) {
        const Matrix block =
            assemble_scaled_restricted(h, lambda, modes[i], M, spec).entries;
        vals[i] = weighted_inverse_norm(block, s, s, modes[i]);
      });
      double sup = 0.0;
      for (double v : vals) sup = std::max(sup, v);
      rows.push_back({h, lambda, sup});
    }
  }
  return rows;
}

double resolvent_diff_norm(double gamma, Complex lambda, double s,
                           const TorusSpec& spec, double K_max, int M,
                           TailDiagnostics* diagnostics) {
  spec.validate();
  if (!(gamma > 0.0)) throw InvalidArgument("resolvent_diff_norm: gamma must be positive");

  // lambda must stay away from the base spectrum on the swept range.
  for (const auto& [value, mult] : kappa_sq_shells(spec, K_max + 1.0)) {
    (void)mult;
    if (std::abs(lambda - Complex(value, 0.0)) < 0.1)
      throw InvalidArgument("resolvent_diff_norm: lambda within 0.1 of the base spectrum");
  }

  const auto shells = kappa_sq_shells(spec, K_max);
  const int n = 2 * M + 1;
  std::vector<double> profile(shells.size());
  parallel_for(static_cast<int>(shells.size()), [&](int i) {
    const HMode mode = shell_mode(shells[i].first);
    Matrix P = assemble_P(gamma, mode, M, spec).entries;
    for (int d = 0; d < n; ++d) P(d, d) -= lambda;
    if (smin(P) < 1e-6)
      throw SingularBlockError(
          "resolvent_diff_norm: an eigenvalue of a swept block is within 1e-6 of lambda");
    Matrix D = P.inverse();
    D(M, M) -= 1.0 / (mode.kappa_sq() - lambda);
    profile[i] = weighted_opnorm(D, s, s + 0.25, mode);
  });

  double sup = 0.0;
  for (double v : profile) sup = std::max(sup, v);

  const size_t decile_start = shells.size() - std::max<size_t>(1, shells.size() / 10);
  double decile_max = 0.0;
  for (size_t i = decile_start; i < shells.size(); ++i)
    decile_max = std::max(decile_max, profile[i]);

  std::vector<double> shell_vals(shells.size());
  for (size_t i = 0; i < shells.size(); ++i) shell_vals[i] = shells[i].first;
  bool monotone_ok = true;
  std::string tail_error;
  try {
    check_monotone_tail(profile, shell_vals, "resolvent_diff_norm");
  } catch (const TailControlError& e) {
    monotone_ok = false;
    tail_error = e.what();
  }

  if (diagnostics) {
    diagnostics->sup = sup;
    diagnostics->boundary_decile_max = decile_max;
    diagnostics->decile_ratio = sup > 0.0 ? decile_max / sup : 0.0;
    diagnostics->decile_rule_passed = decile_max < 0.1 * sup;
    diagnostics->monotone_rule_passed = monotone_ok;
  } else if (!monotone_ok) {
    throw TailControlError(tail_error);
  }
  return sup;
}

double qa_resolvent_diff(double gamma, double A, Complex lambda, double s,
                         double N, const TorusSpec& spec, double K_max, int M) {
  spec.validate();
  if (!(gamma > A)) throw InvalidArgument("qa_resolvent_diff: requires gamma > A");
  const auto shells = kappa_sq_shells(spec, std::min(K_max, A * A));
  const int n = 2 * M + 1;
  std::vector<double> vals(shells.size(), 0.0);
  parallel_for(static_cast<int>(shells.size()), [&](int i) {
    const HMode mode = shell_mode(shells[i].first);
    const double q = q_entry(A, mode);
    if (q == 0.0) return;
    Matrix block = shifted_block(gamma, mode, M, A, lambda, spec);
    Eigen::PartialPivLU<Matrix> lu(block);
    if (smin_estimate(lu, n) < kSminGuard)
      throw SingularBlockError("qa_resolvent_diff: singular block (lemma hypothesis violated)");
    Vector col = lu.solve(Vector::Unit(n, M));
    Matrix D = Matrix::Zero(n, n);
    D.col(M) = q * col;
    D(M, M) -= q / (mode.kappa_sq() - lambda + q);
    vals[i] = weighted_opnorm(D, s, s + N, mode);
  });
  double sup = 0.0;
  for (double v : vals) sup = std::max(sup, v);
  return sup;
}

double subelliptic_constant(double gamma, double s, double gain, double B,
                            double A, SubellipticVariant variant, double y,
                            const TorusSpec& spec, double K_max, int M) {
  spec.validate();
  if (!(B > 0.0)) throw InvalidArgument("subelliptic_constant: B must be positive");
  if (variant == SubellipticVariant::WithQ && !(gamma > A + B * B))
    throw InvalidArgument("subelliptic_constant: withQ variant requires gamma > A + B^2");

  const auto shells = kappa_sq_shells(spec, K_max);
  const int n = 2 * M + 1;
  std::vector<double> vals(shells.size());
  parallel_for(static_cast<int>(shells.size()), [&](int i) {
    const HMode mode = shell_mode(shells[i].first);
    Matrix L = assemble_P(gamma, mode, M, spec).entries;
    switch (variant) {
      case SubellipticVariant::Plain:
        break;
      case SubellipticVariant::WithQ:
        L(M, M) += q_entry(A, mode);
        break;
      case SubellipticVariant::ShiftedIy:
        for (int d = 0; d < n; ++d) L(d, d) -= Complex(0.0, y);
        break;
    }
    Eigen::VectorXd w = sobolev_weights_for_block(s, mode, n);
    Eigen::VectorXd wg = sobolev_weights_for_block(s + gain, mode, n);
    Matrix lhs = wg.array().square().matrix().asDiagonal();
    Matrix W2 = w.array().square().matrix().asDiagonal();
    Matrix rhs = (1.0 / (B * B)) * (L.adjoint() * W2 * L) + (B * B) * W2;
    Eigen::LLT<Matrix> llt(rhs);
    if (llt.info() != Eigen::Success)
      throw CertificationError("subelliptic_constant: quadratic-form pencil not positive definite");
    Matrix half = llt.matrixL().solve(lhs);
    Matrix T = llt.matrixL().solve(half.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es((T + T.adjoint()) / 2.0,
                                             Eigen::EigenvaluesOnly);
    vals[i] = es.eigenvalues().maxCoeff();
  });
  double best = 0.0;
  for (double v : vals) best = std::max(best, v);
  return std::sqrt(best);
}

}  // namespace kbm
