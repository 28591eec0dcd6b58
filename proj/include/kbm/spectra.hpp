// SPDX-License-Identifier: Apache-2.0
//
// Global spectral studies: window sweeps over horizontal modes with a
// certified tail, multiplicity-aware matching against the base spectrum,
// the Grushin effective scalar and its zeros, invertibility/regularity
// bound tables, resolvent-convergence measurements, and empirical
// subelliptic constants.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kbm/linalg.hpp"

namespace kbm {

inline constexpr double kSminGuard = 1e-12;
inline constexpr double kClusterRadiusRel = 1e-6;
inline constexpr double kAccretivityTol = 1e-8;
inline constexpr double kWindingIntegerTol = 0.1;
inline constexpr double kDefaultMatchMargin = 1e-3;

struct EigenItem {
  Complex lambda;
  HMode mode;
  double residual;
  TruncationReport truncation;
};

// Certified window sweep output. `horizontal_cutoff` is the largest
// |kappa|^2 enumerated directly; modes in (cutoff, 4*cutoff] are covered by
// the Grushin-scalar tail certificate.
struct EigenSet {
  double gamma = 0.0;
  SpectralWindow window{0, 1, -1, 1};
  std::vector<EigenItem> items;
  double horizontal_cutoff = 0.0;
  bool tail_certified = false;
  std::string tail_note;  // empty when certified
};

struct MatchedPair {
  Complex lambda_P;
  double lambda_base;
  double distance;
};

struct MatchReport {
  std::vector<MatchedPair> pairs;
  std::vector<Complex> unmatched_P;
  std::vector<double> unmatched_base;
  double hausdorff = 0.0;  // max pair distance; +inf if anything unmatched
};

// The effective scalar E_-+(lambda) on one mode: zeros are eigenvalues of
// P_gamma + Q_A restricted to the mode (of P_gamma itself when the mode's
// Q entry vanishes, in particular for A = 0).
class GrushinScalar {
 public:
  GrushinScalar(double gamma, const HMode& mode, int M, double A,
                const TorusSpec& spec = TorusSpec{});

  Complex operator()(Complex lambda) const;

  double gamma_value() const { return gamma_; }
  double q_value() const { return q_; }
  int truncation() const { return M_; }

 private:
  double gamma_, h_, q_;
  HMode mode_;
  int M_;
  Matrix base_;   // c_n Delta_V - h X on the restricted block
  Vector x_col_;  // X column m=0 restricted to m != 0 rows
  Eigen::RowVectorXcd x_row_;  // X row m=0 restricted to m != 0 columns
};

Complex grushin_scalar(double gamma, Complex lambda, const HMode& mode, int M,
                       double A, const TorusSpec& spec = TorusSpec{});

// Winding number of E_-+ around the window boundary (adaptive trapezoid
// phase accumulation). Errors on a boundary zero or non-integral winding.
int grushin_zero_count(double gamma, const HMode& mode, int M, double A,
                       const SpectralWindow& window,
                       const TorusSpec& spec = TorusSpec{});

// Secant iteration on E_-+ from `seed`; |E| <= 1e-12 gamma^-2 max(1,|z|).
Complex grushin_zero(double gamma, const HMode& mode, int M, double A,
                     Complex seed, const TorusSpec& spec = TorusSpec{});

struct SweepOptions {
  int M0 = 8;
  int ceiling = kTruncationCeiling;
  int tail_M = 10;  // truncation for the Grushin tail certificate
};

// Sweep all modes with |kappa|^2 <= 4 (re_max + 1), certify the band up to
// 4x that cutoff via the Grushin scalar. Throws TruncationCeilingError if a
// mode fails to converge; a failed tail check comes back tail_certified =
// false with a note, never silently dropped.
EigenSet spectrum_window(double gamma, const SpectralWindow& window,
                         const TorusSpec& spec, double tol,
                         const SweepOptions& opts = SweepOptions{});

// Optimal assignment between the multiplicity-expanded base spectrum and
// the found eigenvalues, both restricted to the window interior (margin
// from the boundary). Cardinality mismatch lands in the unmatched lists.
MatchReport match_spectra(const EigenSet& found, const TorusSpec& spec,
                          double margin = kDefaultMatchMargin);

struct BoundStudyRow {
  double gamma = 0.0;
  double A = 0.0;
  Complex lambda;
  double s = 0.0;
  double value = 0.0;  // normalized sup; +inf marks a singular block
};

struct BoundStudyTable {
  std::vector<BoundStudyRow> rows;
  bool all_finite = true;
  double max_over_min = 0.0;
};

// A * sup_k ||(P_gamma - lambda + Q_A)^{-1}||_{H^s -> H^s}, sup over
// |kappa|^2 <= K_max with a monotone-tail control. Requires gamma > A.
BoundStudyTable inverse_bound_study(const std::vector<double>& gamma_grid,
                                    const std::vector<double>& A_grid,
                                    const std::vector<Complex>& lambda_grid,
                                    double s, const TorusSpec& spec,
                                    double K_max, int M = 16);

// Same, H^s -> H^{s+1/4} normalized by A^{1/2}.
BoundStudyTable regularity_bound_study(const std::vector<double>& gamma_grid,
                                       const std::vector<double>& A_grid,
                                       const std::vector<Complex>& lambda_grid,
                                       double s, const TorusSpec& spec,
                                       double K_max, int M = 16);

struct RestrictedInverseRow {
  double h = 0.0;
  Complex lambda;
  double value = 0.0;
};

// sup over the given modes of ||(Pi_perp (P~_h - h^2 lambda) Pi_perp)^{-1}||_{H^s}.
std::vector<RestrictedInverseRow> restricted_inverse_study(
    const std::vector<double>& h_grid, const std::vector<Complex>& lambda_grid,
    const std::vector<HMode>& modes, double s, int M = 16,
    const TorusSpec& spec = TorusSpec{});

struct TailDiagnostics {
  double sup = 0.0;
  double boundary_decile_max = 0.0;
  double decile_ratio = 0.0;  // boundary_decile_max / sup
  bool decile_rule_passed = false;  // the strict <0.1 form, reported only
  bool monotone_rule_passed = false;
};

// sup over |kappa|^2 <= K_max of || W_{s+1/4} ((P-lambda)^{-1} - R0) W_s^{-1} ||_2
// where R0 has only the (0,0) entry 1/(|kappa|^2 - lambda). The tail
// certificate requires the per-shell profile to peak in the interior and
// decay (within 2% slack) towards the boundary; violations throw
// TailControlError unless `diagnostics` captures them.
double resolvent_diff_norm(double gamma, Complex lambda, double s,
                           const TorusSpec& spec, double K_max, int M,
                           TailDiagnostics* diagnostics = nullptr);

// sup over contributing modes (|kappa|^2 <= A^2) of
// || W_{s+N} ((P-lambda+Q_A)^{-1} Q_A - R0A Q_A) W_s^{-1} ||_2.
double qa_resolvent_diff(double gamma, double A, Complex lambda, double s,
                         double N, const TorusSpec& spec, double K_max, int M = 16);

enum class SubellipticVariant { Plain, WithQ, ShiftedIy };

// Empirical quadratic-form constant: sqrt of the largest generalized
// eigenvalue of W^2_{s+gain} against B^-2 L^H W^2_s L + B^2 W^2_s, sup over
// modes. The paper-style sum-of-norms constant is within sqrt(2).
double subelliptic_constant(double gamma, double s, double gain, double B,
                            double A, SubellipticVariant variant, double y,
                            const TorusSpec& spec, double K_max, int M = 16);

}  // namespace kbm
