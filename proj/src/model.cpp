// SPDX-License-Identifier: Apache-2.0

#include "kbm/model.hpp"

#include <algorithm>
#include <map>

namespace kbm {

double sobolev_weight(double s, const HMode& mode, int m) {
  return std::pow(1.0 + mode.kappa_sq() + static_cast<double>(m) * m, s / 2.0);
}

namespace {

// Lattice eigenvalues |kappa|^2 <= cutoff, grouped with multiplicity.
// Grouping tolerance is relative: distinct lattice norms for rational
// length ratios are well separated, irrational ratios give simple values.
std::map<double, int> lattice_norms_up_to(const TorusSpec& spec, double cutoff) {
  spec.validate();
  std::map<double, int> counts;
  if (cutoff < 0.0) return counts;
  const double f1 = 2.0 * M_PI / spec.lengths[0];
  const double f2 = 2.0 * M_PI / spec.lengths[1];
  const int b1 = static_cast<int>(std::ceil(std::sqrt(cutoff) / f1)) + 1;
  const int b2 = static_cast<int>(std::ceil(std::sqrt(cutoff) / f2)) + 1;
  const double tol = 1e-9 * std::max(1.0, cutoff);
  for (int k1 = -b1; k1 <= b1; ++k1) {
    for (int k2 = -b2; k2 <= b2; ++k2) {
      const double v = f1 * f1 * k1 * k1 + f2 * f2 * k2 * k2;
      if (v > cutoff + tol) continue;
      auto it = counts.lower_bound(v - tol);
      if (it != counts.end() && std::abs(it->first - v) <= tol) {
        ++it->second;
      } else {
        counts.emplace(v, 1);
      }
    }
  }
  return counts;
}

}  // namespace

std::vector<std::pair<double, int>> base_spectrum(const TorusSpec& spec,
                                                  const SpectralWindow& window) {
  std::vector<std::pair<double, int>> out;
  if (window.im_min > 0.0 || window.im_max < 0.0) return out;
  auto counts = lattice_norms_up_to(spec, window.re_max);
  for (const auto& [value, mult] : counts) {
    if (value >= window.re_min && value <= window.re_max)
      out.emplace_back(value, mult);
  }
  return out;
}

std::vector<HMode> modes_up_to(const TorusSpec& spec, double kappa_sq_cutoff) {
  spec.validate();
  std::vector<HMode> modes;
  const double f1 = 2.0 * M_PI / spec.lengths[0];
  const double f2 = 2.0 * M_PI / spec.lengths[1];
  const int b1 = static_cast<int>(std::ceil(std::sqrt(std::max(0.0, kappa_sq_cutoff)) / f1)) + 1;
  const int b2 = static_cast<int>(std::ceil(std::sqrt(std::max(0.0, kappa_sq_cutoff)) / f2)) + 1;
  for (int k1 = -b1; k1 <= b1; ++k1) {
    for (int k2 = -b2; k2 <= b2; ++k2) {
      HMode mode({k1, k2}, spec);
      if (mode.kappa_sq() <= kappa_sq_cutoff) modes.push_back(mode);
    }
  }
  std::sort(modes.begin(), modes.end(), [](const HMode& a, const HMode& b) {
    if (a.kappa_sq() != b.kappa_sq()) return a.kappa_sq() < b.kappa_sq();
    if (a.k[0] != b.k[0]) return a.k[0] < b.k[0];
    return a.k[1] < b.k[1];
  });
  return modes;
}

std::vector<std::pair<double, int>> kappa_sq_shells(const TorusSpec& spec,
                                                    double kappa_sq_cutoff) {
  auto counts = lattice_norms_up_to(spec, kappa_sq_cutoff);
  return {counts.begin(), counts.end()};
}

}  // namespace kbm
