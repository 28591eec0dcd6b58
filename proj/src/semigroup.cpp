// SPDX-License-Identifier: Apache-2.0

#include "kbm/semigroup.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>

namespace kbm {

double StateVector::norm_l2() const {
  double acc = 0.0;
  for (const auto& [k, c] : modes) acc += c.squaredNorm();
  return std::sqrt(acc);
}

double StateVector::norm_hs(const TorusSpec& spec) const {
  double acc = 0.0;
  for (const auto& [k, c] : modes) {
    const HMode mode(k, spec);
    for (int m = -M; m <= M; ++m) {
      const double w = sobolev_weight(s, mode, m);
      acc += w * w * std::norm(c(m + M));
    }
  }
  return std::sqrt(acc);
}

Complex& StateVector::coeff(std::array<int, 2> k, int m) {
  auto it = modes.find(k);
  if (it == modes.end()) it = modes.emplace(k, Vector::Zero(2 * M + 1)).first;
  return it->second(m + M);
}

Complex StateVector::coeff(std::array<int, 2> k, int m) const {
  auto it = modes.find(k);
  if (it == modes.end()) return 0.0;
  return it->second(m + M);
}

StateVector default_state(double kappa_sq_max, int M, std::uint64_t seed,
                          const TorusSpec& spec) {
  StateVector u;
  u.M = M;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& mode : modes_up_to(spec, kappa_sq_max)) {
    Vector c(2 * M + 1);
    for (int m = -M; m <= M; ++m) {
      const double decay = std::exp(-(mode.kappa_sq() + m * m) / 4.0);
      c(m + M) = decay * Complex(gauss(rng), gauss(rng));
    }
    u.modes.emplace(mode.k, std::move(c));
  }
  return u;
}

namespace {

struct ModeDecomposition {
  Matrix P;
  Matrix V;
  Matrix Vinv;
  Vector values;
  bool diagonalizable = false;  // eigenvector basis acceptably conditioned
};

ModeDecomposition decompose_mode(double gamma, const HMode& mode, int M_op,
                                 const TorusSpec& spec, double cond_limit) {
  ModeDecomposition d;
  d.P = assemble_P(gamma, mode, M_op, spec).entries;
  Eigen::ComplexEigenSolver<Matrix> solver(d.P, true);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("semigroup: eigendecomposition failed");
  d.V = solver.eigenvectors();
  d.values = solver.eigenvalues();
  const double cond = opnorm2(d.V) / std::max(smin(d.V), 1e-300);
  d.diagonalizable = cond <= cond_limit;
  if (d.diagonalizable) d.Vinv = d.V.inverse();
  return d;
}

Vector evolve_block(const ModeDecomposition& d, const Vector& c, double t) {
  if (d.diagonalizable) {
    Vector chat = d.Vinv * c;
    for (int j = 0; j < chat.size(); ++j)
      chat(j) *= std::exp(-t * d.values(j));
    return d.V * chat;
  }
  Matrix E = (-t * d.P).exp();
  return E * c;
}

Vector embed(const Vector& c, int M_from, int M_to) {
  Vector out = Vector::Zero(2 * M_to + 1);
  for (int m = -M_from; m <= M_from; ++m) out(m + M_to) = c(m + M_from);
  return out;
}

}  // namespace

StateVector propagate(double gamma, const StateVector& u, double t,
                      const TorusSpec& spec, const PropagateOptions& opts) {
  if (t < 0.0) throw InvalidArgument("propagate: t must be >= 0");
  if (!(gamma > 0.0)) throw InvalidArgument("propagate: gamma must be positive");
  spec.validate();

  StateVector out;
  out.s = u.s;
  out.M = u.M + opts.buffer;
  for (const auto& [k, c] : u.modes) {
    const HMode mode(k, spec);
    const auto d = decompose_mode(gamma, mode, out.M, spec, opts.cond_limit);
    Vector c_op = embed(c, u.M, out.M);
    Vector r = evolve_block(d, c_op, t);
    // the k = 0 block is diagonal (normal), so the semigroup contracts it
    if (k[0] == 0 && k[1] == 0 && r.norm() > c_op.norm() * (1.0 + 1e-6))
      throw CertificationError("propagate: contraction violated on the normal k=0 block");
    out.modes.emplace(k, std::move(r));
  }
  return out;
}

double spectral_gap(double gamma, const TorusSpec& spec,
                    std::optional<SpectralWindow> search_window, double tol) {
  spec.validate();
  SpectralWindow window = [&] {
    if (search_window) return *search_window;
    // smallest nonzero base eigenvalue is one lattice step along the longer side
    const double f1 = 2.0 * M_PI / spec.lengths[0];
    const double f2 = 2.0 * M_PI / spec.lengths[1];
    const double lambda1 = std::min(f1 * f1, f2 * f2);
    return SpectralWindow(-0.5, lambda1 + 0.5, -10.0, 10.0);
  }();

  const EigenSet sweep = spectrum_window(gamma, window, spec, tol);
  int zero_count = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& item : sweep.items) {
    if (std::abs(item.lambda) < 1e-8) {
      ++zero_count;
    } else {
      gap = std::min(gap, item.lambda.real());
    }
  }
  if (zero_count != 1)
    throw CertificationError("spectral_gap: zero eigenvalue count is " +
                             std::to_string(zero_count) + ", expected exactly 1");
  if (!std::isfinite(gap))
    throw CertificationError("spectral_gap: no nonzero eigenvalue in the search window");
  return gap;
}

namespace {

struct Cluster {
  Complex center;
  std::vector<int> indices;  // eigenvalue indices within one mode block
};

// Group eigenvalue indices (within one mode) whose values lie within the
// relative cluster radius of each other.
std::vector<Cluster> cluster_indices(const Vector& values, const std::vector<int>& keep) {
  std::vector<int> order = keep;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });
  std::vector<Cluster> clusters;
  for (int idx : order) {
    const Complex v = values(idx);
    if (!clusters.empty()) {
      const Complex c = clusters.back().center;
      if (std::abs(v - c) <= kClusterRadiusRel * std::max(1.0, std::abs(c))) {
        clusters.back().indices.push_back(idx);
        continue;
      }
    }
    clusters.push_back({v, {idx}});
  }
  for (auto& cl : clusters) {
    Complex mean = 0.0;
    for (int idx : cl.indices) mean += values(idx);
    cl.center = mean / static_cast<double>(cl.indices.size());
  }
  return clusters;
}

// Spectral projector applied to c for the given eigenvalue indices, via the
// eigenbasis when conditioned, otherwise a contour integral around the
// cluster, refined until idempotent on c.
Vector project_cluster(const ModeDecomposition& d, const Cluster& cl, const Vector& c) {
  if (d.diagonalizable) {
    Vector chat = d.Vinv * c;
    Vector masked = Vector::Zero(chat.size());
    for (int idx : cl.indices) masked(idx) = chat(idx);
    return d.V * masked;
  }
  // contour radius: isolate the cluster from the rest of the spectrum
  double spread = 0.0;
  for (int idx : cl.indices) spread = std::max(spread, std::abs(d.values(idx) - cl.center));
  double nearest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d.values.size(); ++j) {
    if (std::find(cl.indices.begin(), cl.indices.end(), j) != cl.indices.end()) continue;
    nearest = std::min(nearest, std::abs(d.values(j) - cl.center));
  }
  if (!(nearest > 4.0 * spread))
    throw ConvergenceError("equilibrium_decay: cluster not isolated for contour projector");
  const double radius = std::sqrt(std::max(spread, 1e-12) * nearest);
  const int n = static_cast<int>(c.size());
  for (int nodes = 64; nodes <= 512; nodes *= 2) {
    Vector acc = Vector::Zero(n);
    for (int j = 0; j < nodes; ++j) {
      const double phi = 2.0 * M_PI * j / nodes;
      const Complex z = cl.center + radius * Complex(std::cos(phi), std::sin(phi));
      Matrix shifted = z * Matrix::Identity(n, n) - d.P;
      acc += radius * Complex(std::cos(phi), std::sin(phi)) *
             shifted.partialPivLu().solve(c);
    }
    Vector proj = acc / static_cast<double>(nodes);
    // idempotency check: project again and compare
    Vector acc2 = Vector::Zero(n);
    for (int j = 0; j < nodes; ++j) {
      const double phi = 2.0 * M_PI * j / nodes;
      const Complex z = cl.center + radius * Complex(std::cos(phi), std::sin(phi));
      Matrix shifted = z * Matrix::Identity(n, n) - d.P;
      acc2 += radius * Complex(std::cos(phi), std::sin(phi)) *
              shifted.partialPivLu().solve(proj);
    }
    Vector proj2 = acc2 / static_cast<double>(nodes);
    if ((proj2 - proj).norm() <= 1e-8 * std::max(1.0, proj.norm())) return proj;
  }
  throw ConvergenceError("equilibrium_decay: contour projector failed to converge");
}

}  // namespace

ExpansionReport equilibrium_decay(double gamma, const StateVector& u,
                                  const std::vector<double>& t_grid, double beta,
                                  const TorusSpec& spec) {
  spec.validate();
  if (t_grid.empty()) throw InvalidArgument("equilibrium_decay: empty t grid");
  for (double t : t_grid)
    if (t < 1.0) throw InvalidArgument("equilibrium_decay: t grid must lie in [1, inf)");

  const PropagateOptions opts;
  const int M_op = u.M + opts.buffer;

  struct ModeData {
    ModeDecomposition d;
    Vector c;
    std::vector<Cluster> retained;
    std::vector<std::vector<Vector>> nilpotent_terms;  // per cluster: N^l Pi c
  };
  std::vector<ModeData> data;
  std::vector<Complex> retained_values;

  for (const auto& [k, c] : u.modes) {
    const HMode mode(k, spec);
    ModeData md{decompose_mode(gamma, mode, M_op, spec, opts.cond_limit),
                embed(c, u.M, M_op),
                {},
                {}};
    for (int j = 0; j < md.d.values.size(); ++j) {
      const double re = md.d.values(j).real();
      if (std::abs(beta - re) < 1e-3)
        throw InvalidArgument("equilibrium_decay: beta collides with an eigenvalue real part");
    }
    std::vector<int> keep;
    for (int j = 0; j < md.d.values.size(); ++j)
      if (md.d.values(j).real() <= beta) keep.push_back(j);
    md.retained = cluster_indices(md.d.values, keep);
    for (const auto& cl : md.retained) {
      std::vector<Vector> terms;
      Vector w = project_cluster(md.d, cl, md.c);
      terms.push_back(w);
      Matrix N = md.d.P - cl.center * Matrix::Identity(md.d.P.rows(), md.d.P.cols());
      for (size_t l = 1; l < cl.indices.size(); ++l) {
        w = N * w;
        terms.push_back(w);
      }
      md.nilpotent_terms.push_back(terms);
      for (int idx : cl.indices) retained_values.push_back(md.d.values(idx));
    }
    data.push_back(std::move(md));
  }

  ExpansionReport report;
  report.beta = beta;

  // group retained eigenvalues across modes for reporting
  std::sort(retained_values.begin(), retained_values.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const Complex v : retained_values) {
    if (!report.retained.empty()) {
      auto& g = report.retained.back();
      if (std::abs(v - g.lambda) <= kClusterRadiusRel * std::max(1.0, std::abs(g.lambda))) {
        g.lambda = (g.lambda * static_cast<double>(g.multiplicity) + v) /
                   static_cast<double>(g.multiplicity + 1);
        ++g.multiplicity;
        continue;
      }
    }
    report.retained.push_back({v, 1});
  }

  for (double t : t_grid) {
    double acc = 0.0;
    for (const auto& md : data) {
      Vector full = evolve_block(md.d, md.c, t);
      for (size_t ci = 0; ci < md.retained.size(); ++ci) {
        const Complex lam = md.retained[ci].center;
        double factor = 1.0;
        for (size_t l = 0; l < md.nilpotent_terms[ci].size(); ++l) {
          if (l > 0) factor *= -t / static_cast<double>(l);
          full -= factor * std::exp(-lam * t) * md.nilpotent_terms[ci][l];
        }
      }
      acc += full.squaredNorm();
    }
    report.remainder_norms.emplace_back(t, std::sqrt(acc));
  }

  // least-squares slope of log remainder vs t on resolvable points
  const double floor = 1e-14 * std::max(u.norm_l2(), 1e-300);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int npt = 0;
  for (const auto& [t, r] : report.remainder_norms) {
    if (r <= floor) continue;
    const double y = std::log(r);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++npt;
  }
  if (npt >= 2) {
    const double slope = (npt * sxy - sx * sy) / (npt * sxx - sx * sx);
    report.fitted_rate = -slope;
  } else {
    report.fitted_rate = std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace kbm
