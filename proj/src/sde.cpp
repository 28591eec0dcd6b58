// SPDX-License-Identifier: Apache-2.0

#include "kbm/sde.hpp"

#include <algorithm>
#include <cmath>

#include "kbm/parallel.hpp"
#include "kbm/rng.hpp"

namespace kbm {

void SdeConfig::validate() const {
  spec.validate();
  if (!(gamma > 0.0)) throw InvalidArgument("SdeConfig: gamma must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("SdeConfig: dt must be positive");
  if (!(T > 0.0)) throw InvalidArgument("SdeConfig: T must be positive");
  if (n_paths < 1) throw InvalidArgument("SdeConfig: n_paths must be >= 1");
  if (!dt_overridden && dt > dt_cap() * (1.0 + 1e-12))
    throw InvalidArgument("SdeConfig: dt above min(0.1/gamma^2, 0.1/gamma); "
                          "set dt_overridden to accept");
}

std::array<double, 2> Trajectory::wrapped(std::size_t i) const {
  const auto& p = positions[i];
  auto wrap = [](double x, double L) {
    double w = std::fmod(x, L);
    if (w < 0.0) w += L;
    return w;
  };
  return {wrap(p[0], spec.lengths[0]), wrap(p[1], spec.lengths[1])};
}

namespace {

// Core integrator: theta_{j+1} = theta_j + gamma sqrt(dt) xi_j (exact
// Brownian increments for n = 2), x_{j+1} = x_j + gamma (cos, sin)(theta_j) dt.
// `record` is called as record(step_index, x, y, theta) including step 0.
template <typename Record>
void integrate(const SdeConfig& config, int path_index, Record&& record) {
  CounterRng rng(config.seed, static_cast<std::uint64_t>(path_index));
  const double ang_step = config.gamma * std::sqrt(2.0 * config.spec.c_n() * config.dt);
  const double speed = config.gamma * config.dt;
  double theta = 0.0, x = 0.0, y = 0.0;
  const std::int64_t n = config.n_steps();
  record(0, x, y, theta);
  for (std::int64_t j = 0; j < n; ++j) {
    x += speed * std::cos(theta);
    y += speed * std::sin(theta);
    theta += ang_step * rng.normal();
    record(j + 1, x, y, theta);
  }
}

}  // namespace

Trajectory simulate_path(const SdeConfig& config, int path_index, int stride) {
  config.validate();
  if (stride < 1) throw InvalidArgument("simulate_path: stride must be >= 1");
  Trajectory traj;
  traj.spec = config.spec;
  const std::int64_t n = config.n_steps();
  traj.times.reserve(n / stride + 2);
  traj.positions.reserve(n / stride + 2);
  traj.angles.reserve(n / stride + 2);
  integrate(config, path_index, [&](std::int64_t j, double x, double y, double theta) {
    if (j % stride != 0 && j != n) return;
    traj.times.push_back(j * config.dt);
    traj.positions.push_back({x, y});
    traj.angles.push_back(theta);
  });
  return traj;
}

EnsembleStats ensemble_stats(const SdeConfig& config, int n_out) {
  config.validate();
  if (config.n_paths < 100)
    throw InvalidArgument("ensemble_stats: need at least 100 paths");
  if (n_out < 2) throw InvalidArgument("ensemble_stats: n_out must be >= 2");

  const std::int64_t n = config.n_steps();
  const std::int64_t stride = std::max<std::int64_t>(1, n / (n_out - 1));
  std::vector<std::int64_t> record_steps;
  for (std::int64_t j = 0; j <= n; j += stride) record_steps.push_back(j);
  if (record_steps.back() != n) record_steps.push_back(n);
  const std::size_t nt = record_steps.size();

  struct Acc {
    std::vector<double> sum_sq, sum_sq2;   // |dx|^2 and its square
    std::vector<double> sum_vv, sum_vv2;   // v_t . v_0 and its square
    std::vector<double> sum_dth, sum_dth2; // theta_t - theta_0 and its square
    void init(std::size_t nt) {
      sum_sq.assign(nt, 0.0);
      sum_sq2.assign(nt, 0.0);
      sum_vv.assign(nt, 0.0);
      sum_vv2.assign(nt, 0.0);
      sum_dth.assign(nt, 0.0);
      sum_dth2.assign(nt, 0.0);
    }
  };

  // fixed path blocks merged in block order: deterministic sums
  const int block = 256;
  const int n_blocks = (config.n_paths + block - 1) / block;
  std::vector<Acc> partial(n_blocks);

  parallel_for(n_blocks, [&](int b) {
    Acc& acc = partial[b];
    acc.init(nt);
    const int lo = b * block;
    const int hi = std::min((b + 1) * block, config.n_paths);
    const double g = config.gamma;
    for (int p = lo; p < hi; ++p) {
      std::size_t slot = 0;
      double cos0 = 1.0, sin0 = 0.0;
      integrate(config, p, [&](std::int64_t j, double x, double y, double theta) {
        if (slot >= nt || record_steps[slot] != j) return;
        const double dsq = x * x + y * y;
        const double vv = g * g * (std::cos(theta) * cos0 + std::sin(theta) * sin0);
        acc.sum_sq[slot] += dsq;
        acc.sum_sq2[slot] += dsq * dsq;
        acc.sum_vv[slot] += vv;
        acc.sum_vv2[slot] += vv * vv;
        acc.sum_dth[slot] += theta;
        acc.sum_dth2[slot] += theta * theta;
        ++slot;
      });
    }
  });

  Acc total;
  total.init(nt);
  for (const auto& acc : partial) {
    for (std::size_t i = 0; i < nt; ++i) {
      total.sum_sq[i] += acc.sum_sq[i];
      total.sum_sq2[i] += acc.sum_sq2[i];
      total.sum_vv[i] += acc.sum_vv[i];
      total.sum_vv2[i] += acc.sum_vv2[i];
      total.sum_dth[i] += acc.sum_dth[i];
      total.sum_dth2[i] += acc.sum_dth2[i];
    }
  }

  EnsembleStats stats;
  const double N = config.n_paths;
  for (std::size_t i = 0; i < nt; ++i) {
    stats.t.push_back(record_steps[i] * config.dt);
    const double m_sq = total.sum_sq[i] / N;
    const double var_sq = std::max(0.0, total.sum_sq2[i] / N - m_sq * m_sq);
    stats.msd.push_back(m_sq);
    stats.msd_se.push_back(std::sqrt(var_sq / N));
    const double m_vv = total.sum_vv[i] / N;
    const double var_vv = std::max(0.0, total.sum_vv2[i] / N - m_vv * m_vv);
    stats.vacf.push_back(m_vv);
    stats.vacf_se.push_back(std::sqrt(var_vv / N));
    const double m_th = total.sum_dth[i] / N;
    stats.angular_var.push_back(std::max(0.0, total.sum_dth2[i] / N - m_th * m_th));
  }
  return stats;
}

Figure1Panels figure1_panels(const std::vector<double>& gammas, double T,
                             std::uint64_t seed, const TorusSpec& spec,
                             std::int64_t step_budget) {
  if (step_budget < 1) throw InvalidArgument("figure1_panels: step budget must be positive");
  Figure1Panels panels;
  for (double gamma : gammas) {
    SdeConfig config;
    config.gamma = gamma;
    config.spec = spec;
    config.seed = seed;
    config.n_paths = 1;
    config.dt = std::min(config.dt_cap(), T / 2000.0);  // plot resolution floor
    // if the capped dt cannot cover T within budget, relax dt up to the
    // angular decorrelation scale 2/gamma^2, then shorten the horizon
    if (T / config.dt > static_cast<double>(step_budget)) {
      const double dt_relaxed = std::min(T / static_cast<double>(step_budget),
                                         2.0 / (gamma * gamma));
      if (dt_relaxed > config.dt) {
        config.dt = dt_relaxed;
        config.dt_overridden = true;
      }
    }
    config.T = std::min(T, config.dt * static_cast<double>(step_budget));
    config.validate();
    const std::int64_t n = config.n_steps();
    const int stride = static_cast<int>(std::max<std::int64_t>(1, n / 100000));
    panels.trajectories.push_back(simulate_path(config, 0, stride));
    panels.configs.push_back({gamma, config.dt, config.T, config.dt_overridden, n});
  }
  return panels;
}

double vacf_exact(double gamma, double t) {
  return gamma * gamma * std::exp(-gamma * gamma * t / 2.0);
}

double msd_exact(double gamma, double t) {
  const double g2 = gamma * gamma;
  return 4.0 * t - (8.0 / g2) * (1.0 - std::exp(-g2 * t / 2.0));
}

}  // namespace kbm
