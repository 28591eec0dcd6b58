// SPDX-License-Identifier: Apache-2.0

#include "kbm/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "kbm/csv.hpp"
#include "kbm/manifest.hpp"
#include "kbm/sde.hpp"
#include "kbm/semigroup.hpp"
#include "kbm/spectra.hpp"
#include "kbm/svg.hpp"

namespace kbm {

namespace {

TorusSpec make_spec(const std::array<double, 2>& lengths) {
  TorusSpec spec;
  spec.lengths = lengths;
  spec.validate();
  return spec;
}

SpectralWindow make_window(const std::array<double, 4>& w) {
  return SpectralWindow(w[0], w[1], w[2], w[3]);
}

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

int cmd_spectrum(const SpectrumArgs& args) {
  ensure_dir(args.out_dir);
  RunManifest manifest("spectrum", args.out_dir);
  manifest.set_config("gamma", args.gamma);
  for (int i = 0; i < 4; ++i)
    manifest.set_config("window_" + std::to_string(i), args.window[i]);
  manifest.set_config("lengths_0", args.lengths[0]);
  manifest.set_config("lengths_1", args.lengths[1]);
  manifest.set_config("tol", args.tol);

  const TorusSpec spec = make_spec(args.lengths);
  const SpectralWindow window = make_window(args.window);
  const EigenSet sweep = spectrum_window(args.gamma, window, spec, args.tol);

  CsvWriter spectrum_csv({"k1", "k2", "re", "im", "residual", "M_used"});
  for (const auto& item : sweep.items) {
    spectrum_csv.row({static_cast<long long>(item.mode.k[0]),
                      static_cast<long long>(item.mode.k[1]), item.lambda.real(),
                      item.lambda.imag(), item.residual,
                      static_cast<long long>(item.truncation.M_used)});
  }
  spectrum_csv.write(join(args.out_dir, "spectrum.csv"));

  const MatchReport match = match_spectra(sweep, spec);
  CsvWriter match_csv({"lambda_P_re", "lambda_P_im", "lambda_base", "distance"});
  for (const auto& pair : match.pairs)
    match_csv.row({pair.lambda_P.real(), pair.lambda_P.imag(), pair.lambda_base,
                   pair.distance});
  match_csv.write(join(args.out_dir, "match.csv"));

  manifest.set_flag("tail_certified", sweep.tail_certified);
  manifest.set_config("n_eigenvalues", static_cast<long long>(sweep.items.size()));
  manifest.set_config("n_unmatched_P", static_cast<long long>(match.unmatched_P.size()));
  manifest.set_config("n_unmatched_base",
                      static_cast<long long>(match.unmatched_base.size()));
  manifest.add_output(join(args.out_dir, "spectrum.csv"));
  manifest.add_output(join(args.out_dir, "match.csv"));
  manifest.write();

  std::printf("spectrum: %zu eigenvalue(s) in window, tail %s\n", sweep.items.size(),
              sweep.tail_certified ? "certified" : "NOT certified");
  if (!sweep.tail_certified) {
    std::printf("  %s\n", sweep.tail_note.c_str());
    return 2;
  }
  return 0;
}

int cmd_converge(const ConvergeArgs& args) {
  ensure_dir(args.out_dir);
  RunManifest manifest("converge", args.out_dir);
  const TorusSpec spec = make_spec(args.lengths);
  const SpectralWindow window = make_window(args.window);
  manifest.set_config("tol", args.tol);
  manifest.set_config("margin", args.margin);

  CsvWriter csv({"gamma", "hausdorff", "n_matched", "n_unmatched"});
  std::vector<double> gs, hs;
  bool all_certified = true;
  std::size_t final_unmatched = 0;
  for (double gamma : args.gammas) {
    const EigenSet sweep = spectrum_window(gamma, window, spec, args.tol);
    all_certified = all_certified && sweep.tail_certified;
    const MatchReport match = match_spectra(sweep, spec, args.margin);
    const std::size_t unmatched = match.unmatched_P.size() + match.unmatched_base.size();
    final_unmatched = unmatched;
    csv.row({gamma, match.hausdorff, static_cast<long long>(match.pairs.size()),
             static_cast<long long>(unmatched)});
    gs.push_back(gamma);
    hs.push_back(match.hausdorff);
  }
  csv.write(join(args.out_dir, "converge.csv"));
  manifest.add_output(join(args.out_dir, "converge.csv"));

  bool monotone = true;
  for (std::size_t i = 1; i < hs.size(); ++i) monotone = monotone && hs[i] < hs[i - 1];
  manifest.set_flag("hausdorff_monotone_decreasing", monotone);
  manifest.set_flag("all_tail_certified", all_certified);

  if (args.svg) {
    const std::string svg =
        svg_loglog({{"hausdorff", gs, hs}}, "spectral distance vs gamma", "gamma",
                   "matched Hausdorff distance");
    write_text_file(join(args.out_dir, "converge.svg"), svg);
    manifest.add_output(join(args.out_dir, "converge.svg"));
  }
  manifest.write();

  std::printf("converge: hausdorff %s, final unmatched %zu\n",
              monotone ? "strictly decreasing" : "not monotone", final_unmatched);
  return (final_unmatched == 0 && all_certified) ? 0 : 2;
}

int cmd_resolvent(const ResolventArgs& args) {
  ensure_dir(args.out_dir);
  RunManifest manifest("resolvent", args.out_dir);
  const TorusSpec spec = make_spec(args.lengths);
  const Complex lambda(args.lambda_re, args.lambda_im);
  manifest.set_config("lambda_re", args.lambda_re);
  manifest.set_config("lambda_im", args.lambda_im);
  manifest.set_config("s", args.s);
  manifest.set_config("K_max", args.K_max);
  manifest.set_config("M", static_cast<long long>(args.M));

  if (args.K_max < 4.0 * (std::abs(lambda) + 1.0)) {
    std::printf("resolvent: K_max %.3g below 4(|lambda|+1) = %.3g; tail cannot be "
                "certified\n", args.K_max, 4.0 * (std::abs(lambda) + 1.0));
    manifest.write();
    return 2;
  }

  CsvWriter csv({"gamma", "value", "boundary_decile_max", "decile_ratio",
                 "decile_rule", "monotone_rule"});
  std::vector<double> gs, vals;
  bool tail_ok = true;
  for (double gamma : args.gammas) {
    TailDiagnostics diag;
    const double value =
        resolvent_diff_norm(gamma, lambda, args.s, spec, args.K_max, args.M, &diag);
    tail_ok = tail_ok && diag.monotone_rule_passed;
    csv.row({gamma, value, diag.boundary_decile_max, diag.decile_ratio,
             static_cast<long long>(diag.decile_rule_passed ? 1 : 0),
             static_cast<long long>(diag.monotone_rule_passed ? 1 : 0)});
    gs.push_back(gamma);
    vals.push_back(value);
  }
  csv.write(join(args.out_dir, "resolvent.csv"));
  manifest.add_output(join(args.out_dir, "resolvent.csv"));

  const double slope = loglog_slope(gs, vals);
  manifest.set_config("loglog_slope", slope);
  manifest.set_flag("tail_certified", tail_ok);

  if (args.qa) {
    CsvWriter qa_csv({"gamma", "A", "N", "value"});
    for (double gamma : args.gammas) {
      const double v =
          qa_resolvent_diff(gamma, args.qa_A, lambda, args.s, args.qa_N, spec, args.K_max);
      qa_csv.row({gamma, args.qa_A, args.qa_N, v});
    }
    qa_csv.write(join(args.out_dir, "qa_resolvent.csv"));
    manifest.add_output(join(args.out_dir, "qa_resolvent.csv"));
  }
  manifest.write();

  std::printf("resolvent: log-log slope %.4f (pass if <= -0.1), tail %s\n", slope,
              tail_ok ? "certified" : "NOT certified");
  return tail_ok ? 0 : 2;
}

int cmd_gap(const GapArgs& args) {
  ensure_dir(args.out_dir);
  RunManifest manifest("gap", args.out_dir);
  const TorusSpec spec = make_spec(args.lengths);
  manifest.set_config("beta", args.beta);
  manifest.set_config("seed", static_cast<long long>(args.seed));

  std::vector<double> t_grid;
  for (int i = 0; i < args.t_count; ++i)
    t_grid.push_back(args.t_min +
                     (args.t_max - args.t_min) * i / std::max(1, args.t_count - 1));

  CsvWriter gap_csv({"gamma", "gap"});
  CsvWriter decay_csv({"gamma", "t", "remainder"});
  const StateVector u = default_state(args.u_kappa_sq, args.u_M, args.seed, spec);
  double last_rate = 0.0;
  for (double gamma : args.gammas) {
    const double gap = spectral_gap(gamma, spec, std::nullopt, args.tol);
    gap_csv.row({gamma, gap});
    const ExpansionReport report = equilibrium_decay(gamma, u, t_grid, args.beta, spec);
    for (const auto& [t, r] : report.remainder_norms) decay_csv.row({gamma, t, r});
    last_rate = report.fitted_rate;
    manifest.set_config("fitted_rate_gamma_" + format_double(gamma), report.fitted_rate);
  }
  gap_csv.write(join(args.out_dir, "gap.csv"));
  decay_csv.write(join(args.out_dir, "decay.csv"));
  manifest.add_output(join(args.out_dir, "gap.csv"));
  manifest.add_output(join(args.out_dir, "decay.csv"));
  manifest.write();

  std::printf("gap: fitted equilibrium rate %.4f at final gamma (beta %.3f)\n", last_rate,
              args.beta);
  return 0;
}

int cmd_hypo(const HypoArgs& args) {
  ensure_dir(args.out_dir);
  RunManifest manifest("hypo", args.out_dir);
  const TorusSpec spec = make_spec(args.lengths);
  manifest.set_config("variant", args.variant);
  manifest.set_config("s", args.s);
  manifest.set_config("K_max", args.K_max);

  SubellipticVariant variant;
  double default_gain;
  if (args.variant == "plain") {
    variant = SubellipticVariant::Plain;
    default_gain = 2.0 / 3.0;
  } else if (args.variant == "withQ") {
    variant = SubellipticVariant::WithQ;
    default_gain = 0.25;
  } else if (args.variant == "iy") {
    variant = SubellipticVariant::ShiftedIy;
    default_gain = 0.125;
  } else {
    throw InvalidArgument("cmd_hypo: variant must be plain, withQ or iy");
  }
  const double gain = args.gain >= 0.0 ? args.gain : default_gain;
  manifest.set_config("gain", gain);

  CsvWriter csv({"variant", "gamma", "y", "B", "A", "s", "gain", "value"});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double gamma : args.gammas) {
    const double B = args.B > 0.0 ? args.B : std::pow(gamma, 0.125);
    const double A = args.A > 0.0 ? args.A : std::pow(gamma, 0.25);
    for (double y : args.ys) {
      const double c = subelliptic_constant(gamma, args.s, gain, B, A, variant, y, spec,
                                            args.K_max, args.M);
      csv.row({args.variant, gamma, y, B, A, args.s, gain, c});
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  csv.write(join(args.out_dir, "hypo.csv"));
  manifest.add_output(join(args.out_dir, "hypo.csv"));
  const double factor = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  manifest.set_config("constant_max_over_min", factor);
  manifest.write();

  std::printf("hypo: constants in [%.4g, %.4g], max/min %.3f\n", lo, hi, factor);
  return 0;
}

int cmd_simulate(const SimulateArgs& args) {
  ensure_dir(args.out_dir);
  RunManifest manifest("simulate", args.out_dir);
  const TorusSpec spec = make_spec(args.lengths);

  SdeConfig config;
  config.gamma = args.gamma;
  config.T = args.T;
  config.n_paths = args.n_paths;
  config.seed = args.seed;
  config.spec = spec;
  config.dt = args.dt > 0.0 ? args.dt : config.dt_cap();
  config.validate();
  manifest.set_config("gamma", config.gamma);
  manifest.set_config("dt", config.dt);
  manifest.set_config("T", config.T);
  manifest.set_config("n_paths", static_cast<long long>(config.n_paths));
  manifest.set_config("seed", static_cast<long long>(config.seed));
  manifest.set_flag("dt_overridden", config.dt_overridden);

  // first path is always exported
  const std::int64_t n = config.n_steps();
  const int stride = static_cast<int>(std::max<std::int64_t>(1, n / 100000));
  const Trajectory traj = simulate_path(config, 0, stride);
  CsvWriter traj_csv({"t", "x_unwrapped", "y_unwrapped", "theta"});
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    traj_csv.row({traj.times[i], traj.positions[i][0], traj.positions[i][1],
                  traj.angles[i]});
  traj_csv.write(join(args.out_dir, "trajectory.csv"));
  manifest.add_output(join(args.out_dir, "trajectory.csv"));

  if (config.n_paths >= 100) {
    const EnsembleStats stats = ensemble_stats(config);
    CsvWriter stats_csv({"t", "msd", "msd_se", "vacf", "vacf_se", "angvar"});
    for (std::size_t i = 0; i < stats.t.size(); ++i)
      stats_csv.row({stats.t[i], stats.msd[i], stats.msd_se[i], stats.vacf[i],
                     stats.vacf_se[i], stats.angular_var[i]});
    stats_csv.write(join(args.out_dir, "stats.csv"));
    manifest.add_output(join(args.out_dir, "stats.csv"));
  }

  if (args.panels) {
    const Figure1Panels panels = figure1_panels(args.panel_gammas, args.T, args.seed, spec);
    std::vector<std::string> titles;
    for (std::size_t p = 0; p < panels.configs.size(); ++p) {
      const auto& pc = panels.configs[p];
      titles.push_back("gamma = " + format_double(pc.gamma));
      manifest.set_config("panel_" + std::to_string(p) + "_gamma", pc.gamma);
      manifest.set_config("panel_" + std::to_string(p) + "_dt", pc.dt);
      manifest.set_config("panel_" + std::to_string(p) + "_T", pc.T);
      manifest.set_config("panel_" + std::to_string(p) + "_steps",
                          static_cast<long long>(pc.steps));
      manifest.set_flag("panel_" + std::to_string(p) + "_dt_overridden", pc.dt_overridden);
      const auto& tr = panels.trajectories[p];
      CsvWriter panel_csv({"t", "x_unwrapped", "y_unwrapped", "theta"});
      for (std::size_t i = 0; i < tr.times.size(); ++i)
        panel_csv.row({tr.times[i], tr.positions[i][0], tr.positions[i][1], tr.angles[i]});
      const std::string name = "panel_" + std::to_string(p) + ".csv";
      panel_csv.write(join(args.out_dir, name));
      manifest.add_output(join(args.out_dir, name));
    }
    write_text_file(join(args.out_dir, "panels.svg"),
                    svg_torus_panels(panels.trajectories, titles));
    manifest.add_output(join(args.out_dir, "panels.svg"));
  }
  manifest.write();

  std::printf("simulate: %lld steps/path, %d path(s)\n",
              static_cast<long long>(config.n_steps()), config.n_paths);
  return 0;
}

}  // namespace kbm
