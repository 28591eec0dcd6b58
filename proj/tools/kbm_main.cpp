// SPDX-License-Identifier: Apache-2.0
//
// kbm — spectral and stochastic laboratory for kinetic Brownian motion on
// the flat two-torus.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>

#include "kbm/commands.hpp"
#include "kbm/errors.hpp"
#include "kbm/manifest.hpp"

namespace {

void add_common(CLI::App* cmd, std::array<double, 2>& lengths, std::string& out_dir) {
  cmd->add_option("--lengths", lengths, "torus side lengths L1 L2");
  cmd->add_option("--out", out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinetic Brownian motion laboratory on S(T^2)"};
  app.set_config("--config", "", "TOML config file (flags override file values)");
  app.set_version_flag("--version", kbm::kToolVersion);
  app.require_subcommand(1);

  std::function<int()> run;

  kbm::SpectrumArgs spectrum;
  auto* cs = app.add_subcommand("spectrum", "certified eigenvalue sweep in a window");
  cs->add_option("--gamma", spectrum.gamma, "gamma");
  cs->add_option("--window", spectrum.window, "re_min re_max im_min im_max");
  cs->add_option("--tol", spectrum.tol, "truncation drift tolerance");
  add_common(cs, spectrum.lengths, spectrum.out_dir);
  cs->callback([&] { run = [&] { return kbm::cmd_spectrum(spectrum); }; });

  kbm::ConvergeArgs converge;
  auto* cc = app.add_subcommand("converge", "spectral distance to the base Laplacian vs gamma");
  cc->add_option("--gammas", converge.gammas, "gamma grid");
  cc->add_option("--window", converge.window, "re_min re_max im_min im_max");
  cc->add_option("--tol", converge.tol, "truncation drift tolerance");
  cc->add_option("--margin", converge.margin, "window-boundary margin for matching");
  cc->add_flag("--svg", converge.svg, "emit log-log SVG plot");
  add_common(cc, converge.lengths, converge.out_dir);
  cc->callback([&] { run = [&] { return kbm::cmd_converge(converge); }; });

  kbm::ResolventArgs resolvent;
  auto* cr = app.add_subcommand("resolvent", "resolvent-difference norms and rate fit");
  cr->add_option("--gammas", resolvent.gammas, "gamma grid");
  cr->add_option("--lambda-re", resolvent.lambda_re, "Re lambda");
  cr->add_option("--lambda-im", resolvent.lambda_im, "Im lambda");
  cr->add_option("--s", resolvent.s, "Sobolev index s");
  cr->add_option("--k-max", resolvent.K_max, "horizontal sweep cutoff |kappa|^2");
  cr->add_option("--M", resolvent.M, "vertical truncation");
  cr->add_flag("--qa", resolvent.qa, "also run the Q_A-compressed difference");
  cr->add_option("--qa-A", resolvent.qa_A, "A for the Q_A study");
  cr->add_option("--qa-N", resolvent.qa_N, "regularity gain N for the Q_A study");
  add_common(cr, resolvent.lengths, resolvent.out_dir);
  cr->callback([&] { run = [&] { return kbm::cmd_resolvent(resolvent); }; });

  kbm::GapArgs gap;
  auto* cg = app.add_subcommand("gap", "spectral gap and convergence to equilibrium");
  cg->add_option("--gammas", gap.gammas, "gamma grid");
  cg->add_option("--beta", gap.beta, "decay rate to test");
  cg->add_option("--t-min", gap.t_min, "first time point (>= 1)");
  cg->add_option("--t-max", gap.t_max, "last time point");
  cg->add_option("--t-count", gap.t_count, "number of time points");
  cg->add_option("--tol", gap.tol, "truncation drift tolerance");
  cg->add_option("--seed", gap.seed, "seed for the random smooth state");
  add_common(cg, gap.lengths, gap.out_dir);
  cg->callback([&] { run = [&] { return kbm::cmd_gap(gap); }; });

  kbm::HypoArgs hypo;
  auto* ch = app.add_subcommand("hypo", "empirical subelliptic constants");
  ch->add_option("--variant", hypo.variant, "plain | withQ | iy");
  ch->add_option("--gammas", hypo.gammas, "gamma grid");
  ch->add_option("--ys", hypo.ys, "imaginary shifts (iy variant)");
  ch->add_option("--B", hypo.B, "B weight (<= 0: gamma^{1/8})");
  ch->add_option("--A", hypo.A, "absorbing scale (<= 0: gamma^{1/4})");
  ch->add_option("--s", hypo.s, "Sobolev index s");
  ch->add_option("--gain", hypo.gain, "regularity gain (< 0: variant default)");
  ch->add_option("--k-max", hypo.K_max, "horizontal sweep cutoff |kappa|^2");
  ch->add_option("--M", hypo.M, "vertical truncation");
  add_common(ch, hypo.lengths, hypo.out_dir);
  ch->callback([&] { run = [&] { return kbm::cmd_hypo(hypo); }; });

  kbm::SimulateArgs simulate;
  auto* cm = app.add_subcommand("simulate", "kinetic Brownian motion sample paths and statistics");
  cm->add_option("--gamma", simulate.gamma, "gamma");
  cm->add_option("--dt", simulate.dt, "time step (<= 0: resolution cap)");
  cm->add_option("--T", simulate.T, "horizon");
  cm->add_option("--paths", simulate.n_paths, "number of paths (>= 100 adds stats.csv)");
  cm->add_option("--seed", simulate.seed, "RNG seed");
  cm->add_flag("--panels", simulate.panels, "emit trajectory panels");
  cm->add_option("--panel-gammas", simulate.panel_gammas, "gammas for the panels");
  add_common(cm, simulate.lengths, simulate.out_dir);
  cm->callback([&] { run = [&] { return kbm::cmd_simulate(simulate); }; });

  CLI11_PARSE(app, argc, argv);

  try {
    return run();
  } catch (const kbm::CertificationError& e) {
    std::fprintf(stderr, "certification failure: %s\n", e.what());
    return 2;
  } catch (const kbm::InvalidArgument& e) {
    std::fprintf(stderr, "invalid arguments: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
