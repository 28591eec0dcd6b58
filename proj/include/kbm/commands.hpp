// SPDX-License-Identifier: Apache-2.0
//
// Subcommand drivers: configuration in, CSV/SVG/manifest out, exit code
// back (0 success+certified, 2 certification/validation failure).

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kbm/model.hpp"

namespace kbm {

struct SpectrumArgs {
  double gamma = 100.0;
  std::array<double, 4> window{-0.5, 4.5, -1.0, 1.0};  // re_min re_max im_min im_max
  std::array<double, 2> lengths{2.0 * M_PI, 2.0 * M_PI};
  double tol = 1e-8;
  std::string out_dir = ".";
};
int cmd_spectrum(const SpectrumArgs& args);

struct ConvergeArgs {
  std::vector<double> gammas{10.0, 30.0, 100.0, 300.0};
  std::array<double, 4> window{-0.5, 4.5, -1.0, 1.0};
  std::array<double, 2> lengths{2.0 * M_PI, 2.0 * M_PI};
  double tol = 1e-8;
  double margin = 1e-3;
  bool svg = false;
  std::string out_dir = ".";
};
int cmd_converge(const ConvergeArgs& args);

struct ResolventArgs {
  std::vector<double> gammas{10.0, 30.0, 100.0, 300.0, 1000.0};
  double lambda_re = -1.0;
  double lambda_im = 0.0;
  double s = 0.0;
  double K_max = 40.0;
  int M = 24;
  std::array<double, 2> lengths{2.0 * M_PI, 2.0 * M_PI};
  bool qa = false;        // also run the Q_A-compressed difference study
  double qa_A = 3.0;
  double qa_N = 1.0;
  std::string out_dir = ".";
};
int cmd_resolvent(const ResolventArgs& args);

struct GapArgs {
  std::vector<double> gammas{100.0};
  double beta = 0.9;
  double t_min = 1.0, t_max = 5.0;
  int t_count = 9;
  double tol = 1e-8;
  double u_kappa_sq = 8.0;
  int u_M = 5;
  std::uint64_t seed = 42;
  std::array<double, 2> lengths{2.0 * M_PI, 2.0 * M_PI};
  std::string out_dir = ".";
};
int cmd_gap(const GapArgs& args);

struct HypoArgs {
  std::string variant = "withQ";  // plain | withQ | iy
  std::vector<double> gammas{20.0, 50.0, 100.0};
  std::vector<double> ys{0.0};
  double B = 0.0;     // <= 0: use gamma^{1/8}
  double A = 0.0;     // <= 0: use gamma^{1/4}
  double s = 0.0;
  double gain = -1.0; // < 0: variant default (2/3, 1/4, 1/8)
  double K_max = 16.0;
  int M = 12;
  std::array<double, 2> lengths{2.0 * M_PI, 2.0 * M_PI};
  std::string out_dir = ".";
};
int cmd_hypo(const HypoArgs& args);

struct SimulateArgs {
  double gamma = 10.0;
  double dt = 0.0;  // <= 0: resolution cap min(0.1/gamma^2, 0.1/gamma)
  double T = 1.0;
  int n_paths = 1;
  std::uint64_t seed = 42;
  std::array<double, 2> lengths{2.0 * M_PI, 2.0 * M_PI};
  bool panels = false;
  std::vector<double> panel_gammas{1e-2, 10.0, 1e4};
  std::string out_dir = ".";
};
int cmd_simulate(const SimulateArgs& args);

}  // namespace kbm
