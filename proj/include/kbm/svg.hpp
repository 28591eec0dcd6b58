// SPDX-License-Identifier: Apache-2.0
//
// Small self-contained SVG emitters: log-log series plots and wrapped
// torus-trajectory panels. No plotting dependency.

#pragma once

#include <string>
#include <vector>

#include "kbm/sde.hpp"

namespace kbm {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

// Log-log scatter+line plot; points with nonpositive coordinates are skipped.
std::string svg_loglog(const std::vector<SvgSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

// One panel per trajectory, positions wrapped to the fundamental domain,
// polylines split at wrap jumps.
std::string svg_torus_panels(const std::vector<Trajectory>& trajectories,
                             const std::vector<std::string>& titles);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace kbm
