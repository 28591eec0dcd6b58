// SPDX-License-Identifier: Apache-2.0

#include "kbm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "kbm/errors.hpp"

namespace kbm {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_loglog(const std::vector<SvgSeries>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
  const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double lx0 = 0, lx1 = 1, ly0 = 0, ly1 = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const double lx = std::log10(s.x[i]), ly = std::log10(s.y[i]);
      if (first) {
        lx0 = lx1 = lx;
        ly0 = ly1 = ly;
        first = false;
      } else {
        lx0 = std::min(lx0, lx);
        lx1 = std::max(lx1, lx);
        ly0 = std::min(ly0, ly);
        ly1 = std::max(ly1, ly);
      }
    }
  }
  if (lx1 - lx0 < 1e-12) lx1 = lx0 + 1;
  if (ly1 - ly0 < 1e-12) ly1 = ly0 + 1;
  auto px = [&](double lx) { return ml + (lx - lx0) / (lx1 - lx0) * (W - ml - mr); };
  auto py = [&](double ly) { return H - mb - (ly - ly0) / (ly1 - ly0) * (H - mt - mb); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) +
                    "\" height=\"" + num(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         title + "</text>\n";
  // decade grid
  for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1)); ++d) {
    svg += "<line x1=\"" + num(px(d)) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(px(d)) +
           "\" y2=\"" + num(H - mb) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(px(d)) + "\" y=\"" + num(H - mb + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1)); ++d) {
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(py(d)) + "\" x2=\"" + num(W - mr) +
           "\" y2=\"" + num(py(d)) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(py(d) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
  }
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(W - ml - mr) +
         "\" height=\"" + num(H - mt - mb) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(W / 2) + "\" y=\"" + num(H - 10) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + x_label + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(H / 2) + "\" text-anchor=\"middle\" font-size=\"13\" "
         "transform=\"rotate(-90 16 " + num(H / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 6];
    std::string path;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const double X = px(std::log10(s.x[i])), Y = py(std::log10(s.y[i]));
      path += (path.empty() ? "M" : " L") + num(X) + " " + num(Y);
      svg += "<circle cx=\"" + num(X) + "\" cy=\"" + num(Y) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    if (!path.empty())
      svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + num(W - mr - 8) + "\" y=\"" + num(mt + 18 + 16 * si) +
           "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + color + "\">" + s.label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string svg_torus_panels(const std::vector<Trajectory>& trajectories,
                             const std::vector<std::string>& titles) {
  const double P = 300, gap = 16, mt = 36;
  const double W = trajectories.size() * (P + gap) + gap;
  const double H = P + mt + gap;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) +
                    "\" height=\"" + num(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < trajectories.size(); ++p) {
    const auto& traj = trajectories[p];
    const double L1 = traj.spec.lengths[0], L2 = traj.spec.lengths[1];
    const double x0 = gap + p * (P + gap);
    svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(mt) + "\" width=\"" + num(P) +
           "\" height=\"" + num(P) + "\" fill=\"none\" stroke=\"black\"/>\n";
    if (p < titles.size())
      svg += "<text x=\"" + num(x0 + P / 2) + "\" y=\"" + num(mt - 10) +
             "\" text-anchor=\"middle\" font-size=\"13\">" + titles[p] + "</text>\n";
    std::string path;
    std::array<double, 2> prev{0, 0};
    for (std::size_t i = 0; i < traj.positions.size(); ++i) {
      const auto w = traj.wrapped(i);
      const double X = x0 + w[0] / L1 * P;
      const double Y = mt + P - w[1] / L2 * P;
      const bool jump = i > 0 && (std::abs(w[0] - prev[0]) > L1 / 2 ||
                                  std::abs(w[1] - prev[1]) > L2 / 2);
      path += (path.empty() || jump ? " M" : " L") + num(X) + " " + num(Y);
      prev = w;
    }
    if (!path.empty())
      svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#1f77b4\" "
             "stroke-width=\"0.8\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("write_text_file: cannot open " + path);
  out << content;
}

}  // namespace kbm
