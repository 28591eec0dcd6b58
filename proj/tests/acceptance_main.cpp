// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Each criterion pins its tolerances in code.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "kbm/sde.hpp"
#include "kbm/semigroup.hpp"
#include "kbm/spectra.hpp"

using namespace kbm;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string name;
  std::function<void(std::string&)> body;  // throws or appends detail on failure
};

int failures = 0;

void run_criterion(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  try {
    c.body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!detail.empty() && ok) {
    // body reported a failure without throwing
    ok = false;
  }
  std::printf("[%s] %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.name.c_str(), secs,
              detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void require(bool cond, std::string& detail, const std::string& msg) {
  if (!cond && detail.empty()) detail = msg;
}

const TorusSpec kSpec;

// eigenvalue sets collected by earlier criteria, re-checked by criterion 7
std::vector<EigenSet> g_collected_sets;

double time_budget_check(std::chrono::steady_clock::time_point start, double budget_s,
                         std::string& detail, const char* label) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= budget_s && detail.empty()) {
    std::ostringstream oss;
    oss << label << " runtime " << secs << "s exceeds " << budget_s << "s";
    detail = oss.str();
  }
  return secs;
}

std::string run_binary(const std::string& args, int expected_rc, std::string& detail) {
  const char* bin = std::getenv("KBM_BIN");
  if (!bin) {
    require(false, detail, "KBM_BIN not set");
    return {};
  }
  const std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
  const int rc = WEXITSTATUS(std::system(cmd.c_str()));
  if (rc != expected_rc) {
    std::ostringstream oss;
    oss << "`" << args << "` exited " << rc << ", expected " << expected_rc;
    require(false, detail, oss.str());
  }
  return {};
}

std::string slurp(const fs::path& p, std::string& detail) {
  std::ifstream in(p, std::ios::binary);
  if (!in.good()) {
    require(false, detail, "missing " + p.string());
    return {};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  std::vector<Criterion> criteria;

  // C1: spectral convergence with multiplicities
  criteria.push_back({"C1 spectral convergence (13 eigenvalues, multiplicities 1+4+4+4, "
                      "Hausdorff decreasing, < 1e-2 at gamma=300, < 2 min)",
                      [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const SpectralWindow window(-0.5, 4.5, -1.0, 1.0);
    std::vector<double> hausdorff;
    for (double gamma : {10.0, 30.0, 100.0, 300.0}) {
      const EigenSet set = spectrum_window(gamma, window, kSpec, 1e-8);
      g_collected_sets.push_back(set);
      require(set.tail_certified, detail,
              "tail not certified at gamma=" + std::to_string(gamma));
      const MatchReport match = match_spectra(set, kSpec);
      if (gamma >= 30.0) {
        require(set.items.size() == 13, detail,
                "expected 13 eigenvalues at gamma=" + std::to_string(gamma) + ", got " +
                    std::to_string(set.items.size()));
        // multiplicity agreement: every base level fully matched
        require(match.unmatched_P.empty() && match.unmatched_base.empty(), detail,
                "unmatched eigenvalues at gamma=" + std::to_string(gamma));
        int near[5] = {0, 0, 0, 0, 0};
        for (const auto& item : set.items) {
          for (int level : {0, 1, 2, 4})
            if (std::abs(item.lambda - Complex(level, 0)) < 0.45) ++near[level == 4 ? 3 : level];
        }
        require(near[0] == 1 && near[1] == 4 && near[2] == 4 && near[3] == 4, detail,
                "multiplicity pattern is not (1,4,4,4) at gamma=" + std::to_string(gamma));
      }
      hausdorff.push_back(match.hausdorff);
    }
    for (std::size_t i = 1; i < hausdorff.size(); ++i)
      require(hausdorff[i] < hausdorff[i - 1], detail, "Hausdorff not strictly decreasing");
    require(hausdorff.back() < 1e-2, detail, "final Hausdorff >= 1e-2");
    time_budget_check(start, 120.0, detail, "C1");
  }});

  // C2: resolvent convergence rate
  criteria.push_back({"C2 resolvent rate (log-log slope <= -1/10 over gamma in "
                      "{10,30,100,300,1000}, < 5 min)",
                      [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const Complex lambda(-1.0, 0.0);
    std::vector<double> gs{10.0, 30.0, 100.0, 300.0, 1000.0};
    std::vector<double> vals;
    for (double gamma : gs) {
      TailDiagnostics diag;
      vals.push_back(resolvent_diff_norm(gamma, lambda, 0.0, kSpec, 40.0, 24, &diag));
      require(diag.monotone_rule_passed, detail,
              "tail certificate failed at gamma=" + std::to_string(gamma));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const double lx = std::log(gs[i]), ly = std::log(vals[i]);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double n = static_cast<double>(gs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::ostringstream oss;
    oss << "slope " << slope << " > -0.1";
    require(slope <= -0.1, detail, oss.str());
    time_budget_check(start, 300.0, detail, "C2");
  }});

  // C3: Grushin oracle equivalence
  criteria.push_back({"C3 Grushin oracle equivalence (20 random (gamma,k), zeros match "
                      "to 1e-6, winding counts agree, < 1 min)",
                      [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20250810);
    std::uniform_real_distribution<double> gdist(10.0, 200.0);
    std::vector<std::array<int, 2>> ks;
    for (const auto& mode : modes_up_to(kSpec, 8.0)) ks.push_back(mode.k);
    std::uniform_int_distribution<std::size_t> kdist(0, ks.size() - 1);
    const SpectralWindow window(-5.0, 5.0, -5.0, 5.0);
    const int M = 16;
    for (int trial = 0; trial < 20; ++trial) {
      const double gamma = gdist(rng);
      const HMode mode(ks[kdist(rng)], kSpec);
      int direct_in_window = 0;
      for (const auto& pair : eig(assemble_P(gamma, mode, M, kSpec).entries)) {
        if (!window.contains(pair.value)) continue;
        ++direct_in_window;
        if (std::abs(pair.value) <= 5.0) {
          const Complex zero =
              grushin_zero(gamma, mode, M, 0.0, pair.value + Complex(0.01, 0.0));
          if (std::abs(zero - pair.value) > 1e-6) {
            std::ostringstream oss;
            oss << "zero mismatch at gamma=" << gamma << " k=(" << mode.k[0] << ","
                << mode.k[1] << "): |" << zero << " - " << pair.value << "| > 1e-6";
            require(false, detail, oss.str());
          }
        }
      }
      const int winding = grushin_zero_count(gamma, mode, M, 0.0, window);
      if (winding != direct_in_window) {
        std::ostringstream oss;
        oss << "count mismatch at gamma=" << gamma << " k=(" << mode.k[0] << ","
            << mode.k[1] << "): winding " << winding << " vs direct " << direct_in_window;
        require(false, detail, oss.str());
      }
    }
    time_budget_check(start, 60.0, detail, "C3");
  }});

  // C4: uniform invertibility bounds
  criteria.push_back({"C4 uniform invertibility (A-normalized sups finite, max/min <= 5; "
                      "H^{s+1/4} variant likewise)",
                      [](std::string& detail) {
    const std::vector<double> gammas{50.0, 100.0, 200.0};
    const std::vector<double> As{5.0, 10.0};
    const double c0 = 10.0, r = c0 / std::sqrt(2.0);
    const std::vector<Complex> lambdas{
        {0, 0}, {c0, 0}, {-c0, 0}, {0, c0}, {0, -c0}, {r, r}, {r, -r}, {-r, r}, {-r, -r}};
    for (double s : {0.0, 1.0}) {
      const auto inv = inverse_bound_study(gammas, As, lambdas, s, kSpec, 400.0, 16);
      require(inv.all_finite, detail, "singular block in the H^s study");
      if (inv.max_over_min > 5.0) {
        std::ostringstream oss;
        oss << "H^s variation " << inv.max_over_min << " > 5 at s=" << s;
        require(false, detail, oss.str());
      }
      const auto reg = regularity_bound_study(gammas, As, lambdas, s, kSpec, 400.0, 16);
      require(reg.all_finite, detail, "singular block in the H^{s+1/4} study");
      if (reg.max_over_min > 5.0) {
        std::ostringstream oss;
        oss << "H^{s+1/4} variation " << reg.max_over_min << " > 5 at s=" << s;
        require(false, detail, oss.str());
      }
    }
  }});

  // C5: spectral gap and equilibrium rate
  criteria.push_back({"C5 spectral gap/equilibrium (|gap(100)-1| < 0.05, fitted rate >= "
                      "0.9 for beta = 0.9, < 2 min)",
                      [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const double gap = spectral_gap(100.0, kSpec);
    if (std::abs(gap - 1.0) >= 0.05) {
      std::ostringstream oss;
      oss << "|gap - 1| = " << std::abs(gap - 1.0) << " >= 0.05";
      require(false, detail, oss.str());
    }
    const StateVector u = default_state(8.0, 5, 42, kSpec);
    std::vector<double> ts;
    for (int i = 0; i <= 8; ++i) ts.push_back(1.0 + 0.5 * i);
    const ExpansionReport report = equilibrium_decay(100.0, u, ts, 0.9, kSpec);
    if (report.fitted_rate < 0.9) {
      std::ostringstream oss;
      oss << "fitted rate " << report.fitted_rate << " < 0.9";
      require(false, detail, oss.str());
    }
    time_budget_check(start, 120.0, detail, "C5");
  }});

  // C6: operator identities to machine precision
  criteria.push_back({"C6 operator identities (X anti-Hermitian exactly, 2(X^2)[0,0] = "
                      "-|kappa|^2 for all |kappa|^2 <= 100)",
                      [](std::string& detail) {
    for (const auto& mode : modes_up_to(kSpec, 100.0)) {
      for (int M : {1, 4, 9}) {
        const Matrix X = assemble_X(mode, M).entries;
        if ((X.adjoint() + X).cwiseAbs().maxCoeff() != 0.0) {
          require(false, detail, "X + X^H != 0 exactly");
          return;
        }
        const Complex xsq = 2.0 * (X * X)(M, M);
        if (std::abs(xsq - Complex(-mode.kappa_sq(), 0.0)) >
            1e-12 * std::max(1.0, mode.kappa_sq())) {
          std::ostringstream oss;
          oss << "2(X^2)[0,0] = " << xsq << " != " << -mode.kappa_sq();
          require(false, detail, oss.str());
          return;
        }
      }
    }
  }});

  // C7: accretivity across every collected sweep
  criteria.push_back({"C7 accretivity (Re lambda >= -1e-8 max(1,|lambda|) in every "
                      "acceptance sweep)",
                      [](std::string& detail) {
    // add one wide sweep to the collection
    g_collected_sets.push_back(
        spectrum_window(20.0, SpectralWindow(-0.5, 6.0, -3.0, 3.0), kSpec, 1e-8));
    std::size_t checked = 0;
    for (const auto& set : g_collected_sets) {
      for (const auto& item : set.items) {
        ++checked;
        if (item.lambda.real() < -1e-8 * std::max(1.0, std::abs(item.lambda))) {
          std::ostringstream oss;
          oss << "eigenvalue " << item.lambda << " violates accretivity";
          require(false, detail, oss.str());
          return;
        }
      }
    }
    require(checked >= 40, detail, "too few collected eigenvalues to certify");
  }});

  // C8: SDE statistics
  criteria.push_back({"C8 SDE statistics (vacf/msd within 5% at gamma=10, |msd(1)-4| < "
                      "0.4 at gamma=100, < 5 min)",
                      [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    SdeConfig c;
    c.gamma = 10.0;
    c.dt = 1e-3 * std::min(1.0, 10.0 / (c.gamma * c.gamma));
    c.T = 2.0;
    c.n_paths = 10000;
    c.seed = 42;
    const EnsembleStats stats = ensemble_stats(c, 101);
    const double scale = vacf_exact(c.gamma, 0.0);
    for (std::size_t i = 0; i < stats.t.size(); ++i) {
      const double t = stats.t[i];
      if (t <= 0.5) {
        const double want = vacf_exact(c.gamma, t);
        if (std::abs(stats.vacf[i] - want) > 0.05 * scale) {
          std::ostringstream oss;
          oss << "vacf off by " << std::abs(stats.vacf[i] - want) / scale << " of scale at t="
              << t;
          require(false, detail, oss.str());
        }
        if (want >= 0.3 * scale &&
            std::abs(stats.vacf[i] - want) > 0.05 * std::abs(want)) {
          std::ostringstream oss;
          oss << "vacf relative error " << std::abs(stats.vacf[i] - want) / want << " at t="
              << t;
          require(false, detail, oss.str());
        }
      }
      if (t >= 0.1 && t <= 2.0) {
        const double want = msd_exact(c.gamma, t);
        if (std::abs(stats.msd[i] - want) > 0.05 * want) {
          std::ostringstream oss;
          oss << "msd relative error " << std::abs(stats.msd[i] - want) / want << " at t="
              << t;
          require(false, detail, oss.str());
        }
      }
    }
    SdeConfig fast;
    fast.gamma = 100.0;
    fast.dt = fast.dt_cap();
    fast.T = 1.0;
    fast.n_paths = 2000;
    fast.seed = 43;
    const EnsembleStats fstats = ensemble_stats(fast, 11);
    const double msd1 = fstats.msd.back();
    if (std::abs(msd1 - 4.0) >= 0.4) {
      std::ostringstream oss;
      oss << "|msd(1) - 4| = " << std::abs(msd1 - 4.0) << " >= 0.4";
      require(false, detail, oss.str());
    }
    time_budget_check(start, 300.0, detail, "C8");
  }});

  // C9: hypoelliptic constants
  criteria.push_back({"C9 hypoelliptic constants (y sweep factor <= 2, gamma sweep "
                      "factor <= 5)",
                      [](std::string& detail) {
    std::vector<double> cy;
    for (double y : {0.0, 10.0, -10.0, 100.0, -100.0})
      cy.push_back(subelliptic_constant(150.0, 0.0, 0.125, 10.0, 1.0,
                                        SubellipticVariant::ShiftedIy, y, kSpec, 16.0, 12));
    const double ylo = *std::min_element(cy.begin(), cy.end());
    const double yhi = *std::max_element(cy.begin(), cy.end());
    if (yhi / ylo > 2.0) {
      std::ostringstream oss;
      oss << "y-sweep factor " << yhi / ylo << " > 2";
      require(false, detail, oss.str());
    }
    std::vector<double> cg;
    for (double gamma : {20.0, 50.0, 100.0})
      cg.push_back(subelliptic_constant(gamma, 0.0, 0.25, std::pow(gamma, 0.125),
                                        std::pow(gamma, 0.25), SubellipticVariant::WithQ,
                                        0.0, kSpec, 16.0, 12));
    const double glo = *std::min_element(cg.begin(), cg.end());
    const double ghi = *std::max_element(cg.begin(), cg.end());
    if (ghi / glo > 5.0) {
      std::ostringstream oss;
      oss << "gamma-sweep factor " << ghi / glo << " > 5";
      require(false, detail, oss.str());
    }
  }});

  // C10: CLI determinism
  criteria.push_back({"C10 determinism (reruns give byte-identical CSVs)",
                      [](std::string& detail) {
    const fs::path base = fs::temp_directory_path() / "kbm_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    struct Job {
      std::string flags;
      std::vector<std::string> outputs;
    };
    const std::vector<Job> jobs = {
        {"spectrum --gamma 40 --window -0.5 2.5 -1 1", {"spectrum.csv", "match.csv"}},
        {"simulate --gamma 10 --T 0.3 --paths 150 --seed 9", {"trajectory.csv", "stats.csv"}},
        {"converge --gammas 30 100 --window -0.5 2.5 -1 1", {"converge.csv"}},
    };
    int idx = 0;
    for (const auto& job : jobs) {
      const fs::path d1 = base / ("a" + std::to_string(idx));
      const fs::path d2 = base / ("b" + std::to_string(idx));
      fs::create_directories(d1);
      fs::create_directories(d2);
      run_binary(job.flags + " --out " + d1.string(), 0, detail);
      setenv("KBM_THREADS", "1", 1);
      run_binary(job.flags + " --out " + d2.string(), 0, detail);
      unsetenv("KBM_THREADS");
      if (!detail.empty()) return;
      for (const auto& name : job.outputs) {
        if (slurp(d1 / name, detail) != slurp(d2 / name, detail)) {
          require(false, detail, name + " differs between identical reruns");
          return;
        }
      }
      ++idx;
    }
  }});

  for (const auto& c : criteria) run_criterion(c);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
