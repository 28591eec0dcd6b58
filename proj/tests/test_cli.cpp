// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the kbm binary: file formats, exit codes,
// determinism, manifest completeness. The binary path comes from KBM_BIN.

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kbm/manifest.hpp"

namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

std::string binary() {
  const char* bin = std::getenv("KBM_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "KBM_BIN must point at the kbm binary");
  return bin;
}

int run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("kbm_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char ch : text)
    if (ch == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("spectrum: 13 rows at gamma = 100 on the default window, exit 0") {
  const auto dir = fresh_dir("spectrum");
  const int rc = run("spectrum --gamma 100 --window -0.5 4.5 -1 1 --out " + dir.string());
  CHECK(rc == 0);
  const std::string csv = slurp(dir / "spectrum.csv");
  CHECK(line_count(csv) == 14);  // header + 13 eigenvalues
  CHECK(csv.rfind("k1,k2,re,im,residual,M_used", 0) == 0);
  const std::string match = slurp(dir / "match.csv");
  CHECK(line_count(match) == 14);
}

TEST_CASE("spectrum: empty window gives empty CSVs and exit 0") {
  const auto dir = fresh_dir("empty");
  const int rc = run("spectrum --gamma 50 --window 0.1 0.9 -0.5 0.5 --out " + dir.string());
  CHECK(rc == 0);
  CHECK(line_count(slurp(dir / "spectrum.csv")) == 1);  // header only
  CHECK(line_count(slurp(dir / "match.csv")) == 1);
}

TEST_CASE("spectrum: --tol 0 exits 2 (truncation ceiling)") {
  const auto dir = fresh_dir("tol0");
  const int rc = run("spectrum --gamma 30 --window -0.5 0.5 -0.5 0.5 --tol 0 --out " +
                     dir.string());
  CHECK(rc == 2);
}

TEST_CASE("determinism: identical flags give byte-identical CSVs") {
  const auto dir1 = fresh_dir("det1");
  const auto dir2 = fresh_dir("det2");
  const std::string flags = "spectrum --gamma 40 --window -0.5 2.5 -1 1";
  CHECK(run(flags + " --out " + dir1.string()) == 0);
  setenv("KBM_THREADS", "1", 1);
  CHECK(run(flags + " --out " + dir2.string()) == 0);
  unsetenv("KBM_THREADS");
  CHECK(slurp(dir1 / "spectrum.csv") == slurp(dir2 / "spectrum.csv"));
  CHECK(slurp(dir1 / "match.csv") == slurp(dir2 / "match.csv"));

  const auto sim1 = fresh_dir("sim1");
  const auto sim2 = fresh_dir("sim2");
  const std::string sim = "simulate --gamma 10 --T 0.3 --paths 150 --seed 7";
  CHECK(run(sim + " --out " + sim1.string()) == 0);
  setenv("KBM_THREADS", "3", 1);
  CHECK(run(sim + " --out " + sim2.string()) == 0);
  unsetenv("KBM_THREADS");
  CHECK(slurp(sim1 / "trajectory.csv") == slurp(sim2 / "trajectory.csv"));
  CHECK(slurp(sim1 / "stats.csv") == slurp(sim2 / "stats.csv"));
}

TEST_CASE("manifest lists and hashes every output") {
  const auto dir = fresh_dir("manifest");
  CHECK(run("simulate --gamma 10 --T 0.2 --paths 120 --out " + dir.string()) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["tool"] == "kbm");
  CHECK(manifest["subcommand"] == "simulate");
  const auto outputs = manifest["outputs"];
  REQUIRE(outputs.size() >= 2);  // trajectory.csv + stats.csv
  for (const auto& out : outputs) {
    const std::string path = out["path"];
    const std::string recorded = out["sha256"];
    CHECK(recorded == kbm::sha256_file(path));
  }
}

TEST_CASE("converge: emits per-gamma rows and the monotone flag") {
  const auto dir = fresh_dir("converge");
  const int rc = run("converge --gammas 30 100 --window -0.5 2.5 -1 1 --svg --out " +
                     dir.string());
  CHECK(rc == 0);
  const std::string csv = slurp(dir / "converge.csv");
  CHECK(line_count(csv) == 3);
  CHECK(csv.rfind("gamma,hausdorff,n_matched,n_unmatched", 0) == 0);
  CHECK(fs::exists(dir / "converge.svg"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["flags"]["hausdorff_monotone_decreasing"] == true);
}

TEST_CASE("resolvent: slope recorded; tiny K_max exits 2") {
  const auto dir = fresh_dir("resolvent");
  const int rc =
      run("resolvent --gammas 10 100 --k-max 40 --M 16 --out " + dir.string());
  CHECK(rc == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  const double slope = std::stod(manifest["config"]["loglog_slope"].get<std::string>());
  CHECK(slope <= -0.1);

  const auto dir2 = fresh_dir("resolvent_small");
  CHECK(run("resolvent --gammas 10 --k-max 2 --M 8 --out " + dir2.string()) == 2);
}

TEST_CASE("gap: remainder table decays at the expected rate") {
  const auto dir = fresh_dir("gap");
  const int rc = run("gap --gammas 100 --beta 0.9 --out " + dir.string());
  CHECK(rc == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  const double rate =
      std::stod(manifest["config"]["fitted_rate_gamma_100"].get<std::string>());
  CHECK(rate >= 0.9);
}

TEST_CASE("hypo: y sweep with B = 10 stays within factor 2") {
  const auto dir = fresh_dir("hypo");
  const int rc = run("hypo --variant iy --gammas 150 --ys 0 10 -10 100 -100 "
                     "--B 10 --A 1 --out " + dir.string());
  CHECK(rc == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  const double factor =
      std::stod(manifest["config"]["constant_max_over_min"].get<std::string>());
  CHECK(factor <= 2.0);
}

TEST_CASE("simulate: single path writes one trajectory") {
  const auto dir = fresh_dir("single");
  CHECK(run("simulate --gamma 5 --T 0.2 --paths 1 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(!fs::exists(dir / "stats.csv"));
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t,x_unwrapped,y_unwrapped,theta", 0) == 0);
}

TEST_CASE("simulate: panels emit SVG and per-panel CSVs") {
  const auto dir = fresh_dir("panels");
  CHECK(run("simulate --gamma 10 --T 0.5 --paths 1 --panels --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "panels.svg"));
  CHECK(fs::exists(dir / "panel_0.csv"));
  CHECK(fs::exists(dir / "panel_1.csv"));
  CHECK(fs::exists(dir / "panel_2.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["flags"]["panel_2_dt_overridden"] == true);
}

TEST_SUITE_END();
