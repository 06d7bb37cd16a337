// Copyright 2026 The holodyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// One PASS/FAIL line per acceptance criterion; any
// failed criterion makes the exit status 1.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "holodyn/experiment.hpp"
#include "holodyn/holonomy.hpp"

namespace fs = std::filesystem;
using namespace holodyn;

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerances.
constexpr double kBerryTol = 1e-6;
constexpr double kCommutatorMin = 0.01;
constexpr double kUnitarityTol = 1e-8;
constexpr double kBlockFidelityMin = 0.999;
constexpr double kGaugeTol = 1e-6;
constexpr int kWilsonSteps = 10000;
constexpr int kIntegrateSteps = 120000;
constexpr int kTransportSteps = 4000;

struct Line {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void add_criteria(Line& line, const ExperimentReport& rep) {
  for (const Criterion& c : rep.criteria)
    line.check(c.pass, rep.name + "/" + c.name + " = " + num(c.value) + " in [" + num(c.lo) + ", " + num(c.hi) + "]");
}

// i <D|dD/ds> integrated as the discrete Berry phase -arg prod <D_j|D_{j+1}>
// of the explicit dark state -e^{-2 pi i s} sin(theta)|0> + cos(theta)|1>.
double berry_oracle(double theta, int points) {
  auto dark = [theta](double s) {
    return std::array<std::complex<double>, 2>{-std::polar(std::sin(theta), -2.0 * kPi * s), std::cos(theta)};
  };
  std::complex<double> prod = 1.0;
  for (int j = 0; j < points; ++j) {
    const auto a = dark(static_cast<double>(j) / points);
    const auto b = dark(static_cast<double>(j + 1) / points);
    prod *= std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
  }
  return -std::arg(prod);
}

Line criterion_berry() {
  Line l;
  for (double theta : {kPi / 4.0, kPi / 6.0}) {
    const double oracle = berry_oracle(theta, 10000);
    const HolonomyResult r = wilson_loop(scenario_dark_state(theta, 1.0).path, kWilsonSteps);
    const double err = ops::phase_distance(r.phases.at(0), oracle);
    l.check(err <= kBerryTol, "theta=" + num(theta) + " phase " + num(r.phases[0]) + " oracle " + num(oracle) +
                                  " err " + num(err) + " <= " + num(kBerryTol));
  }
  const double quarter = ops::phase_distance(berry_oracle(kPi / 4.0, 10000), kPi);
  const double sixth = ops::phase_distance(berry_oracle(kPi / 6.0, 10000), kPi / 2.0);
  l.check(quarter <= kBerryTol && sixth <= kBerryTol, "oracle at pi and pi/2");
  return l;
}

struct SweepData {
  Scenario scenario;
  FrameChain chain;
  std::vector<RunRecord> runs;
  SweepSettings settings;
};

SweepData dark_sweep() {
  Scenario sc = scenario_dark_state(kPi / 4.0, 1.0);
  SweepSettings st;
  st.integrate_steps = kIntegrateSteps;
  st.transport_steps = kTransportSteps;
  TransportOptions to;
  to.steps = kTransportSteps;
  FrameChain chain = transport_frame(sc.path, to);
  std::vector<RunRecord> runs = sweep(sc, chain, {1e2, 1e3, 1e4}, st, true);
  return {std::move(sc), std::move(chain), std::move(runs), st};
}

Line criterion_adiabatic(const SweepData& d) {
  Line l;
  add_criteria(l, analyze_adiabatic_limit(d.scenario, d.chain, d.runs));
  return l;
}

Line criterion_leakage(const SweepData& d) {
  Line l;
  add_criteria(l, analyze_leakage_scaling(d.scenario, d.chain, d.runs, d.settings, {},
                                          [](double k) { return scenario_dark_state(kPi / 4.0, k); }));
  return l;
}

Line criterion_nonabelian() {
  Line l;
  const Scenario a = scenario_tripod(phi_circle(kPi / 4.0, 0.0), 1.0);
  const Scenario b = scenario_tripod(phi_circle(kPi / 4.0, kPi / 2.0), 1.0);
  const Commutator c = noncommutativity(a.path, b.path, kWilsonSteps);
  l.check(c.norm > kCommutatorMin, "||[U_A,U_B]|| = " + num(c.norm) + " > " + num(kCommutatorMin));
  l.check(c.a.unitarity_defect <= kUnitarityTol && c.b.unitarity_defect <= kUnitarityTol,
          "unitarity defects " + num(c.a.unitarity_defect) + ", " + num(c.b.unitarity_defect) + " <= " +
              num(kUnitarityTol));
  SweepSettings st;
  st.integrate_steps = kIntegrateSteps;
  st.transport_steps = kTransportSteps;
  add_criteria(l, exp_holonomy_fidelity(a, 1e4, st, kBlockFidelityMin));
  return l;
}

Line criterion_structural() {
  Line l;
  int failed = 0;
  const std::vector<Criterion> cs = structural_suite(7);
  for (const Criterion& c : cs) {
    if (!c.pass) {
      ++failed;
      l.check(false, c.name + " = " + num(c.value) + " in [" + num(c.lo) + ", " + num(c.hi) + "]");
    }
  }
  l.check(failed == 0 && !cs.empty(), std::to_string(cs.size() - failed) + "/" + std::to_string(cs.size()) +
                                          " structural checks");
  return l;
}

Line criterion_gauge() {
  Line l;
  const Matrix q3 = [] {
    std::srand(11);
    const Matrix m = Matrix::Random(3, 3);
    return Matrix(m + m.adjoint());
  }();
  const Matrix q4 = [] {
    std::srand(13);
    const Matrix m = Matrix::Random(4, 4);
    return Matrix(m + m.adjoint());
  }();
  const auto warp = [](double s) { return s + 0.1 * std::sin(2.0 * kPi * s) / (2.0 * kPi); };
  const std::vector<std::pair<Scenario, Matrix>> cases{
      {scenario_dark_state(kPi / 4.0, 1.0), q3}, {scenario_tripod(phi_circle(kPi / 4.0, 0.0), 1.0), q4}};
  for (const auto& [sc, q] : cases) {
    const GaugeCheck g = gauge_invariance_check(sc.path, zero_gauge(), block_gauge(q), kWilsonSteps);
    l.check(g.max_discrepancy <= kGaugeTol,
            sc.name + " gauge discrepancy " + num(g.max_discrepancy) + " <= " + num(kGaugeTol));
    const HolonomyResult u = wilson_loop(sc.path, kWilsonSteps);
    WilsonOptions wo;
    wo.reference_basis = u.basis0;
    const HolonomyResult w = wilson_loop(reparameterized(sc.path, warp, "warped"), kWilsonSteps, wo);
    const double d = (u.U - w.U).norm();
    l.check(d <= kGaugeTol, sc.name + " warp discrepancy " + num(d) + " <= " + num(kGaugeTol));
  }
  return l;
}

Line criterion_expansion() {
  Line l;
  add_criteria(l, exp_expansion_consistency(scenario_dark_state(kPi / 4.0, 1.0), {2.5e-3, 1.25e-3}));
  return l;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + HOLODYN_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Line criterion_cli() {
  Line l;
  const fs::path root = fs::temp_directory_path() / "holodyn_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  for (const std::string name : {"darkstate", "tripod", "static"}) {
    const std::string cfg = std::string(HOLODYN_CONFIGS) + "/" + name + ".json";
    const fs::path a = root / (name + "_a"), b = root / (name + "_b");
    const int ca = run_cli("run \"" + cfg + "\" --out \"" + a.string() + "\"", root / (name + "_a.log"));
    const int cb = run_cli("run \"" + cfg + "\" --out \"" + b.string() + "\"", root / (name + "_b.log"));
    l.check(ca == 0 && cb == 0, name + ".json exit " + std::to_string(ca) + "/" + std::to_string(cb));
    int files = 0;
    bool same = true;
    if (fs::exists(a)) {
      for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        same = same && slurp(e.path()) == slurp(b / e.path().filename());
      }
    }
    l.check(files > 0 && same, name + " " + std::to_string(files) + " CSV files byte-identical");
  }
  const std::vector<std::pair<std::string, std::string>> bad{{"malformed.json", "schema"},
                                                             {"missing_experiments.json", "schema"},
                                                             {"unknown_experiment.json", "schema"},
                                                             {"unknown_key.json", "schema"},
                                                             {"bad_steps.json", "schema"},
                                                             {"theta0.json", "DFS dimension jump"},
                                                             {"unstable.json", "stability guard"}};
  for (const auto& [file, needle] : bad) {
    const fs::path log = root / (file + ".log");
    const int code =
        run_cli("run \"" + std::string(HOLODYN_TEST_DATA) + "/" + file + "\" --out \"" + (root / "bad").string() + "\"",
                log);
    const bool diag = slurp(log).find(needle) != std::string::npos;
    l.check(code == 2 && diag, file + " exit " + std::to_string(code) + (diag ? " with '" : " without '") + needle +
                                   "'");
  }
  fs::remove_all(root);
  return l;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&failures](int id, const std::string& title, const std::function<Line()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Line l;
    try {
      l = fn();
    } catch (const std::exception& e) {
      l.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d %s (%.1f s): %s\n", l.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
                l.detail.c_str());
    std::fflush(stdout);
    if (!l.pass) ++failures;
  };
  report(1, "berry_phase", criterion_berry);
  std::optional<SweepData> d;
  report(2, "adiabatic_convergence", [&] {
    d = dark_sweep();
    return criterion_adiabatic(*d);
  });
  report(3, "leakage_scaling", [&] {
    if (!d) d = dark_sweep();
    return criterion_leakage(*d);
  });
  report(4, "nonabelian_holonomy", criterion_nonabelian);
  report(5, "structural_invariants", criterion_structural);
  report(6, "gauge_invariance", criterion_gauge);
  report(7, "expansion_consistency", criterion_expansion);
  report(8, "cli_contract", criterion_cli);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
