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

#pragma once

// Named experiments over gamma*T sweeps, log-log slope fits and pass/fail
// criteria that carry their thresholds.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holodyn/dfs_tracker.hpp"
#include "holodyn/lindblad_engine.hpp"
#include "holodyn/reservoir_path.hpp"

namespace holodyn {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // zero for two points
};

// Ordinary least squares of log y against log x. All values must be positive.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct Criterion {
  std::string name;
  double value = 0.0;
  double lo = 0.0;  // pass iff lo <= value <= hi
  double hi = 0.0;
  bool pass = false;
};

Criterion make_criterion(std::string name, double value, double lo, double hi);

struct RunRecord {
  double gammaT = 0.0;
  double eta = 0.0;
  double T = 0.0;
  int steps = 0;
  double infidelity = 0.0;        // 1 - F(Pi rho Pi, U rho0 U^dag) at s = 1
  double block_infidelity = 0.0;  // same with the DFS block renormalized
  double leakage = 0.0;           // 1 - tr(Pi rho) at s = 1
  double predicted_leakage = 0.0;
  double wall_seconds = 0.0;
  Trajectory trajectory;
  std::vector<OverlapPoint> overlap;
};

struct ExperimentReport {
  std::string name;
  std::string scenario;
  std::vector<double> sweep;  // gamma*T values
  std::vector<double> etas;
  std::vector<RunRecord> runs;
  std::optional<LogLogFit> fit;
  std::vector<Criterion> criteria;
  std::vector<std::string> notes;

  bool passed() const;
};

struct SweepSettings {
  int integrate_steps = 120000;
  int transport_steps = 4000;
  int jobs = 1;
};

// One full integration at gamma*T, measured against the frame chain. Throws
// InvariantError when the trajectory breaks trace or positivity bounds.
RunRecord run_point(const Scenario& scenario, const FrameChain& chain, double gammaT, int steps,
                    bool predict = true);

// Runs every gamma*T point, up to settings.jobs at a time; results come back
// in input order.
std::vector<RunRecord> sweep(const Scenario& scenario, const FrameChain& chain, const std::vector<double>& gammaT,
                             const SweepSettings& settings, bool predict = true);

// True when the generator vanishes on the whole chain (static reservoir).
bool is_static_chain(const FrameChain& chain);

struct AdiabaticLimitOptions {
  double slope_tol = 0.15;
  double static_tol = 1e-9;
};
ExperimentReport exp_adiabatic_limit(const Scenario& scenario, const std::vector<double>& gammaT,
                                     const SweepSettings& settings, const AdiabaticLimitOptions& options = {});

ExperimentReport analyze_adiabatic_limit(const Scenario& scenario, const FrameChain& chain,
                                         std::vector<RunRecord> runs, const AdiabaticLimitOptions& options = {});

struct LeakageOptions {
  double slope_tol = 0.2;
  double prediction_factor = 2.0;
  double doubling_tol = 0.3;
  double static_tol = 1e-9;
};
// `family` rebuilds the scenario at another kappa; when empty the
// kappa-doubling check is skipped.
ExperimentReport exp_leakage_scaling(const Scenario& scenario, const std::vector<double>& gammaT,
                                     const SweepSettings& settings, const LeakageOptions& options = {},
                                     const std::function<Scenario(double)>& family = {});

ExperimentReport analyze_leakage_scaling(const Scenario& scenario, const FrameChain& chain,
                                         std::vector<RunRecord> runs, const SweepSettings& settings,
                                         const LeakageOptions& options = {},
                                         const std::function<Scenario(double)>& family = {});

// Single run at gamma*T; block fidelity against the holonomy prediction.
ExperimentReport exp_holonomy_fidelity(const Scenario& scenario, double gammaT, const SweepSettings& settings,
                                       double min_block_fidelity = 0.999);

struct ConsistencyOptions {
  double ratio_lo = 3.0;
  double ratio_hi = 5.0;
};
ExperimentReport exp_expansion_consistency(const Scenario& scenario, const std::vector<double>& etas,
                                           const ConsistencyOptions& options = {});

// Structural invariants on the built-in scenarios: L_-1 on random DFS
// states, Gammabar Pibar, D Pi, block structure of H1/H2, Z Hermiticity,
// frame rigidity, trajectory trace and positivity.
std::vector<Criterion> structural_suite(unsigned long long seed = 7);

}  // namespace holodyn
