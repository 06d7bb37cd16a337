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

// JSON run configurations and the run / holonomy / verify entry points used
// by the command-line tool.
//
// Document layout:
//   scenario     "dark_state" | "tripod" | "static"
//   params       dark_state: theta, kappa
//                tripod: kappa, loop, loop_b (optional)
//                static: gammas (list of matrices), cs (optional)
//   experiments  list of experiment names, see kExperimentNames
//   gammaT       list of positive numbers
//   etas         list of positive numbers (expansion_consistency only)
//   steps        integer (integrate count) or {integrate, transport, wilson}
//   tolerances   optional overrides, see Tolerances
//
// A loop is either {"type": "phi_circle", "theta", "chi"},
// {"type": "ellipse", "theta0", "dtheta", "dphi", "chi"},
// {"type": "constant", "theta", "phi"} or a list of [theta, phi(, chi)]
// samples whose last entry repeats the first. Matrix entries are numbers or
// [re, im] pairs.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holodyn/reservoir_path.hpp"

namespace holodyn {

inline const std::vector<std::string> kExperimentNames = {
    "holonomy",         "adiabatic_limit",  "leakage_scaling",      "holonomy_fidelity",
    "noncommutativity", "gauge_invariance", "expansion_consistency"};

struct StepConfig {
  int integrate = 120000;
  int transport = 4000;
  int wilson = 10000;
};

struct Tolerances {
  double slope = 0.15;
  double leakage_slope = 0.2;
  double prediction_factor = 2.0;
  double doubling = 0.3;
  double block_fidelity = 0.999;
  double phase = 1e-6;
  double commutator = 0.01;
  double unitarity = 1e-8;
  double gauge = 1e-6;
  double ratio_lo = 3.0;
  double ratio_hi = 5.0;
};

struct RunConfig {
  std::string scenario;
  double theta = 0.0;
  double kappa = 1.0;
  std::optional<TripodLoop> loop;
  std::optional<TripodLoop> loop_b;
  std::vector<Matrix> gammas;
  std::vector<Complex> cs;
  std::vector<std::string> experiments;
  std::vector<double> gammaT;
  std::vector<double> etas;
  StepConfig steps;
  Tolerances tol;
};

// Throws SchemaError with the offending field in the message.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& file);

Scenario make_scenario(const RunConfig& config);
// Second loop of a tripod config; throws SchemaError when absent.
Scenario make_scenario_b(const RunConfig& config);
// The same scenario at another kappa (empty for static scenarios).
std::function<Scenario(double)> scenario_family(const RunConfig& config);

struct RunOptions {
  std::string out_dir = "holodyn_out";
  int jobs = 1;
  unsigned long long seed = 1;
};

// Exit codes: 0 success, 1 criterion failure, 2 schema or precondition
// error, 3 invariant breach.
int run_config(const std::string& file, const RunOptions& options, std::ostream& log);
int run_holonomy(const std::string& file, const RunOptions& options, std::ostream& log);
int run_verify(const RunOptions& options, std::ostream& log);

}  // namespace holodyn
