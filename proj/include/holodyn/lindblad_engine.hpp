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

// Lab-frame integration of
//   d rho/dt = -i[H, rho] - sum_k {G_k^dag G_k rho + rho G_k^dag G_k - 2 G_k rho G_k^dag}
// with G_k(t) = G_k(s = t/T). No factor 1/2: rates follow this convention.

#include <optional>
#include <string>
#include <vector>

#include "holodyn/dfs_tracker.hpp"
#include "holodyn/operator_algebra.hpp"
#include "holodyn/reservoir_path.hpp"

namespace holodyn {

Matrix lindblad_rhs(const LindbladSample& sample, const Matrix& rho, const Matrix* h = nullptr);
Matrix lindblad_superop(const LindbladSample& sample, const Matrix* h = nullptr);

// max over 16 evenly spaced s of lambda_max(P(s)), and ||H|| when given.
double rate_scale(const ReservoirPath& path, const Matrix* h = nullptr);

struct IntegrateOptions {
  double stability_limit = 0.1;  // rate * T / steps
  int stored_points = 1000;
  double trace_abort = 1e-6;
};

struct Trajectory {
  double T = 0.0;
  int steps = 0;
  Index dfs_dim = 0;
  std::vector<double> grid;
  std::vector<Matrix> states;
  std::vector<double> trace_defect;
  std::vector<double> min_eig;
  std::vector<double> dfs_pop;
  std::vector<double> purity;
  double max_hermiticity_defect = 0.0;  // before re-Hermitization, over all steps
  double max_trace_defect = 0.0;        // over all steps
};

// Fixed-step RK4. Throws PreconditionError when the stability guard fails,
// InvariantError when the trace drifts beyond options.trace_abort.
Trajectory integrate(const ReservoirPath& path, const Matrix& rho0, double T, int steps,
                     const std::optional<Matrix>& h = std::nullopt, const IntegrateOptions& options = {});

struct TrajectoryCheck {
  double max_trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  double max_purity = 0.0;
  bool ok = false;  // trace <= 1e-9, min eig >= -1e-8, purity <= 1 + 1e-9
};
TrajectoryCheck check_trajectory(const Trajectory& traj);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const Matrix& rho, const Matrix& sigma);

struct OverlapPoint {
  double s = 0.0;
  double population = 0.0;      // tr(Pi rho)
  double fidelity = 0.0;        // F(Pi rho Pi, U rho0 U^dag)
  double block_fidelity = 0.0;  // same with Pi rho Pi renormalized
};

// Reference state: O(s) W(s) rho0 W(s)^dag O(s)^dag from the frame chain.
// Every trajectory grid point must be a chain grid point to 1e-12.
std::vector<OverlapPoint> dfs_overlap(const Trajectory& traj, const FrameChain& chain, const Matrix& rho0);

void write_trajectory_csv(const std::string& file, const Trajectory& traj, const std::vector<OverlapPoint>& overlap);

}  // namespace holodyn
