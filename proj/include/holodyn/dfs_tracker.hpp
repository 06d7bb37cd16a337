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

// Instantaneous decoherence-free subspace along a reservoir path, and the
// smooth frame O(s) that carries K(0) onto K(s).

#include <functional>
#include <vector>

#include "holodyn/operator_algebra.hpp"
#include "holodyn/reservoir_path.hpp"

namespace holodyn {

struct DOperator {
  Matrix D;  // sum_k (G_k^dag G_k - 2 c_k^* G_k + |c_k|^2)
  Matrix P;  // Hermitian part of D
};

DOperator build_D(const std::vector<Matrix>& gammas, const std::vector<Complex>& cs);
DOperator build_D(const LindbladSample& sample);

struct DfsOptions {
  double rel_tol = kDefaultRelTol;
  // Abort when gap < gap_floor_ratio * lambda_max(P).
  double gap_floor_ratio = 1e-6;
  // Residual bound for D Pi = 0 and Gamma_k v = c_k v, relative to max(1, ||op||).
  double consistency_tol = 1e-10;
};

struct InstantaneousDfs {
  ops::Subspace dfs;
  double gap = 0.0;       // smallest nonzero eigenvalue of P
  double max_rate = 0.0;  // largest eigenvalue of P
};

InstantaneousDfs instantaneous_dfs(const LindbladSample& sample, const DfsOptions& options = {});
InstantaneousDfs instantaneous_dfs(const ReservoirPath& path, double s, const DfsOptions& options = {});

// Projector onto the dim-dimensional kernel of D(s), without rank decisions.
Matrix dfs_projector(const ReservoirPath& path, double s, Index dim);
// dPi/ds. Uses the analytic derivative of the path when present, central
// differences of kernel projectors otherwise.
Matrix projector_derivative(const ReservoirPath& path, double s, Index dim);

// Q(s) given Pi(s). Must return a Hermitian matrix commuting with Pi.
using GaugeProvider = std::function<Matrix(double, const Matrix&)>;

GaugeProvider zero_gauge();
// Block-diagonal part Pi q Pi + Pi_perp q Pi_perp of a fixed Hermitian q,
// scaled by the profile f(s).
GaugeProvider block_gauge(Matrix q, std::function<double(double)> profile = {});

struct TransportOptions {
  int steps = 2000;
  DfsOptions dfs;
  GaugeProvider gauge;  // empty means Q = 0
  double rigidity_tol = 1e-6;
};

struct DFSFrame {
  double s = 0.0;
  ops::Subspace dfs;   // kernel basis aligned to the previous grid point
  double gap = 0.0;
  Matrix O;            // transport frame, O(0) = 1
  Matrix G;            // i [dPi/ds, Pi] + Q
  Matrix Q;
  Matrix W;            // in-DFS evolution P exp(i int G_DF), in the K(0) basis
  double rigidity_defect = 0.0;  // ||O^dag Pi O - Pi(0)||

  const Matrix& Pi() const { return dfs.projector(); }
};

struct FrameChain {
  std::vector<DFSFrame> frames;  // s_j = j / steps, j = 0..steps
  ops::Subspace dfs0;
  double min_gap = 0.0;
  double max_rate = 0.0;
  double max_rigidity_defect = 0.0;
  double max_unitarity_defect = 0.0;

  int steps() const { return static_cast<int>(frames.size()) - 1; }
};

// Midpoint exponential transport i dO/ds = G O with polar re-unitarization.
// Throws DfsError on a kernel dimension change, InvariantError when the
// rigidity defect exceeds options.rigidity_tol.
FrameChain transport_frame(const ReservoirPath& path, const TransportOptions& options = {});

Matrix g_bar(const DFSFrame& frame);              // O^dag G O
Matrix rotated_projector(const DFSFrame& frame);  // O^dag Pi O
Matrix g_off(const DFSFrame& frame);              // Pibar_perp Gbar Pibar
Matrix in_dfs_generator(const DFSFrame& frame);   // Pibar Gbar Pibar

}  // namespace holodyn
