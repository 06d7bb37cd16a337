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

// Holonomy of the decoherence-free subspace around closed reservoir loops:
// Wilson loop of the Kato generator, connection one-forms on basis chains,
// and the frame-transport cross-check under arbitrary gauges.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holodyn/dfs_tracker.hpp"
#include "holodyn/operator_algebra.hpp"
#include "holodyn/reservoir_path.hpp"

namespace holodyn {

struct HolonomyResult {
  Matrix U;                     // dim_dfs x dim_dfs, in the basis `basis0`
  std::vector<double> phases;   // eigenphases in (-pi, pi], ascending
  double unitarity_defect = 0.0;      // after polar re-unitarization
  double raw_unitarity_defect = 0.0;  // of the compressed product, before
  Matrix basis0;                // n x dim_dfs orthonormal basis of K(0)
  std::string loop_id;
  int steps = 0;

  Index dim_dfs() const { return U.rows(); }
};

struct WilsonOptions {
  DfsOptions dfs;
  double closure_tol = 1e-8;
  // Basis of K(0) to express U in; the kernel basis is Procrustes-aligned
  // to it. Empty means the SVD kernel basis.
  std::optional<Matrix> reference_basis;
};

// Ordered product of exp([Pi'(m_j), Pi(m_j)] ds) at the midpoints m_j, later
// times leftmost, compressed to K(0) and re-unitarized.
HolonomyResult wilson_loop(const ReservoirPath& path, int steps, const WilsonOptions& options = {});

struct BasisChain {
  std::vector<double> s;
  std::vector<Matrix> bases;  // n x k orthonormal, smooth in s
};

BasisChain basis_chain(const FrameFunction& frame, int steps);
// Kernel bases of the transport chain, continuity-aligned.
BasisChain basis_chain(const FrameChain& chain);

// A(s_j) = -B^dag dB/ds by finite differences (central in the interior).
// Throws PreconditionError when some A has anti-Hermiticity defect > 1e-6.
std::vector<Matrix> connection(const BasisChain& chain);

// Components A_i = -B^dag dB/d lambda_i at a point of a multi-parameter
// basis family, central differences with step h.
std::vector<Matrix> connection_components(const std::function<Matrix(const std::vector<double>&)>& basis,
                                          const std::vector<double>& lambda, double h = 1e-5);

// Ordered product of exp((A_j + A_{j+1}) ds_j / 2), later times leftmost.
Matrix path_ordered_exp(const std::vector<Matrix>& a, const std::vector<double>& s);

// Parallel transport of the chain's initial basis around the loop,
// expressed in that basis: B(0)^dag B(1) P exp(int A).
HolonomyResult holonomy_from_connection(const BasisChain& chain);

// Pi(0) O(1) W(1) Pi(0) from transport_frame, in the basis of K(0).
HolonomyResult frame_holonomy(const ReservoirPath& path, const TransportOptions& options,
                              const std::optional<Matrix>& reference_basis = std::nullopt);

struct GaugeCheck {
  double max_discrepancy = 0.0;  // max pairwise ||U_a - U_b|| over Q1, Q2, Wilson
  double phase_discrepancy = 0.0;
};
GaugeCheck gauge_invariance_check(const ReservoirPath& path, const GaugeProvider& q1, const GaugeProvider& q2,
                                  int steps);

struct Commutator {
  double norm = 0.0;  // ||U_A U_B - U_B U_A||
  HolonomyResult a;
  HolonomyResult b;   // expressed in a.basis0
};
// Throws PreconditionError unless both loops share K(0) to 1e-8.
Commutator noncommutativity(const ReservoirPath& path_a, const ReservoirPath& path_b, int steps);

// Columns loop_id,dim_dfs,phase_1..phase_d,unitarity_defect.
void write_holonomy_csv(const std::string& file, const std::vector<HolonomyResult>& results);

}  // namespace holodyn
