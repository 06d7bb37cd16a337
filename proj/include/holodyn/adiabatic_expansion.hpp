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

// Rotated-frame operators, the first-order generator S1 that
// block-diagonalizes the effective Hamiltonian, and the superoperator
// hierarchy (1/eta) L_-1 + L_0 + eta L_1.

#include <vector>

#include "holodyn/dfs_tracker.hpp"
#include "holodyn/operator_algebra.hpp"
#include "holodyn/reservoir_path.hpp"

namespace holodyn {

struct RotatedOps {
  std::vector<Matrix> gammabars;  // (O^dag G_k O - c_k) / sqrt(gamma)
  Matrix Dbar;                    // O^dag D O / gamma
  Matrix Gbar;                    // O^dag G O
  Matrix Pibar;                   // O^dag Pi O
};

RotatedOps rotate_ops(const DFSFrame& frame, const std::vector<Matrix>& gammas, const std::vector<Complex>& cs,
                      double gamma_gap);

struct AdiabaticOrders {
  double s = 0.0;
  double eta = 0.0;
  Matrix Pibar;
  Matrix Gbar;
  std::vector<Matrix> Gammabars;
  Matrix Dbar;
  Matrix Goff;
  Matrix DbarPerpInv;  // inverse of the K-perp block of Dbar, embedded
  Matrix S1;
  Matrix Htilde0;
  Matrix Htilde1;
  Matrix Htilde2;
  std::vector<Matrix> Lambdas;
  Matrix Z;
};

// Fills every field. `gamma_gap` is the global gap bound min_s gap(s).
AdiabaticOrders build_orders(const DFSFrame& frame, const LindbladSample& sample, double gamma_gap, double eta);
AdiabaticOrders build_orders(const ReservoirPath& path, const DFSFrame& frame, double gamma_gap, double eta);

// S1 = Goff^dag Dperp^-1 - Dperp^-1 Goff. Reads Pibar, Dbar and Goff.
// Throws PreconditionError when the K-perp block of Dbar is singular.
Matrix s1_operator(const AdiabaticOrders& orders);
// Fills DbarPerpInv as a side product.
Matrix dbar_perp_inverse(const Matrix& dbar, const Matrix& pibar);

struct HTilde {
  Matrix h0;
  Matrix h1;
  Matrix h2;
};
HTilde htilde_orders(const AdiabaticOrders& orders);

struct SuperOperator {
  Index dim = 0;  // Hilbert dimension; matrix is dim^2 x dim^2
  Matrix matrix;

  Matrix apply(const Matrix& rho) const;
};

SuperOperator l_minus1_superop(const AdiabaticOrders& orders);
SuperOperator l0_superop(const AdiabaticOrders& orders);
Matrix l0_generator(const DFSFrame& frame);  // Gbar_DF = Pibar Gbar Pibar

struct L1Data {
  SuperOperator op;
  std::vector<Matrix> Lambdas;
  Matrix Z;
  std::vector<double> leakage_indicator;  // ||Pibar_perp Lambda_k Pibar||
};
L1Data l1_superop(const AdiabaticOrders& orders);

// rho -> i[Gbar, rho] - (1/eta)(Dbar rho + rho Dbar^dag - 2 sum Gbar_k rho Gbar_k^dag)
SuperOperator rotated_full_superop(const AdiabaticOrders& orders);
// (1/eta) L_-1 + L_0 + eta L_1
SuperOperator truncated_superop(const AdiabaticOrders& orders);

// Pibar + i eta {S1, Pibar}; diagnostic only.
Matrix deformed_projector(const AdiabaticOrders& orders);
// ||Pibar e^{i eta S1} (-eta Gbar - i Dbar) e^{-i eta S1} Pibar_perp||
double block_diagonalization_residual(const AdiabaticOrders& orders);
// ||S1(b) - S1(a)|| / (b.s - a.s)
double s1_drift(const AdiabaticOrders& a, const AdiabaticOrders& b);

struct StructuralDefects {
  double gammabar_pibar = 0.0;    // max_k ||Gammabar_k Pibar||
  double dbar_min_gap = 0.0;      // smallest nonzero eigenvalue of Herm(Dbar)
  double s1_diagonal_blocks = 0.0;
  double h1_off_diagonal = 0.0;
  double h2_off_diagonal = 0.0;
  double z_hermiticity = 0.0;
};
StructuralDefects structural_defects(const AdiabaticOrders& orders);

struct ExpansionComparison {
  double eta = 0.0;
  double discrepancy = 0.0;       // ||Pibar (rhobar - rhotilde/tr) Pibar|| at s = 1
  double leakage_full = 0.0;      // 1 - tr(Pibar rhobar(1))
  double leakage_truncated = 0.0;
  double max_s1_drift = 0.0;
};

// Integrates the rotated-frame equation and its truncation side by side
// with RK4 in s, `rk_steps` steps, on a transport grid of 2 * rk_steps.
// rk_steps = 0 picks ceil(10 / eta).
ExpansionComparison compare_expansion(const ReservoirPath& path, const Matrix& rho0, double eta, int rk_steps = 0,
                                      const DfsOptions& dfs = {});

struct LeakagePrediction {
  double eta = 0.0;
  double leakage = 0.0;  // 1 - tr of the DFS block at s = 1
  Matrix rho_block;      // final DFS block in the rotated frame (Pibar-supported)
};

// Integrates d rho_DF / ds = Pibar (L_0 + eta L_1)[rho_DF] Pibar over a
// precomputed frame chain (midpoint-free RK4 on alternate grid points).
LeakagePrediction predict_leakage(const ReservoirPath& path, const FrameChain& chain, const Matrix& rho0,
                                  double eta);

}  // namespace holodyn
