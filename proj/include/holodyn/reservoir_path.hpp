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

// Smooth one-parameter reservoir families s in [0,1] -> {Gamma_k(s), c_k(s)}
// and the canonical scenarios used for verification.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holodyn/operator_algebra.hpp"

namespace holodyn {

inline constexpr double kDefaultFdStep = 1e-5;

// Lindblad operators (units of sqrt(rate)) and their eigenvalues on the
// decoherence-free subspace at one value of the path parameter.
struct LindbladSample {
  std::vector<Matrix> gammas;
  std::vector<Complex> cs;
};

class ReservoirPath {
 public:
  using Evaluator = std::function<LindbladSample(double)>;

  // `eval` must be deterministic. `analytic_derivative`, when given, takes
  // precedence over finite differences in derivative(s).
  ReservoirPath(std::string name, Index dim, std::size_t num_ops, Evaluator eval, bool closed,
                double fd_step = kDefaultFdStep, Evaluator analytic_derivative = {});

  const std::string& name() const { return name_; }
  Index dim() const { return dim_; }
  std::size_t num_ops() const { return num_ops_; }
  bool closed() const { return closed_; }
  double fd_step() const { return fd_step_; }
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }

  // Throws PreconditionError for s outside [0, 1] or a malformed sample.
  LindbladSample eval(double s) const;

  // d/ds of the operators (and of c_k). Central differences with step
  // fd_step() in the interior, second-order one-sided within a step of
  // either end.
  LindbladSample derivative(double s) const;
  LindbladSample finite_difference(double s, double h) const;

 private:
  std::string name_;
  Index dim_;
  std::size_t num_ops_;
  Evaluator eval_;
  bool closed_;
  double fd_step_;
  Evaluator derivative_;
};

// s -> path(warp(s)); `warp` must be smooth and monotone with warp(0)=0,
// warp(1)=1.
ReservoirPath reparameterized(const ReservoirPath& path, std::function<double(double)> warp,
                              std::string name);
// s -> path(1 - s)
ReservoirPath reversed(const ReservoirPath& path);
// Runs `first` on s in [0, 1/2] then `second` on [1/2, 1], each through the
// warp u - sin(2 pi u)/(2 pi) so the joined path has no velocity kink.
// `second` must start where `first` ends.
ReservoirPath concatenated(const ReservoirPath& first, const ReservoirPath& second);

// Kernel of P = sum_k (Gamma_k - c_k)^dag (Gamma_k - c_k): the common
// eigenspace {psi : Gamma_k psi = c_k psi for all k}.
ops::Subspace common_eigenspace(const LindbladSample& sample, double rel_tol = kDefaultRelTol);

struct ExpectedHolonomy {
  bool trivial = false;                // holonomy is the identity
  std::optional<double> abelian_phase;  // one-dimensional DFS, phase mod 2 pi
};

// Smooth single-valued DFS basis chain s -> (dim x dim_dfs) isometry.
using FrameFunction = std::function<Matrix(double)>;

struct Scenario {
  std::string name;
  ReservoirPath path;
  Matrix rho0;
  ExpectedHolonomy expected;
  FrameFunction dark_frame;    // empty when no analytic frame is known
  std::optional<double> kappa;  // dissipative rate, for scenario families
};

// Throws PreconditionError unless rho0 is a unit-trace positive Hermitian
// matrix supported on K(0).
void validate_scenario(const Scenario& scenario, double rel_tol = kDefaultRelTol);

// Lambda system {|0>, |1>, |e>} with bright state
// cos(theta)|0> + exp(2 pi i s) sin(theta)|1> pumped through |e>.
Scenario scenario_dark_state(double theta, double kappa);
// Unit vector in span{|0>,|1>} orthogonal to the bright state.
Vector dark_state_vector(double theta, double s);

// Point on a tripod loop. `chi` is a relative phase on |1>; chi = 0 gives
// the real bright state sin(theta)cos(phi)|0> + sin(theta)sin(phi)|1> +
// cos(theta)|2>.
struct LoopPoint {
  double theta = 0.0;
  double phi = 0.0;
  double chi = 0.0;
};

Vector tripod_bright_state(const LoopPoint& p);  // length 3
// Orthonormal dark pair (-sin phi, e^{i chi} cos phi, 0) and
// (cos theta cos phi, e^{i chi} cos theta sin phi, -sin theta).
Matrix tripod_dark_pair(const LoopPoint& p);  // 3 x 2

struct TripodLoop {
  std::string name;
  std::function<Vector(double)> bright;        // length-3 unit vector
  std::function<LoopPoint(double)> parameters;  // empty for tabulated loops
};

TripodLoop constant_loop(double theta, double phi);
// phi = 2 pi s at fixed theta and chi.
TripodLoop phi_circle(double theta, double chi = 0.0);
// theta = theta0 + dtheta sin(2 pi s), phi = dphi (1 - cos(2 pi s)).
TripodLoop ellipse_loop(double theta0, double dtheta, double dphi, double chi = 0.0);
// Closed sample list (last point repeats the first within 1e-8); the bright
// vector is trigonometrically interpolated and renormalized.
TripodLoop tabulated_loop(std::vector<LoopPoint> samples);

// Tripod {|0>,|1>,|2>,|e>}: Gamma_1 = sqrt(kappa)|e><B|,
// Gamma_2 = sqrt(kappa)|B><e|, two-dimensional dark subspace.
Scenario scenario_tripod(const TripodLoop& loop, double kappa);

// Constant operators; `cs` defaults to zeros.
Scenario scenario_static(std::vector<Matrix> gammas, std::vector<Complex> cs = {});

}  // namespace holodyn
