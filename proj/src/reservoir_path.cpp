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

#include "holodyn/reservoir_path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "holodyn/errors.hpp"

namespace holodyn {
namespace {

constexpr double kPi = std::numbers::pi;

LindbladSample combine(const LindbladSample& a, double wa, const LindbladSample& b, double wb) {
  LindbladSample out;
  out.gammas.reserve(a.gammas.size());
  for (std::size_t k = 0; k < a.gammas.size(); ++k) out.gammas.push_back(wa * a.gammas[k] + wb * b.gammas[k]);
  for (std::size_t k = 0; k < a.cs.size(); ++k) out.cs.push_back(wa * a.cs[k] + wb * b.cs[k]);
  return out;
}

LindbladSample combine3(const LindbladSample& a, double wa, const LindbladSample& b, double wb,
                        const LindbladSample& c, double wc) {
  LindbladSample ab = combine(a, wa, b, wb);
  return combine(ab, 1.0, c, wc);
}

double smooth_warp(double u) { return u - std::sin(2.0 * kPi * u) / (2.0 * kPi); }

Matrix projector_of(const Vector& v) { return v * v.adjoint(); }

// Embeds a ket over the first n levels into dimension n + 1 (the last level
// is the auxiliary excited state).
Vector pad_excited(const Vector& v) {
  Vector out = Vector::Zero(v.size() + 1);
  out.head(v.size()) = v;
  return out;
}

LindbladSample pumped_pair(const Vector& bright, double kappa) {
  const Index n = bright.size() + 1;
  Vector excited = Vector::Zero(n);
  excited(n - 1) = 1.0;
  const Vector b = pad_excited(bright);
  const double amp = std::sqrt(kappa);
  LindbladSample sample;
  sample.gammas.push_back(amp * excited * b.adjoint());
  sample.gammas.push_back(amp * b * excited.adjoint());
  sample.cs = {0.0, 0.0};
  return sample;
}

}  // namespace

ReservoirPath::ReservoirPath(std::string name, Index dim, std::size_t num_ops, Evaluator eval, bool closed,
                             double fd_step, Evaluator analytic_derivative)
    : name_(std::move(name)),
      dim_(dim),
      num_ops_(num_ops),
      eval_(std::move(eval)),
      closed_(closed),
      fd_step_(fd_step),
      derivative_(std::move(analytic_derivative)) {
  if (dim_ < 1) throw PreconditionError("ReservoirPath: dim must be positive");
  if (num_ops_ < 1) throw PreconditionError("ReservoirPath: at least one Lindblad operator required");
  if (!eval_) throw PreconditionError("ReservoirPath: missing evaluator");
  if (!(fd_step_ > 0.0 && fd_step_ < 0.25)) throw PreconditionError("ReservoirPath: fd_step must lie in (0, 0.25)");
}

LindbladSample ReservoirPath::eval(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw PreconditionError("ReservoirPath '" + name_ + "': s = " + std::to_string(s) + " outside [0, 1]");
  }
  LindbladSample sample = eval_(s);
  if (sample.gammas.size() != num_ops_ || sample.cs.size() != num_ops_) {
    throw PreconditionError("ReservoirPath '" + name_ + "': evaluator returned the wrong number of operators");
  }
  for (const Matrix& g : sample.gammas) {
    if (g.rows() != dim_ || g.cols() != dim_) {
      throw PreconditionError("ReservoirPath '" + name_ + "': operator has the wrong dimension");
    }
    if (!ops::all_finite(g)) throw PreconditionError("ReservoirPath '" + name_ + "': non-finite operator entries");
  }
  return sample;
}

LindbladSample ReservoirPath::finite_difference(double s, double h) const {
  if (!(h > 0.0 && 2.0 * h <= 1.0)) throw PreconditionError("finite_difference: step out of range");
  if (s - h >= 0.0 && s + h <= 1.0) {
    return combine(eval(s + h), 0.5 / h, eval(s - h), -0.5 / h);
  }
  if (s - h < 0.0) {
    return combine3(eval(s), -1.5 / h, eval(s + h), 2.0 / h, eval(s + 2.0 * h), -0.5 / h);
  }
  return combine3(eval(s), 1.5 / h, eval(s - h), -2.0 / h, eval(s - 2.0 * h), 0.5 / h);
}

LindbladSample ReservoirPath::derivative(double s) const {
  if (derivative_) {
    if (!(s >= 0.0 && s <= 1.0)) throw PreconditionError("ReservoirPath::derivative: s outside [0, 1]");
    return derivative_(s);
  }
  return finite_difference(s, fd_step_);
}

ReservoirPath reparameterized(const ReservoirPath& path, std::function<double(double)> warp, std::string name) {
  if (std::abs(warp(0.0)) > 1e-14 || std::abs(warp(1.0) - 1.0) > 1e-14) {
    throw PreconditionError("reparameterized: warp must fix 0 and 1");
  }
  auto evaluator = [path, warp](double s) { return path.eval(std::clamp(warp(s), 0.0, 1.0)); };
  return ReservoirPath(std::move(name), path.dim(), path.num_ops(), evaluator, path.closed(), path.fd_step());
}

ReservoirPath reversed(const ReservoirPath& path) {
  auto evaluator = [path](double s) { return path.eval(1.0 - s); };
  return ReservoirPath(path.name() + "_reversed", path.dim(), path.num_ops(), evaluator, path.closed(),
                       path.fd_step());
}

ReservoirPath concatenated(const ReservoirPath& first, const ReservoirPath& second) {
  if (first.dim() != second.dim() || first.num_ops() != second.num_ops()) {
    throw PreconditionError("concatenated: paths have different shapes");
  }
  const LindbladSample end = first.eval(1.0);
  const LindbladSample start = second.eval(0.0);
  for (std::size_t k = 0; k < end.gammas.size(); ++k) {
    if ((end.gammas[k] - start.gammas[k]).norm() > 1e-8 || std::abs(end.cs[k] - start.cs[k]) > 1e-8) {
      throw PreconditionError("concatenated: second path does not start where the first ends");
    }
  }
  auto evaluator = [first, second](double s) {
    if (s <= 0.5) return first.eval(std::clamp(smooth_warp(2.0 * s), 0.0, 1.0));
    return second.eval(std::clamp(smooth_warp(2.0 * s - 1.0), 0.0, 1.0));
  };
  return ReservoirPath(second.name() + "_after_" + first.name(), first.dim(), first.num_ops(), evaluator,
                       first.closed() && second.closed(), first.fd_step());
}

ops::Subspace common_eigenspace(const LindbladSample& sample, double rel_tol) {
  if (sample.gammas.empty()) throw PreconditionError("common_eigenspace: no operators");
  const Index n = sample.gammas.front().rows();
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < sample.gammas.size(); ++k) {
    const Matrix shifted = sample.gammas[k] - sample.cs[k] * ops::identity(n);
    p += shifted.adjoint() * shifted;
  }
  return ops::nullspace(p, rel_tol);
}

void validate_scenario(const Scenario& scenario, double rel_tol) {
  const Matrix& rho = scenario.rho0;
  const Index n = scenario.path.dim();
  if (rho.rows() != n || rho.cols() != n) throw PreconditionError("scenario: rho0 has the wrong dimension");
  if (ops::hermiticity_defect(rho) > 1e-12) throw PreconditionError("scenario: rho0 is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-12) throw PreconditionError("scenario: rho0 trace is not 1");
  if (ops::eigh(rho).values(0) < -1e-12) throw PreconditionError("scenario: rho0 is not positive semidefinite");
  const ops::Subspace dfs = common_eigenspace(scenario.path.eval(0.0), rel_tol);
  const Matrix outside = ops::identity(n) - dfs.projector();
  if ((outside * rho).norm() > 1e-10) throw PreconditionError("scenario: rho0 is not supported on K(0)");
}

Vector dark_state_vector(double theta, double s) {
  Vector d(2);
  d << -std::exp(Complex(0.0, -2.0 * kPi * s)) * std::sin(theta), std::cos(theta);
  return d;
}

Scenario scenario_dark_state(double theta, double kappa) {
  if (!(theta > 0.0 && theta < kPi / 2.0)) {
    throw DfsError("scenario_dark_state: theta must lie in (0, pi/2); the endpoints are a DFS dimension jump");
  }
  if (!(kappa > 0.0)) throw PreconditionError("scenario_dark_state: kappa must be positive");
  auto bright = [theta](double s) {
    Vector b(2);
    b << std::cos(theta), std::exp(Complex(0.0, 2.0 * kPi * s)) * std::sin(theta);
    return b;
  };
  auto evaluator = [bright, kappa](double s) { return pumped_pair(bright(s), kappa); };
  ReservoirPath path("dark_state", 3, 2, evaluator, true);

  const Vector d0 = pad_excited(dark_state_vector(theta, 0.0));
  Scenario scenario{"dark_state", std::move(path), projector_of(d0), {}, {}, kappa};
  scenario.expected.abelian_phase = ops::wrap_phase(2.0 * kPi * std::sin(theta) * std::sin(theta));
  scenario.dark_frame = [theta](double s) -> Matrix { return pad_excited(dark_state_vector(theta, s)); };
  validate_scenario(scenario);
  return scenario;
}

Vector tripod_bright_state(const LoopPoint& p) {
  Vector b(3);
  b << std::sin(p.theta) * std::cos(p.phi), std::exp(Complex(0.0, p.chi)) * std::sin(p.theta) * std::sin(p.phi),
      std::cos(p.theta);
  return b;
}

Matrix tripod_dark_pair(const LoopPoint& p) {
  const Complex phase = std::exp(Complex(0.0, p.chi));
  Matrix d(3, 2);
  d(0, 0) = -std::sin(p.phi);
  d(1, 0) = phase * std::cos(p.phi);
  d(2, 0) = 0.0;
  d(0, 1) = std::cos(p.theta) * std::cos(p.phi);
  d(1, 1) = phase * std::cos(p.theta) * std::sin(p.phi);
  d(2, 1) = -std::sin(p.theta);
  return d;
}

namespace {

TripodLoop parametric_loop(std::string name, std::function<LoopPoint(double)> params) {
  auto bright = [params](double s) { return tripod_bright_state(params(s)); };
  return TripodLoop{std::move(name), bright, std::move(params)};
}

}  // namespace

TripodLoop constant_loop(double theta, double phi) {
  return parametric_loop("constant", [theta, phi](double) { return LoopPoint{theta, phi, 0.0}; });
}

TripodLoop phi_circle(double theta, double chi) {
  return parametric_loop("phi_circle", [theta, chi](double s) { return LoopPoint{theta, 2.0 * kPi * s, chi}; });
}

TripodLoop ellipse_loop(double theta0, double dtheta, double dphi, double chi) {
  return parametric_loop("ellipse", [=](double s) {
    return LoopPoint{theta0 + dtheta * std::sin(2.0 * kPi * s), dphi * (1.0 - std::cos(2.0 * kPi * s)), chi};
  });
}

TripodLoop tabulated_loop(std::vector<LoopPoint> samples) {
  if (samples.size() < 4) throw PreconditionError("tabulated_loop: need at least 3 distinct points plus closure");
  for (const LoopPoint& p : samples) {
    if (!std::isfinite(p.theta) || !std::isfinite(p.phi) || !std::isfinite(p.chi)) {
      throw PreconditionError("tabulated_loop: non-finite loop point");
    }
  }
  const Vector first = tripod_bright_state(samples.front());
  const Vector last = tripod_bright_state(samples.back());
  if ((first - last).norm() > 1e-8) throw PreconditionError("tabulated_loop: loop not closed within 1e-8");
  samples.pop_back();

  const auto m = static_cast<Index>(samples.size());
  Matrix values(3, m);
  for (Index j = 0; j < m; ++j) values.col(j) = tripod_bright_state(samples[static_cast<std::size_t>(j)]);
  // DFT coefficients, frequency k stored at column k + m/2 for k in
  // [-m/2, (m-1)/2].
  const Index kmin = -(m / 2);
  const Index kmax = (m - 1) / 2;
  Matrix coeffs = Matrix::Zero(3, m);
  for (Index k = kmin; k <= kmax; ++k) {
    for (Index j = 0; j < m; ++j) {
      const double angle = -2.0 * kPi * static_cast<double>(k * j) / static_cast<double>(m);
      coeffs.col(k - kmin) += values.col(j) * std::exp(Complex(0.0, angle));
    }
    coeffs.col(k - kmin) /= static_cast<double>(m);
  }
  const bool even = (m % 2 == 0);
  auto bright = [coeffs, kmin, kmax, even](double s) {
    Vector v = Vector::Zero(3);
    for (Index k = kmin; k <= kmax; ++k) {
      const Vector c = coeffs.col(k - kmin);
      if (even && k == kmin) {
        // Nyquist term split symmetrically so the interpolant stays smooth.
        v += c * std::cos(2.0 * kPi * static_cast<double>(k) * s);
      } else {
        v += c * std::exp(Complex(0.0, 2.0 * kPi * static_cast<double>(k) * s));
      }
    }
    return Vector(v / v.norm());
  };
  return TripodLoop{"tabulated", bright, {}};
}

Scenario scenario_tripod(const TripodLoop& loop, double kappa) {
  if (!(kappa > 0.0)) throw PreconditionError("scenario_tripod: kappa must be positive");
  if (!loop.bright) throw PreconditionError("scenario_tripod: loop has no bright-state function");
  if ((projector_of(loop.bright(1.0)) - projector_of(loop.bright(0.0))).norm() > 1e-8) {
    throw PreconditionError("scenario_tripod: loop not closed within 1e-8");
  }
  if (loop.parameters) {
    for (int j = 0; j <= 256; ++j) {
      const double theta = loop.parameters(j / 256.0).theta;
      if (std::sin(theta) < 1e-3) {
        throw DfsError("scenario_tripod: theta must stay bounded away from 0 and pi");
      }
    }
  }
  auto bright = loop.bright;
  auto evaluator = [bright, kappa](double s) { return pumped_pair(bright(s), kappa); };
  ReservoirPath path("tripod_" + loop.name, 4, 2, evaluator, true);

  Scenario scenario{"tripod_" + loop.name, std::move(path), Matrix(), {}, {}, kappa};
  Vector first_dark;
  if (loop.parameters) {
    auto params = loop.parameters;
    scenario.dark_frame = [params](double s) -> Matrix {
      Matrix frame = Matrix::Zero(4, 2);
      frame.topRows(3) = tripod_dark_pair(params(s));
      return frame;
    };
    first_dark = scenario.dark_frame(0.0).col(0);
    const LoopPoint p0 = params(0.0);
    bool constant = true;
    for (int j = 1; j <= 64 && constant; ++j) {
      const LoopPoint p = params(j / 64.0);
      constant = std::abs(p.theta - p0.theta) < 1e-15 && std::abs(p.phi - p0.phi) < 1e-15 &&
                 std::abs(p.chi - p0.chi) < 1e-15;
    }
    scenario.expected.trivial = constant;
  } else {
    first_dark = common_eigenspace(scenario.path.eval(0.0)).basis().col(0);
  }
  scenario.rho0 = projector_of(first_dark);
  validate_scenario(scenario);
  return scenario;
}

Scenario scenario_static(std::vector<Matrix> gammas, std::vector<Complex> cs) {
  if (gammas.empty()) throw PreconditionError("scenario_static: at least one operator required");
  const Index n = gammas.front().rows();
  for (const Matrix& g : gammas) ops::require_square(g, "scenario_static operator");
  for (const Matrix& g : gammas) {
    if (g.rows() != n) throw PreconditionError("scenario_static: operators have different dimensions");
  }
  if (cs.empty()) cs.assign(gammas.size(), 0.0);
  if (cs.size() != gammas.size()) throw PreconditionError("scenario_static: one eigenvalue c_k per operator");

  LindbladSample sample{std::move(gammas), std::move(cs)};
  const ops::Subspace dfs = common_eigenspace(sample);
  if (dfs.dim() == 0) throw DfsError("scenario_static: empty common eigenspace");
  auto evaluator = [sample](double) { return sample; };
  auto zero_derivative = [sample](double) {
    LindbladSample d = sample;
    for (Matrix& g : d.gammas) g.setZero();
    for (Complex& c : d.cs) c = 0.0;
    return d;
  };
  ReservoirPath path("static", n, sample.gammas.size(), evaluator, true, kDefaultFdStep, zero_derivative);

  const Vector v = dfs.basis().col(0);
  Scenario scenario{"static", std::move(path), projector_of(v), {}, {}, std::nullopt};
  scenario.expected.trivial = true;
  const Matrix basis = dfs.basis();
  scenario.dark_frame = [basis](double) { return basis; };
  validate_scenario(scenario);
  return scenario;
}

}  // namespace holodyn
