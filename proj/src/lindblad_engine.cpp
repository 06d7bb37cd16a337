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

#include "holodyn/lindblad_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "holodyn/errors.hpp"

namespace holodyn {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Matrix clamp_sqrt(const Matrix& rho) {
  const ops::HermitianEigen e = ops::eigh(rho);
  const double floor = 1e-14 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
  RealVector r = RealVector::Zero(e.values.size());
  for (Index i = 0; i < r.size(); ++i) {
    if (e.values(i) > floor) r(i) = std::sqrt(e.values(i));
  }
  return e.vectors * r.asDiagonal() * e.vectors.adjoint();
}

}  // namespace

Matrix lindblad_rhs(const LindbladSample& sample, const Matrix& rho, const Matrix* h) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  if (h) out -= kI * (*h * rho - rho * *h);
  for (const Matrix& g : sample.gammas) {
    const Matrix gdg = g.adjoint() * g;
    out -= gdg * rho + rho * gdg - 2.0 * g * rho * g.adjoint();
  }
  return out;
}

Matrix lindblad_superop(const LindbladSample& sample, const Matrix* h) {
  const Index n = sample.gammas.front().rows();
  Matrix m = Matrix::Zero(n * n, n * n);
  if (h) m -= kI * (ops::left(*h) - ops::right(*h));
  for (const Matrix& g : sample.gammas) {
    const Matrix gdg = g.adjoint() * g;
    m -= ops::left(gdg) + ops::right(gdg) - 2.0 * ops::sandwich(g, g.adjoint());
  }
  return m;
}

double rate_scale(const ReservoirPath& path, const Matrix* h) {
  double rate = h ? ops::spectral_norm(*h) : 0.0;
  for (int j = 0; j < 16; ++j) {
    const DOperator d = build_D(path.eval(j / 15.0));
    rate = std::max(rate, ops::eigh(d.P).values.maxCoeff());
  }
  return rate;
}

Trajectory integrate(const ReservoirPath& path, const Matrix& rho0, double T, int steps,
                     const std::optional<Matrix>& h, const IntegrateOptions& options) {
  const Index n = path.dim();
  if (rho0.rows() != n || rho0.cols() != n) throw PreconditionError("integrate: rho0 has the wrong dimension");
  if (ops::hermiticity_defect(rho0) > 1e-12 || std::abs(rho0.trace() - Complex(1.0)) > 1e-12 ||
      ops::eigh(rho0).values(0) < -1e-12) {
    throw PreconditionError("integrate: rho0 is not a density matrix");
  }
  if (!(T > 0.0)) throw PreconditionError("integrate: T must be positive");
  if (steps < 1) throw PreconditionError("integrate: steps must be positive");
  const Matrix* hp = h ? &*h : nullptr;
  if (hp && (hp->rows() != n || ops::hermiticity_defect(*hp) > 1e-12)) {
    throw PreconditionError("integrate: H must be Hermitian of the system dimension");
  }
  const double rate = rate_scale(path, hp);
  const double ratio = rate * T / steps;
  if (ratio > options.stability_limit) {
    throw PreconditionError("stability guard: rate*T/steps = " + fmt(ratio) + " exceeds " +
                            fmt(options.stability_limit) + "; increase steps to at least " +
                            fmt(std::ceil(rate * T / options.stability_limit)));
  }

  const Index k = common_eigenspace(path.eval(0.0)).dim();
  const int stride = std::max(1, (steps + options.stored_points - 1) / options.stored_points);

  Trajectory traj;
  traj.T = T;
  traj.steps = steps;
  traj.dfs_dim = k;
  auto store = [&](double s, const Matrix& rho) {
    traj.grid.push_back(s);
    traj.states.push_back(rho);
    traj.trace_defect.push_back(std::abs(rho.trace() - Complex(1.0)));
    traj.min_eig.push_back(ops::eigh(rho).values(0));
    traj.purity.push_back(std::real((rho * rho).trace()));
    double pop = 0.0;
    if (k > 0) pop = std::real((dfs_projector(path, s, k) * rho).trace());
    traj.dfs_pop.push_back(pop);
  };

  const double dt = T / steps;
  Matrix rho = rho0;
  store(0.0, rho);
  LindbladSample start = path.eval(0.0);
  for (int j = 0; j < steps; ++j) {
    const double s_mid = (j + 0.5) / steps;
    const double s_end = (j + 1 == steps) ? 1.0 : static_cast<double>(j + 1) / steps;
    const LindbladSample mid = path.eval(s_mid);
    LindbladSample end = path.eval(s_end);
    const Matrix k1 = lindblad_rhs(start, rho, hp);
    const Matrix k2 = lindblad_rhs(mid, rho + 0.5 * dt * k1, hp);
    const Matrix k3 = lindblad_rhs(mid, rho + 0.5 * dt * k2, hp);
    const Matrix k4 = lindblad_rhs(end, rho + dt * k3, hp);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.max_hermiticity_defect = std::max(traj.max_hermiticity_defect, ops::hermiticity_defect(rho));
    rho = ops::hermitian_part(rho);
    const double tr_defect = std::abs(rho.trace() - Complex(1.0));
    traj.max_trace_defect = std::max(traj.max_trace_defect, tr_defect);
    if (!(tr_defect <= options.trace_abort)) {
      throw InvariantError("integrate: trace defect " + fmt(tr_defect) + " at s = " + fmt(s_end));
    }
    if ((j + 1) % stride == 0 || j + 1 == steps) store(s_end, rho);
    start = std::move(end);
  }
  return traj;
}

TrajectoryCheck check_trajectory(const Trajectory& traj) {
  TrajectoryCheck c;
  c.max_trace_defect = traj.max_trace_defect;
  c.min_eigenvalue = traj.min_eig.empty() ? 0.0 : *std::min_element(traj.min_eig.begin(), traj.min_eig.end());
  c.max_purity = traj.purity.empty() ? 0.0 : *std::max_element(traj.purity.begin(), traj.purity.end());
  for (double d : traj.trace_defect) c.max_trace_defect = std::max(c.max_trace_defect, d);
  c.ok = c.max_trace_defect <= 1e-9 && c.min_eigenvalue >= -1e-8 && c.max_purity <= 1.0 + 1e-9;
  return c;
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw PreconditionError("fidelity: dimension mismatch");
  }
  const Matrix r = clamp_sqrt(rho);
  const ops::HermitianEigen e = ops::eigh(r * sigma * r);
  // Round-off eigenvalues of a rank-deficient product would enter as sqrt(eps).
  const double floor = 1e-14 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
  double f = 0.0;
  for (Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) > floor) f += std::sqrt(e.values(i));
  }
  return f * f;
}

std::vector<OverlapPoint> dfs_overlap(const Trajectory& traj, const FrameChain& chain, const Matrix& rho0) {
  const int steps = chain.steps();
  if (steps < 1) throw PreconditionError("dfs_overlap: empty frame chain");
  const Matrix& b0 = chain.dfs0.basis();
  const Matrix rho_k = b0.adjoint() * rho0 * b0;
  std::vector<OverlapPoint> out;
  out.reserve(traj.grid.size());
  for (std::size_t i = 0; i < traj.grid.size(); ++i) {
    const double s = traj.grid[i];
    const long j = std::lround(s * steps);
    if (j < 0 || j > steps || std::abs(chain.frames[static_cast<std::size_t>(j)].s - s) > 1e-12) {
      throw PreconditionError("dfs_overlap: trajectory grid point s = " + fmt(s) + " is not on the frame grid");
    }
    const DFSFrame& f = chain.frames[static_cast<std::size_t>(j)];
    const Matrix u = f.O * b0 * f.W;
    const Matrix ref = u * rho_k * u.adjoint();
    const Matrix block = f.Pi() * traj.states[i] * f.Pi();
    OverlapPoint p;
    p.s = s;
    p.population = std::real(block.trace());
    p.fidelity = fidelity(block, ref);
    p.block_fidelity = p.population > 0.0 ? fidelity(block / p.population, ref) : 0.0;
    out.push_back(p);
  }
  return out;
}

void write_trajectory_csv(const std::string& file, const Trajectory& traj, const std::vector<OverlapPoint>& overlap) {
  if (!overlap.empty() && overlap.size() != traj.grid.size()) {
    throw PreconditionError("write_trajectory_csv: overlap series does not match the trajectory");
  }
  std::ofstream os(file);
  if (!os) throw PreconditionError("cannot open " + file + " for writing");
  os << "s,trace,min_eig,dfs_pop,fidelity\n";
  char buf[160];
  for (std::size_t i = 0; i < traj.grid.size(); ++i) {
    const double tr = std::real(traj.states[i].trace());
    const double fid = overlap.empty() ? std::nan("") : overlap[i].fidelity;
    std::snprintf(buf, sizeof buf, "%.6f,%.15e,%.15e,%.15e,%.15e\n", traj.grid[i], tr, traj.min_eig[i],
                  traj.dfs_pop[i], fid);
    os << buf;
  }
}

}  // namespace holodyn
