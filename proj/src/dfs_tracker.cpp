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

#include "holodyn/dfs_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include <Eigen/SVD>

#include "holodyn/errors.hpp"

namespace holodyn {
namespace {

std::string fmt_s(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", s);
  return buf;
}

Matrix checked_gauge(const GaugeProvider& gauge, double s, const Matrix& pi) {
  const Index n = pi.rows();
  if (!gauge) return Matrix::Zero(n, n);
  Matrix q = gauge(s, pi);
  if (q.rows() != n || q.cols() != n || !ops::all_finite(q)) {
    throw PreconditionError("gauge provider returned a malformed Q at s = " + fmt_s(s));
  }
  const double scale = std::max(1.0, q.norm());
  if (ops::hermiticity_defect(q) > 1e-12 * scale) {
    throw PreconditionError("gauge provider returned a non-Hermitian Q at s = " + fmt_s(s));
  }
  const Matrix perp = ops::identity(n) - pi;
  if ((pi * q * perp).norm() > 1e-12 * scale) {
    throw PreconditionError("gauge provider returned a Q that mixes K and its complement at s = " + fmt_s(s));
  }
  return q;
}

// Moore-Penrose inverse of a Hermitian positive semidefinite matrix whose
// kernel has dimension dim.
Matrix psd_pseudo_inverse(const Matrix& p, Index dim) {
  const ops::HermitianEigen e = ops::eigh(p);
  const Index n = p.rows();
  Matrix inv = Matrix::Zero(n, n);
  for (Index i = dim; i < n; ++i) {
    inv += e.vectors.col(i) * e.vectors.col(i).adjoint() / e.values(i);
  }
  return inv;
}

}  // namespace

DOperator build_D(const std::vector<Matrix>& gammas, const std::vector<Complex>& cs) {
  if (gammas.size() != cs.size()) {
    throw PreconditionError("build_D: " + std::to_string(gammas.size()) + " operators but " +
                            std::to_string(cs.size()) + " eigenvalues");
  }
  if (gammas.empty()) throw PreconditionError("build_D: no operators");
  const Index n = gammas.front().rows();
  Matrix d = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const Matrix& g = gammas[k];
    if (g.rows() != n || g.cols() != n) throw PreconditionError("build_D: inconsistent operator dimensions");
    d += g.adjoint() * g - 2.0 * std::conj(cs[k]) * g + std::norm(cs[k]) * ops::identity(n);
  }
  return {d, ops::hermitian_part(d)};
}

DOperator build_D(const LindbladSample& sample) { return build_D(sample.gammas, sample.cs); }

InstantaneousDfs instantaneous_dfs(const LindbladSample& sample, const DfsOptions& options) {
  const DOperator d = build_D(sample);
  const Index n = d.D.rows();
  ops::Subspace dfs = ops::nullspace(d.D, options.rel_tol);
  if (dfs.dim() == 0) throw DfsError("no decoherence-free subspace: D has an empty kernel");

  const double d_scale = std::max(1.0, ops::spectral_norm(d.D));
  if ((d.D * dfs.basis()).norm() > options.consistency_tol * d_scale) {
    throw InvariantError("D Pi = 0 violated beyond tolerance");
  }
  for (std::size_t k = 0; k < sample.gammas.size(); ++k) {
    const Matrix& g = sample.gammas[k];
    const double scale = std::max({1.0, ops::spectral_norm(g), std::abs(sample.cs[k])});
    const Matrix residual = g * dfs.basis() - sample.cs[k] * dfs.basis();
    if (residual.norm() > options.consistency_tol * scale) {
      throw DfsError("kernel of D is larger than the common eigenspace of the Lindblad operators "
                     "(inconsistent c_k for operator " + std::to_string(k) + ")");
    }
  }

  InstantaneousDfs out;
  const ops::HermitianEigen e = ops::eigh(d.P);
  out.max_rate = e.values(n - 1);
  if (dfs.dim() == n) {
    out.gap = 0.0;
  } else {
    const ops::Subspace perp = dfs.complement();
    const ops::HermitianEigen ep = ops::eigh(ops::block(d.P, perp, perp));
    out.gap = ep.values(0);
    if (!(out.gap > options.gap_floor_ratio * out.max_rate)) {
      throw DfsError("spectral gap " + fmt_s(out.gap) + " below floor " +
                     fmt_s(options.gap_floor_ratio * out.max_rate) + " (gap hypothesis violated)");
    }
  }
  out.dfs = std::move(dfs);
  return out;
}

InstantaneousDfs instantaneous_dfs(const ReservoirPath& path, double s, const DfsOptions& options) {
  try {
    return instantaneous_dfs(path.eval(s), options);
  } catch (const DfsError& e) {
    throw DfsError(std::string(e.what()) + " at s = " + fmt_s(s));
  }
}

Matrix dfs_projector(const ReservoirPath& path, double s, Index dim) {
  const DOperator d = build_D(path.eval(s));
  Eigen::JacobiSVD<Matrix> svd(d.D, Eigen::ComputeFullV);
  const Matrix v = svd.matrixV().rightCols(dim);
  return v * v.adjoint();
}

Matrix projector_derivative(const ReservoirPath& path, double s, Index dim) {
  if (path.has_analytic_derivative()) {
    const LindbladSample sample = path.eval(s);
    const LindbladSample ds = path.derivative(s);
    const Index n = path.dim();
    Matrix p = Matrix::Zero(n, n);
    Matrix dp = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < sample.gammas.size(); ++k) {
      const Matrix a = sample.gammas[k] - sample.cs[k] * ops::identity(n);
      const Matrix da = ds.gammas[k] - ds.cs[k] * ops::identity(n);
      p += a.adjoint() * a;
      dp += da.adjoint() * a + a.adjoint() * da;
    }
    const Matrix pinv = psd_pseudo_inverse(p, dim);
    const Matrix pi = dfs_projector(path, s, dim);
    return -(pi * dp * pinv + pinv * dp * pi);
  }
  const double h = path.fd_step();
  if (s - h >= 0.0 && s + h <= 1.0) {
    return (dfs_projector(path, s + h, dim) - dfs_projector(path, s - h, dim)) / (2.0 * h);
  }
  if (s - h < 0.0) {
    return (-1.5 * dfs_projector(path, s, dim) + 2.0 * dfs_projector(path, s + h, dim) -
            0.5 * dfs_projector(path, s + 2.0 * h, dim)) / h;
  }
  return (1.5 * dfs_projector(path, s, dim) - 2.0 * dfs_projector(path, s - h, dim) +
          0.5 * dfs_projector(path, s - 2.0 * h, dim)) / h;
}

GaugeProvider zero_gauge() {
  return [](double, const Matrix& pi) { return Matrix(Matrix::Zero(pi.rows(), pi.cols())); };
}

GaugeProvider block_gauge(Matrix q, std::function<double(double)> profile) {
  if (ops::hermiticity_defect(q) > 1e-12 * std::max(1.0, q.norm())) {
    throw PreconditionError("block_gauge: q must be Hermitian");
  }
  return [q = ops::hermitian_part(q), profile](double s, const Matrix& pi) {
    const Matrix perp = ops::identity(pi.rows()) - pi;
    const double f = profile ? profile(s) : 1.0;
    return Matrix(ops::hermitian_part(f * (pi * q * pi + perp * q * perp)));
  };
}

namespace {

Matrix transport_generator(const ReservoirPath& path, double s, const Matrix& pi, Index dim,
                           const GaugeProvider& gauge, Matrix* q_out) {
  const Matrix dpi = projector_derivative(path, s, dim);
  Matrix q = checked_gauge(gauge, s, pi);
  Matrix g = kI * ops::commutator(dpi, pi) + q;
  if (q_out) *q_out = std::move(q);
  return ops::hermitian_part(g);
}

}  // namespace

FrameChain transport_frame(const ReservoirPath& path, const TransportOptions& options) {
  if (options.steps < 100) throw PreconditionError("transport_frame: steps must be at least 100");
  const int steps = options.steps;
  const double ds = 1.0 / steps;
  const Index n = path.dim();

  InstantaneousDfs first = instantaneous_dfs(path, 0.0, options.dfs);
  const Index k = first.dfs.dim();
  if (k == n) throw DfsError("decoherence-free subspace is the whole space: nothing to transport");

  FrameChain chain;
  chain.dfs0 = first.dfs;
  chain.min_gap = first.gap;
  chain.max_rate = first.max_rate;
  chain.frames.reserve(static_cast<std::size_t>(steps) + 1);

  const Matrix& basis0 = first.dfs.basis();
  const Matrix pi0 = first.dfs.projector();
  auto dfs_block = [&](const DFSFrame& f) {
    return Matrix(basis0.adjoint() * f.O.adjoint() * f.G * f.O * basis0);
  };

  DFSFrame f0;
  f0.s = 0.0;
  f0.dfs = first.dfs;
  f0.gap = first.gap;
  f0.O = ops::identity(n);
  f0.G = transport_generator(path, 0.0, f0.Pi(), k, options.gauge, &f0.Q);
  f0.W = ops::identity(k);
  chain.frames.push_back(std::move(f0));

  for (int j = 0; j < steps; ++j) {
    const DFSFrame& prev = chain.frames.back();
    const double mid = (j + 0.5) * ds;
    const double s = (j + 1 == steps) ? 1.0 : (j + 1) * ds;

    const Matrix pi_mid = dfs_projector(path, mid, k);
    const Matrix g_mid = transport_generator(path, mid, pi_mid, k, options.gauge, nullptr);

    InstantaneousDfs inst = instantaneous_dfs(path, s, options.dfs);
    if (inst.dfs.dim() != k) {
      throw DfsError("DFS dimension jump from " + std::to_string(k) + " to " + std::to_string(inst.dfs.dim()) +
                     " at s = " + fmt_s(s));
    }
    DFSFrame f;
    f.s = s;
    f.dfs = inst.dfs.aligned_to(prev.dfs);
    f.gap = inst.gap;
    f.O = ops::polar_unitary(ops::matexp(g_mid, Complex(0.0, -ds)) * prev.O);
    f.G = transport_generator(path, s, f.Pi(), k, options.gauge, &f.Q);
    const Matrix gdf = 0.5 * (dfs_block(prev) + dfs_block(f));
    f.W = ops::polar_unitary(ops::matexp(ops::hermitian_part(gdf), Complex(0.0, ds)) * prev.W);
    f.rigidity_defect = (f.O.adjoint() * f.Pi() * f.O - pi0).norm();

    chain.min_gap = std::min(chain.min_gap, f.gap);
    chain.max_rate = std::max(chain.max_rate, inst.max_rate);
    chain.max_rigidity_defect = std::max(chain.max_rigidity_defect, f.rigidity_defect);
    chain.max_unitarity_defect = std::max(chain.max_unitarity_defect, ops::unitarity_defect(f.O));
    if (f.rigidity_defect > options.rigidity_tol) {
      throw InvariantError("frame rigidity defect " + fmt_s(f.rigidity_defect) + " exceeds " +
                           fmt_s(options.rigidity_tol) + " at s = " + fmt_s(s) + "; refine the transport grid");
    }
    chain.frames.push_back(std::move(f));
  }
  return chain;
}

Matrix g_bar(const DFSFrame& frame) { return frame.O.adjoint() * frame.G * frame.O; }

Matrix rotated_projector(const DFSFrame& frame) { return frame.O.adjoint() * frame.Pi() * frame.O; }

Matrix g_off(const DFSFrame& frame) {
  const Matrix pibar = rotated_projector(frame);
  const Matrix perp = ops::identity(pibar.rows()) - pibar;
  return perp * g_bar(frame) * pibar;
}

Matrix in_dfs_generator(const DFSFrame& frame) {
  const Matrix pibar = rotated_projector(frame);
  return pibar * g_bar(frame) * pibar;
}

}  // namespace holodyn
