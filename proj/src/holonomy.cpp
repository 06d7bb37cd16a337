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

#include "holodyn/holonomy.hpp"

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

HolonomyResult finish(const Matrix& compressed, const Matrix& basis0, std::string id, int steps) {
  HolonomyResult r;
  r.raw_unitarity_defect = ops::unitarity_defect(compressed);
  r.U = ops::polar_unitary(compressed);
  r.unitarity_defect = ops::unitarity_defect(r.U);
  r.phases = ops::eigenphases(r.U);
  r.basis0 = basis0;
  r.loop_id = std::move(id);
  r.steps = steps;
  return r;
}

Matrix start_basis(const ops::Subspace& dfs0, const std::optional<Matrix>& reference) {
  if (!reference) return dfs0.basis();
  if (reference->rows() != dfs0.ambient_dim() || reference->cols() != dfs0.dim()) {
    throw PreconditionError("reference basis does not match K(0)");
  }
  const ops::Subspace ref(*reference);
  if ((ref.projector() - dfs0.projector()).norm() > 1e-8) {
    throw PreconditionError("reference basis does not span K(0)");
  }
  return *reference;
}

}  // namespace

HolonomyResult wilson_loop(const ReservoirPath& path, int steps, const WilsonOptions& options) {
  if (steps < 500) throw PreconditionError("wilson_loop: steps must be at least 500");
  const InstantaneousDfs first = instantaneous_dfs(path, 0.0, options.dfs);
  const Index k = first.dfs.dim();
  const Index n = path.dim();
  const Matrix pi_end = dfs_projector(path, 1.0, k);
  if ((pi_end - first.dfs.projector()).norm() > options.closure_tol) {
    throw PreconditionError("wilson_loop: open path, ||Pi(1) - Pi(0)|| = " +
                            fmt((pi_end - first.dfs.projector()).norm()));
  }
  const double ds = 1.0 / steps;
  Matrix v = ops::identity(n);
  for (int j = 0; j < steps; ++j) {
    const double m = (j + 0.5) * ds;
    const Index dim = instantaneous_dfs(path, (j + 1) * ds > 1.0 ? 1.0 : (j + 1) * ds, options.dfs).dfs.dim();
    if (dim != k) throw DfsError("wilson_loop: DFS dimension jump at s = " + fmt((j + 1) * ds));
    const Matrix pi = dfs_projector(path, m, k);
    const Matrix dpi = projector_derivative(path, m, k);
    v = ops::matexp(ops::commutator(dpi, pi), ds) * v;
  }
  v = ops::polar_unitary(v);
  const Matrix b0 = start_basis(first.dfs, options.reference_basis);
  return finish(b0.adjoint() * v * b0, b0, path.name(), steps);
}

BasisChain basis_chain(const FrameFunction& frame, int steps) {
  if (!frame) throw PreconditionError("basis_chain: no frame function");
  if (steps < 2) throw PreconditionError("basis_chain: need at least 2 steps");
  BasisChain c;
  for (int j = 0; j <= steps; ++j) {
    const double s = j == steps ? 1.0 : static_cast<double>(j) / steps;
    c.s.push_back(s);
    c.bases.push_back(frame(s));
  }
  return c;
}

BasisChain basis_chain(const FrameChain& chain) {
  BasisChain c;
  for (const DFSFrame& f : chain.frames) {
    c.s.push_back(f.s);
    c.bases.push_back(f.dfs.basis());
  }
  return c;
}

std::vector<Matrix> connection(const BasisChain& chain) {
  const std::size_t m = chain.bases.size();
  if (m < 3 || chain.s.size() != m) throw PreconditionError("connection: need at least 3 basis samples");
  std::vector<Matrix> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Matrix db;
    if (j == 0) {
      const double h = chain.s[1] - chain.s[0];
      db = (-1.5 * chain.bases[0] + 2.0 * chain.bases[1] - 0.5 * chain.bases[2]) / h;
    } else if (j + 1 == m) {
      const double h = chain.s[m - 1] - chain.s[m - 2];
      db = (1.5 * chain.bases[m - 1] - 2.0 * chain.bases[m - 2] + 0.5 * chain.bases[m - 3]) / h;
    } else {
      db = (chain.bases[j + 1] - chain.bases[j - 1]) / (chain.s[j + 1] - chain.s[j - 1]);
    }
    Matrix a = -(chain.bases[j].adjoint() * db);
    const double defect = (a + a.adjoint()).norm();
    if (defect > 1e-6) {
      throw PreconditionError("connection: anti-Hermiticity defect " + fmt(defect) + " at s = " +
                              fmt(chain.s[j]) + "; basis grid too coarse");
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Matrix> connection_components(const std::function<Matrix(const std::vector<double>&)>& basis,
                                          const std::vector<double>& lambda, double h) {
  const Matrix b = basis(lambda);
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    std::vector<double> up = lambda;
    std::vector<double> down = lambda;
    up[i] += h;
    down[i] -= h;
    const Matrix db = (basis(up) - basis(down)) / (2.0 * h);
    Matrix a = -(b.adjoint() * db);
    const double defect = (a + a.adjoint()).norm();
    if (defect > 1e-6) throw PreconditionError("connection_components: anti-Hermiticity defect " + fmt(defect));
    out.push_back(std::move(a));
  }
  return out;
}

Matrix path_ordered_exp(const std::vector<Matrix>& a, const std::vector<double>& s) {
  if (a.size() != s.size() || a.empty()) throw PreconditionError("path_ordered_exp: mismatched grid");
  Matrix u = ops::identity(a.front().rows());
  for (std::size_t j = 0; j + 1 < a.size(); ++j) {
    u = ops::matexp(0.5 * (a[j] + a[j + 1]), s[j + 1] - s[j]) * u;
  }
  return u;
}

HolonomyResult holonomy_from_connection(const BasisChain& chain) {
  const std::vector<Matrix> a = connection(chain);
  const Matrix& b0 = chain.bases.front();
  const Matrix& b1 = chain.bases.back();
  const Matrix u = b0.adjoint() * b1 * path_ordered_exp(a, chain.s);
  return finish(u, b0, "connection", static_cast<int>(chain.s.size()) - 1);
}

HolonomyResult frame_holonomy(const ReservoirPath& path, const TransportOptions& options,
                              const std::optional<Matrix>& reference_basis) {
  const FrameChain chain = transport_frame(path, options);
  const DFSFrame& last = chain.frames.back();
  if ((last.Pi() - chain.dfs0.projector()).norm() > 1e-8) throw PreconditionError("frame_holonomy: open path");
  const Matrix& native = chain.dfs0.basis();
  const Matrix u_native = native.adjoint() * last.O * native * last.W;
  const Matrix b0 = start_basis(chain.dfs0, reference_basis);
  const Matrix change = native.adjoint() * b0;  // native coordinates of b0
  return finish(change.adjoint() * u_native * change, b0, path.name(), options.steps);
}

GaugeCheck gauge_invariance_check(const ReservoirPath& path, const GaugeProvider& q1, const GaugeProvider& q2,
                                  int steps) {
  const HolonomyResult w = wilson_loop(path, steps);
  TransportOptions o1;
  o1.steps = steps;
  o1.gauge = q1;
  TransportOptions o2 = o1;
  o2.gauge = q2;
  const HolonomyResult r1 = frame_holonomy(path, o1, w.basis0);
  const HolonomyResult r2 = frame_holonomy(path, o2, w.basis0);
  GaugeCheck c;
  c.max_discrepancy = std::max({(r1.U - r2.U).norm(), (r1.U - w.U).norm(), (r2.U - w.U).norm()});
  for (std::size_t i = 0; i < w.phases.size(); ++i) {
    c.phase_discrepancy = std::max({c.phase_discrepancy, ops::phase_distance(r1.phases[i], w.phases[i]),
                                    ops::phase_distance(r2.phases[i], w.phases[i])});
  }
  return c;
}

Commutator noncommutativity(const ReservoirPath& path_a, const ReservoirPath& path_b, int steps) {
  const Matrix pa = common_eigenspace(path_a.eval(0.0)).projector();
  const Matrix pb = common_eigenspace(path_b.eval(0.0)).projector();
  if (pa.rows() != pb.rows() || (pa - pb).norm() > 1e-8) {
    throw PreconditionError("noncommutativity: loops do not share K(0)");
  }
  Commutator c;
  c.a = wilson_loop(path_a, steps);
  WilsonOptions ob;
  ob.reference_basis = c.a.basis0;
  c.b = wilson_loop(path_b, steps, ob);
  c.norm = (c.a.U * c.b.U - c.b.U * c.a.U).norm();
  return c;
}

void write_holonomy_csv(const std::string& file, const std::vector<HolonomyResult>& results) {
  Index d = 0;
  for (const HolonomyResult& r : results) d = std::max(d, r.dim_dfs());
  std::ofstream os(file);
  if (!os) throw PreconditionError("cannot open " + file + " for writing");
  os << "loop_id,dim_dfs";
  for (Index i = 1; i <= d; ++i) os << ",phase_" << i;
  os << ",unitarity_defect\n";
  char buf[64];
  for (const HolonomyResult& r : results) {
    os << r.loop_id << ',' << r.dim_dfs();
    for (Index i = 0; i < d; ++i) {
      os << ',';
      if (i < r.dim_dfs()) {
        std::snprintf(buf, sizeof buf, "%.12f", r.phases[static_cast<std::size_t>(i)]);
        os << buf;
      }
    }
    std::snprintf(buf, sizeof buf, ",%.3e\n", r.unitarity_defect);
    os << buf;
  }
}

}  // namespace holodyn
