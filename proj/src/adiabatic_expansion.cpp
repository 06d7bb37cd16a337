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

#include "holodyn/adiabatic_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "holodyn/errors.hpp"

namespace holodyn {
namespace {

SuperOperator make_superop(Matrix m, Index dim) { return SuperOperator{dim, std::move(m)}; }

// Superoperator of rho -> -(A rho + rho A^dag) + 2 sum_k L_k rho L_k^dag.
Matrix dissipator(const Matrix& a, const std::vector<Matrix>& ls) {
  Matrix m = -(ops::left(a) + ops::right(a.adjoint()));
  for (const Matrix& l : ls) m += 2.0 * ops::sandwich(l, l.adjoint());
  return m;
}

Matrix hamiltonian_part(const Matrix& h) { return Complex(0.0, -1.0) * (ops::left(h) - ops::right(h)); }

Matrix off_diagonal_blocks(const Matrix& a, const Matrix& pibar) {
  const Matrix perp = ops::identity(pibar.rows()) - pibar;
  return pibar * a * perp + perp * a * pibar;
}

}  // namespace

RotatedOps rotate_ops(const DFSFrame& frame, const std::vector<Matrix>& gammas, const std::vector<Complex>& cs,
                      double gamma_gap) {
  if (!(gamma_gap > 0.0)) throw PreconditionError("rotate_ops: gap bound must be positive");
  if (gammas.size() != cs.size()) throw PreconditionError("rotate_ops: one eigenvalue c_k per operator");
  const Matrix& o = frame.O;
  const Index n = o.rows();
  RotatedOps out;
  const double scale = 1.0 / std::sqrt(gamma_gap);
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    out.gammabars.push_back(scale * (o.adjoint() * gammas[k] * o - cs[k] * ops::identity(n)));
  }
  out.Dbar = o.adjoint() * build_D(gammas, cs).D * o / gamma_gap;
  out.Gbar = g_bar(frame);
  out.Pibar = rotated_projector(frame);
  return out;
}

Matrix dbar_perp_inverse(const Matrix& dbar, const Matrix& pibar) {
  const Index n = pibar.rows();
  const ops::HermitianEigen e = ops::eigh(pibar);
  Index k = 0;
  for (Index i = 0; i < n; ++i) k += e.values(i) > 0.5 ? 1 : 0;
  const Matrix perp_basis = e.vectors.leftCols(n - k);
  const Matrix block = perp_basis.adjoint() * dbar * perp_basis;
  Eigen::JacobiSVD<Matrix> svd(block);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Matrix::Zero(n, n);
  if (!(sv(sv.size() - 1) > 1e-8 * std::max(1.0, sv(0)))) {
    throw PreconditionError("Dbar is singular on the DFS complement (gap hypothesis violated)");
  }
  return perp_basis * block.inverse() * perp_basis.adjoint();
}

Matrix s1_operator(const AdiabaticOrders& orders) {
  const Matrix inv = orders.DbarPerpInv.size() ? orders.DbarPerpInv : dbar_perp_inverse(orders.Dbar, orders.Pibar);
  return orders.Goff.adjoint() * inv - inv * orders.Goff;
}

HTilde htilde_orders(const AdiabaticOrders& orders) {
  const Matrix& pb = orders.Pibar;
  const Matrix perp = ops::identity(pb.rows()) - pb;
  const Matrix& g = orders.Gbar;
  HTilde h;
  h.h0 = Complex(0.0, -1.0) * orders.Dbar;
  h.h1 = -(pb * g * pb) - perp * g * perp;
  const Matrix c = ops::commutator(kI * orders.S1, g);
  h.h2 = -0.5 * (pb * c * pb) - 0.5 * (perp * c * perp);
  return h;
}

AdiabaticOrders build_orders(const DFSFrame& frame, const LindbladSample& sample, double gamma_gap, double eta) {
  if (!(eta > 0.0)) throw PreconditionError("build_orders: eta must be positive");
  const RotatedOps rot = rotate_ops(frame, sample.gammas, sample.cs, gamma_gap);
  AdiabaticOrders o;
  o.s = frame.s;
  o.eta = eta;
  o.Pibar = rot.Pibar;
  o.Gbar = rot.Gbar;
  o.Gammabars = rot.gammabars;
  o.Dbar = rot.Dbar;
  o.Goff = g_off(frame);
  o.DbarPerpInv = dbar_perp_inverse(o.Dbar, o.Pibar);
  o.S1 = s1_operator(o);
  const HTilde h = htilde_orders(o);
  o.Htilde0 = h.h0;
  o.Htilde1 = h.h1;
  o.Htilde2 = h.h2;
  for (const Matrix& g : o.Gammabars) o.Lambdas.push_back(g * o.S1);
  const Matrix& inv = o.DbarPerpInv;
  o.Z = kI * o.Goff.adjoint() * (inv.adjoint() - inv) * o.Goff;
  return o;
}

AdiabaticOrders build_orders(const ReservoirPath& path, const DFSFrame& frame, double gamma_gap, double eta) {
  return build_orders(frame, path.eval(frame.s), gamma_gap, eta);
}

Matrix SuperOperator::apply(const Matrix& rho) const { return ops::unvec(matrix * ops::vec(rho), dim); }

SuperOperator l_minus1_superop(const AdiabaticOrders& orders) {
  return make_superop(dissipator(orders.Dbar, orders.Gammabars), orders.Dbar.rows());
}

SuperOperator l0_superop(const AdiabaticOrders& orders) {
  const Index n = orders.Dbar.rows();
  Matrix m = Complex(0.0, -1.0) * (ops::left(orders.Htilde1) - ops::right(orders.Htilde1.adjoint()));
  for (const Matrix& g : orders.Gammabars) {
    const Matrix c = ops::commutator(orders.S1, g);
    m += Complex(0.0, 2.0) * (ops::sandwich(c, g.adjoint()) - ops::sandwich(g, c.adjoint()));
  }
  return make_superop(std::move(m), n);
}

Matrix l0_generator(const DFSFrame& frame) { return in_dfs_generator(frame); }

L1Data l1_superop(const AdiabaticOrders& orders) {
  const Index n = orders.Dbar.rows();
  L1Data out;
  out.Lambdas = orders.Lambdas;
  out.Z = orders.Z;
  Matrix a = Matrix::Zero(n, n);
  for (const Matrix& l : out.Lambdas) a += l.adjoint() * l;
  Matrix m = hamiltonian_part(out.Z) + dissipator(a, out.Lambdas);
  out.op = make_superop(std::move(m), n);
  const Matrix perp = ops::identity(n) - orders.Pibar;
  for (const Matrix& l : out.Lambdas) out.leakage_indicator.push_back((perp * l * orders.Pibar).norm());
  return out;
}

SuperOperator rotated_full_superop(const AdiabaticOrders& orders) {
  const Index n = orders.Dbar.rows();
  Matrix m = kI * (ops::left(orders.Gbar) - ops::right(orders.Gbar)) +
             dissipator(orders.Dbar, orders.Gammabars) / orders.eta;
  return make_superop(std::move(m), n);
}

SuperOperator truncated_superop(const AdiabaticOrders& orders) {
  const Index n = orders.Dbar.rows();
  Matrix m = l_minus1_superop(orders).matrix / orders.eta + l0_superop(orders).matrix +
             orders.eta * l1_superop(orders).op.matrix;
  return make_superop(std::move(m), n);
}

Matrix deformed_projector(const AdiabaticOrders& orders) {
  return orders.Pibar + kI * orders.eta * ops::anticommutator(orders.S1, orders.Pibar);
}

double block_diagonalization_residual(const AdiabaticOrders& orders) {
  const Index n = orders.Dbar.rows();
  const Matrix h = -(orders.eta * orders.Gbar) - kI * orders.Dbar;
  const Matrix forward = ops::matexp(orders.S1, kI * orders.eta);
  const Matrix backward = ops::matexp(orders.S1, -kI * orders.eta);
  const Matrix conj = forward * h * backward;
  return (orders.Pibar * conj * (ops::identity(n) - orders.Pibar)).norm();
}

double s1_drift(const AdiabaticOrders& a, const AdiabaticOrders& b) {
  if (b.s == a.s) throw PreconditionError("s1_drift: identical grid points");
  return (b.S1 - a.S1).norm() / std::abs(b.s - a.s);
}

StructuralDefects structural_defects(const AdiabaticOrders& orders) {
  StructuralDefects d;
  const Matrix& pb = orders.Pibar;
  const Index n = pb.rows();
  const Matrix perp = ops::identity(n) - pb;
  for (const Matrix& g : orders.Gammabars) d.gammabar_pibar = std::max(d.gammabar_pibar, (g * pb).norm());
  const ops::HermitianEigen e = ops::eigh(pb);
  Index k = 0;
  for (Index i = 0; i < n; ++i) k += e.values(i) > 0.5 ? 1 : 0;
  const Matrix perp_basis = e.vectors.leftCols(n - k);
  const Matrix pblock = perp_basis.adjoint() * ops::hermitian_part(orders.Dbar) * perp_basis;
  d.dbar_min_gap = n > k ? ops::eigh(pblock).values(0) : 0.0;
  d.s1_diagonal_blocks = std::max((pb * orders.S1 * pb).norm(), (perp * orders.S1 * perp).norm());
  d.h1_off_diagonal = off_diagonal_blocks(orders.Htilde1, pb).norm();
  d.h2_off_diagonal = off_diagonal_blocks(orders.Htilde2, pb).norm();
  d.z_hermiticity = ops::hermiticity_defect(orders.Z);
  return d;
}

namespace {

Vector rk4_step(const Matrix& a, const Matrix& b, const Matrix& c, const Vector& v, double h) {
  const Vector k1 = a * v;
  const Vector k2 = b * (v + 0.5 * h * k1);
  const Vector k3 = b * (v + 0.5 * h * k2);
  const Vector k4 = c * (v + h * k3);
  return v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

ExpansionComparison compare_expansion(const ReservoirPath& path, const Matrix& rho0, double eta, int rk_steps,
                                      const DfsOptions& dfs) {
  if (!(eta > 0.0)) throw PreconditionError("compare_expansion: eta must be positive");
  if (rk_steps == 0) rk_steps = static_cast<int>(std::ceil(10.0 / eta));
  if (rk_steps < 50) throw PreconditionError("compare_expansion: at least 50 RK steps required");
  TransportOptions topts;
  topts.steps = 2 * rk_steps;
  topts.dfs = dfs;
  const FrameChain chain = transport_frame(path, topts);
  const double gap = chain.min_gap;

  std::vector<Matrix> full;
  std::vector<Matrix> trunc;
  full.reserve(chain.frames.size());
  trunc.reserve(chain.frames.size());
  ExpansionComparison out;
  out.eta = eta;
  AdiabaticOrders previous;
  for (std::size_t j = 0; j < chain.frames.size(); ++j) {
    AdiabaticOrders o = build_orders(path, chain.frames[j], gap, eta);
    full.push_back(rotated_full_superop(o).matrix);
    trunc.push_back(truncated_superop(o).matrix);
    if (j > 0) out.max_s1_drift = std::max(out.max_s1_drift, s1_drift(previous, o));
    previous = std::move(o);
  }

  const AdiabaticOrders first = build_orders(path, chain.frames.front(), gap, eta);
  const Matrix e_left = ops::matexp(first.S1, kI * eta);
  const Matrix e_right = ops::matexp(first.S1.adjoint(), -kI * eta);
  Vector v_full = ops::vec(rho0);
  Vector v_trunc = ops::vec(e_left * rho0 * e_right);
  const double h = 1.0 / rk_steps;
  for (int j = 0; j < rk_steps; ++j) {
    const std::size_t i = 2 * static_cast<std::size_t>(j);
    v_full = rk4_step(full[i], full[i + 1], full[i + 2], v_full, h);
    v_trunc = rk4_step(trunc[i], trunc[i + 1], trunc[i + 2], v_trunc, h);
  }
  const Index n = rho0.rows();
  const Matrix pb = rotated_projector(chain.frames.back());
  const Matrix rf = ops::unvec(v_full, n);
  Matrix rt = ops::unvec(v_trunc, n);
  rt /= rt.trace();
  out.discrepancy = (pb * rf * pb - pb * rt * pb).norm();
  out.leakage_full = 1.0 - std::real((pb * rf).trace());
  out.leakage_truncated = 1.0 - std::real((pb * rt).trace());
  return out;
}

LeakagePrediction predict_leakage(const ReservoirPath& path, const FrameChain& chain, const Matrix& rho0,
                                  double eta) {
  const int steps = chain.steps();
  if (steps < 2 || steps % 2 != 0) throw PreconditionError("predict_leakage: frame chain needs an even step count");
  const Index n = rho0.rows();
  std::vector<Matrix> gen;
  gen.reserve(chain.frames.size());
  for (const DFSFrame& f : chain.frames) {
    const AdiabaticOrders o = build_orders(path, f, chain.min_gap, eta);
    const Matrix m = l0_superop(o).matrix + eta * l1_superop(o).op.matrix;
    const Matrix proj = ops::sandwich(o.Pibar, o.Pibar);
    gen.push_back(proj * m * proj);
  }
  const Matrix pb0 = rotated_projector(chain.frames.front());
  Vector v = ops::vec(pb0 * rho0 * pb0);
  const double h = 2.0 / steps;
  for (int j = 0; j < steps / 2; ++j) {
    const std::size_t i = 2 * static_cast<std::size_t>(j);
    v = rk4_step(gen[i], gen[i + 1], gen[i + 2], v, h);
  }
  LeakagePrediction out;
  out.eta = eta;
  out.rho_block = ops::unvec(v, n);
  out.leakage = 1.0 - std::real(out.rho_block.trace());
  return out;
}

}  // namespace holodyn
