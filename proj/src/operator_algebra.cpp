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

#include "holodyn/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "holodyn/errors.hpp"

namespace holodyn::ops {

Matrix identity(Index dim) { return Matrix::Identity(dim, dim); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

bool all_finite(const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

void require_square(const Matrix& a, std::string_view what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw PreconditionError(std::string(what) + ": expected a non-empty square matrix, got " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!all_finite(a)) throw PreconditionError(std::string(what) + ": non-finite entries");
}

Matrix matexp(const Matrix& a, Complex scale) {
  require_square(a, "matexp");
  const Matrix scaled = scale * a;
  return scaled.exp();
}

HermitianEigen eigh(const Matrix& a) {
  require_square(a, "eigh");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) throw InvariantError("eigh: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double hermiticity_defect(const Matrix& a) { return (a - a.adjoint()).norm(); }

double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

Matrix polar_unitary(const Matrix& a) {
  if (a.rows() < a.cols()) throw PreconditionError("polar_unitary: more columns than rows");
  if (a.cols() == 0) return a;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix procrustes_align(const Matrix& basis, const Matrix& reference) {
  if (basis.rows() != reference.rows() || basis.cols() != reference.cols()) {
    throw PreconditionError("procrustes_align: basis shapes differ");
  }
  if (basis.cols() == 0) return basis;
  const Matrix overlap = basis.adjoint() * reference;
  return basis * polar_unitary(overlap);
}

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
  const Index k = basis_.cols();
  if (k > 0) {
    const double defect = (basis_.adjoint() * basis_ - Matrix::Identity(k, k)).norm();
    if (defect > 1e-12 * std::max<double>(1.0, static_cast<double>(k))) {
      throw PreconditionError("Subspace: basis columns are not orthonormal (defect " +
                              std::to_string(defect) + ")");
    }
  }
  projector_ = basis_ * basis_.adjoint();
  projector_ = hermitian_part(projector_);
}

Subspace Subspace::empty(Index ambient_dim) { return Subspace(Matrix(ambient_dim, 0)); }

Subspace Subspace::whole(Index ambient_dim) { return Subspace(identity(ambient_dim)); }

Subspace Subspace::complement() const {
  const Index n = ambient_dim();
  const Index k = dim();
  if (k == 0) return whole(n);
  if (k == n) return empty(n);
  Eigen::HouseholderQR<Matrix> qr(basis_);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return Subspace(q.rightCols(n - k));
}

Subspace Subspace::aligned_to(const Subspace& reference) const {
  return Subspace(procrustes_align(basis_, reference.basis()));
}

Subspace nullspace(const Matrix& a, double rel_tol) {
  require_square(a, "nullspace");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw PreconditionError("nullspace: rel_tol must lie in (0, 1)");
  }
  const Index n = a.rows();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  if (sigma(0) == 0.0) return Subspace::whole(n);
  const double cutoff = rel_tol * sigma(0);
  Index rank = 0;
  while (rank < n && sigma(rank) > cutoff) ++rank;
  return Subspace(svd.matrixV().rightCols(n - rank));
}

Matrix block(const Matrix& a, const Subspace& rows, const Subspace& cols) {
  if (a.rows() != rows.ambient_dim() || a.cols() != cols.ambient_dim()) {
    throw PreconditionError("block: ambient dimension mismatch");
  }
  return rows.basis().adjoint() * a * cols.basis();
}

Matrix embed(const Matrix& small, const Subspace& rows, const Subspace& cols) {
  if (small.rows() != rows.dim() || small.cols() != cols.dim()) {
    throw PreconditionError("embed: block shape does not match subspace dimensions");
  }
  return rows.basis() * small * cols.basis().adjoint();
}

double wrap_phase(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(angle, two_pi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

double phase_distance(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi)); }

std::vector<double> eigenphases(const Matrix& u) {
  require_square(u, "eigenphases");
  Eigen::ComplexEigenSolver<Matrix> solver(u, false);
  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(u.rows()));
  for (Index i = 0; i < u.rows(); ++i) phases.push_back(wrap_phase(std::arg(solver.eigenvalues()(i))));
  std::sort(phases.begin(), phases.end());
  return phases;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec(const Matrix& rho) { return Eigen::Map<const Vector>(rho.data(), rho.size()); }

Matrix unvec(const Vector& v, Index dim) {
  if (v.size() != dim * dim) throw PreconditionError("unvec: length is not dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix left(const Matrix& a) { return kron(identity(a.rows()), a); }

Matrix right(const Matrix& b) { return kron(b.transpose(), identity(b.rows())); }

Matrix sandwich(const Matrix& a, const Matrix& b) { return kron(b.transpose(), a); }

}  // namespace holodyn::ops
