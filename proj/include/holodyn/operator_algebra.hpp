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

// Dense complex matrix substrate shared by every physics module.
//
// Matrices are plain Eigen values; every function here is pure and returns a
// new matrix. Dimensions are desk scale (a few up to ~64), so all algorithms
// are dense and O(n^3) without apology.

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace holodyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

// Relative singular-value cutoff used for every rank decision.
inline constexpr double kDefaultRelTol = 1e-9;

namespace ops {

Matrix identity(Index dim);
Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);

// Throws PreconditionError naming `what` unless `a` is square, non-empty and
// finite.
void require_square(const Matrix& a, std::string_view what);
bool all_finite(const Matrix& a);

// exp(scale * a), Padé scaling-and-squaring.
Matrix matexp(const Matrix& a, Complex scale = 1.0);

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

// Eigendecomposition of the Hermitian part of `a`.
HermitianEigen eigh(const Matrix& a);

double spectral_norm(const Matrix& a);
double hermiticity_defect(const Matrix& a);  // ||a - a^dag||
double unitarity_defect(const Matrix& u);    // ||u^dag u - 1||
Matrix hermitian_part(const Matrix& a);

// Unitary factor of the polar decomposition a = W |a|. For a non-square
// a (n x k, n >= k) returns the closest isometry.
Matrix polar_unitary(const Matrix& a);

// Rotates `basis` (n x k, orthonormal columns) by the k x k unitary that
// best maps it onto `reference` (orthogonal Procrustes). The span is
// unchanged.
Matrix procrustes_align(const Matrix& basis, const Matrix& reference);

// Orthonormal k-frame inside an ambient space of dimension n, together with
// its projector.
class Subspace {
 public:
  Subspace() = default;
  // `basis` must have orthonormal columns to 1e-12.
  explicit Subspace(Matrix basis);
  static Subspace empty(Index ambient_dim);
  static Subspace whole(Index ambient_dim);

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }
  const Matrix& projector() const { return projector_; }

  // Orthonormal basis of the orthogonal complement.
  Subspace complement() const;
  // Same span, basis rotated toward `reference` (see procrustes_align).
  Subspace aligned_to(const Subspace& reference) const;

 private:
  Matrix basis_;
  Matrix projector_;
};

// Span of the right singular vectors whose singular values are at most
// rel_tol * sigma_max. A zero matrix has the whole space as its kernel.
Subspace nullspace(const Matrix& a, double rel_tol = kDefaultRelTol);

// rows.basis^dag * a * cols.basis
Matrix block(const Matrix& a, const Subspace& rows, const Subspace& cols);
// rows.basis * small * cols.basis^dag, the inverse of block().
Matrix embed(const Matrix& small, const Subspace& rows, const Subspace& cols);

// Eigenphases of a unitary, each in (-pi, pi], sorted ascending.
std::vector<double> eigenphases(const Matrix& u);
// Maps any angle into (-pi, pi].
double wrap_phase(double angle);
// Smallest |a - b| modulo 2 pi.
double phase_distance(double a, double b);

Matrix kron(const Matrix& a, const Matrix& b);

// Column stacking, the convention used by every superoperator here.
Vector vec(const Matrix& rho);
Matrix unvec(const Vector& v, Index dim);

// Superoperator matrices acting on vec(rho):
//   left(A):        rho -> A rho
//   right(B):       rho -> rho B
//   sandwich(A, B): rho -> A rho B
Matrix left(const Matrix& a);
Matrix right(const Matrix& b);
Matrix sandwich(const Matrix& a, const Matrix& b);

}  // namespace ops
}  // namespace holodyn
