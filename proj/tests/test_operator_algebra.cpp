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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "holodyn/errors.hpp"
#include "holodyn/operator_algebra.hpp"

namespace holodyn {
namespace {

constexpr double kPi = std::numbers::pi;

Matrix random_matrix(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = scale * Complex(normal(rng), normal(rng));
  }
  return m;
}

Matrix pauli_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

// Taylor series with scaling and squaring, independent of the library's
// Padé route.
Matrix series_exp(const Matrix& a, int terms = 30) {
  int squarings = 0;
  double norm = a.norm();
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const Matrix b = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

TEST(Matexp, ZeroIsIdentity) {
  EXPECT_LE((ops::matexp(Matrix::Zero(3, 3)) - ops::identity(3)).norm(), 1e-15);
}

TEST(Matexp, DiagonalPhase) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = Complex(0.0, kPi);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = -1.0;
  expected(1, 1) = 1.0;
  EXPECT_LE((ops::matexp(a) - expected).norm(), 1e-12);
}

TEST(Matexp, PauliRotation) {
  const Matrix u = ops::matexp(pauli_x(), Complex(0.0, kPi / 2.0));
  EXPECT_LE((u - kI * pauli_x()).norm(), 1e-12);
  EXPECT_LE((u - series_exp(Complex(0.0, kPi / 2.0) * pauli_x())).norm(), 1e-12);
}

TEST(Matexp, AgreesWithSeriesOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 4;
    Matrix a = random_matrix(n, rng);
    a *= (0.5 + 9.0 * trial / 19.0) / ops::spectral_norm(a);  // ||a|| up to 10
    const Matrix ref = series_exp(a);
    EXPECT_LE(ops::spectral_norm(ops::matexp(a) - ref), 1e-12 * std::max(1.0, ops::spectral_norm(ref)));
  }
}

TEST(Matexp, InverseProperty) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_matrix(4, rng);
    a *= 10.0 * (trial + 1) / 20.0 / ops::spectral_norm(a);
    EXPECT_LE((ops::matexp(a) * ops::matexp(a, -1.0) - ops::identity(4)).norm(), 1e-10);
  }
}

TEST(Matexp, RejectsNonSquare) { EXPECT_THROW(ops::matexp(Matrix::Zero(2, 3)), PreconditionError); }

TEST(Eigh, ReconstructsHermitian) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = ops::hermitian_part(random_matrix(5, rng));
    const ops::HermitianEigen e = ops::eigh(a);
    const Matrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE((a - rec).norm(), 1e-10 * a.norm());
    for (Index i = 1; i < e.values.size(); ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(Nullspace, DiagonalKernel) {
  Matrix a = Matrix::Zero(2, 2);
  a(1, 1) = 1.0;
  const ops::Subspace k = ops::nullspace(a, 1e-9);
  ASSERT_EQ(k.dim(), 1);
  EXPECT_NEAR(std::abs(k.basis()(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(k.basis()(1, 0)), 0.0, 1e-15);
}

TEST(Nullspace, FullRankIsEmpty) { EXPECT_EQ(ops::nullspace(ops::identity(3), 1e-9).dim(), 0); }

TEST(Nullspace, ZeroMatrixIsWholeSpace) { EXPECT_EQ(ops::nullspace(Matrix::Zero(3, 3)).dim(), 3); }

TEST(Nullspace, OrthogonalToRowSpace) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 5;
    const Index rank = 1 + trial % 4;
    Matrix l = random_matrix(n, rng).leftCols(rank);
    Matrix r = random_matrix(n, rng).leftCols(rank);
    const Matrix a = l * r.adjoint();
    const ops::Subspace k = ops::nullspace(a, 1e-9);
    EXPECT_EQ(k.dim(), n - rank);
    const double smax = ops::spectral_norm(a);
    for (Index c = 0; c < k.dim(); ++c) EXPECT_LE((a * k.basis().col(c)).norm(), 10.0 * 1e-9 * smax);
  }
}

TEST(Subspace, ProjectorInvariants) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(6, rng)).householderQ();
    const ops::Subspace s(q.leftCols(1 + trial % 5));
    const Matrix& p = s.projector();
    EXPECT_LE((p * p - p).norm(), 1e-10);
    EXPECT_LE(ops::hermiticity_defect(p), 1e-12);
    const ops::Subspace c = s.complement();
    EXPECT_EQ(c.dim() + s.dim(), 6);
    EXPECT_LE((s.basis().adjoint() * c.basis()).norm(), 1e-12);
    EXPECT_LE((p + c.projector() - ops::identity(6)).norm(), 1e-12);
  }
}

TEST(Subspace, RejectsNonOrthonormalBasis) {
  Matrix b(2, 1);
  b << 1.0, 1.0;
  EXPECT_THROW(ops::Subspace{b}, PreconditionError);
}

TEST(Block, IdentityRestrictsToIdentity) {
  std::mt19937_64 rng(16);
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(4, rng)).householderQ();
  const ops::Subspace s(q.leftCols(2));
  EXPECT_LE((ops::block(ops::identity(4), s, s) - ops::identity(2)).norm(), 1e-12);
}

TEST(Block, CommutingOperatorHasNoOffDiagonalBlock) {
  std::mt19937_64 rng(17);
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(4, rng)).householderQ();
  const ops::Subspace s(q.leftCols(2));
  const ops::Subspace perp = s.complement();
  const Matrix a = ops::embed(random_matrix(2, rng), s, s) + ops::embed(random_matrix(2, rng), perp, perp);
  EXPECT_LE(ops::block(a, s, perp).norm(), 1e-12);
  EXPECT_LE(ops::block(a, perp, s).norm(), 1e-12);
}

TEST(Block, RejectsAmbientMismatch) {
  const ops::Subspace s = ops::Subspace::whole(3);
  EXPECT_THROW(ops::block(ops::identity(4), s, s), PreconditionError);
}

TEST(Polar, UnitaryFactor) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(4, rng);
    const Matrix w = ops::polar_unitary(a);
    EXPECT_LE(ops::unitarity_defect(w), 1e-12);
    // a = w |a| with |a| Hermitian positive.
    const Matrix h = w.adjoint() * a;
    EXPECT_LE(ops::hermiticity_defect(h), 1e-10 * a.norm());
    EXPECT_GE(ops::eigh(h).values(0), -1e-10);
    EXPECT_LE((ops::polar_unitary(w) - w).norm(), 1e-12);
  }
}

TEST(Procrustes, UndoesInternalRotation) {
  std::mt19937_64 rng(19);
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(5, rng)).householderQ();
  const Matrix basis = q.leftCols(2);
  const Matrix omega = ops::polar_unitary(random_matrix(2, rng));
  const Matrix aligned = ops::procrustes_align(basis * omega, basis);
  EXPECT_LE((aligned - basis).norm(), 1e-12);
}

TEST(Phases, WrapAndSort) {
  EXPECT_DOUBLE_EQ(ops::wrap_phase(-kPi), kPi);
  EXPECT_NEAR(ops::wrap_phase(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(ops::phase_distance(kPi - 1e-3, -kPi + 1e-3), 2e-3, 1e-12);
  Matrix u = Matrix::Zero(3, 3);
  u(0, 0) = std::exp(Complex(0.0, 2.0));
  u(1, 1) = std::exp(Complex(0.0, -1.0));
  u(2, 2) = -1.0;
  const std::vector<double> p = ops::eigenphases(u);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], -1.0, 1e-12);
  EXPECT_NEAR(p[1], 2.0, 1e-12);
  EXPECT_NEAR(p[2], kPi, 1e-12);
}

TEST(Superoperator, ColumnStackingIdentities) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(3, rng);
    const Matrix b = random_matrix(3, rng);
    const Matrix rho = random_matrix(3, rng);
    EXPECT_LE((ops::unvec(ops::vec(rho), 3) - rho).norm(), 1e-15);
    EXPECT_LE((ops::unvec(ops::sandwich(a, b) * ops::vec(rho), 3) - a * rho * b).norm(), 1e-12);
    EXPECT_LE((ops::unvec(ops::left(a) * ops::vec(rho), 3) - a * rho).norm(), 1e-12);
    EXPECT_LE((ops::unvec(ops::right(b) * ops::vec(rho), 3) - rho * b).norm(), 1e-12);
  }
}

TEST(Commutators, Basic) {
  const Matrix x = pauli_x();
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  Matrix y = Matrix::Zero(2, 2);
  y(0, 1) = Complex(0.0, -1.0);
  y(1, 0) = Complex(0.0, 1.0);
  EXPECT_LE((ops::commutator(x, y) - 2.0 * kI * z).norm(), 1e-15);
  EXPECT_LE(ops::anticommutator(x, y).norm(), 1e-15);
}

}  // namespace
}  // namespace holodyn
