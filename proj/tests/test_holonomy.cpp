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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "holodyn/errors.hpp"
#include "holodyn/holonomy.hpp"

namespace holodyn {
namespace {

constexpr double kPi = std::numbers::pi;

double berry_error(const HolonomyResult& r, double expected) {
  EXPECT_EQ(r.dim_dfs(), 1);
  return ops::phase_distance(r.phases.at(0), expected);
}

Matrix reference_pair(double theta) {
  Matrix b = Matrix::Zero(4, 2);
  b.topRows(3) = tripod_dark_pair({theta, 0.0, 0.0});
  return b;
}

Matrix random_hermitian(Index n, unsigned seed) {
  std::srand(seed);
  const Matrix m = Matrix::Random(n, n);
  return m + m.adjoint();
}

TEST(Wilson, StaticLoopIsIdentity) {
  Matrix g = Matrix::Zero(3, 3);
  g(2, 2) = 1.0;
  const Scenario sc = scenario_static({g});
  const HolonomyResult r = wilson_loop(sc.path, 500);
  EXPECT_EQ(r.dim_dfs(), 2);
  EXPECT_LE((r.U - ops::identity(2)).norm(), 1e-12);
}

TEST(Wilson, DarkStateBerryPhase) {
  for (double theta : {kPi / 4.0, kPi / 6.0, 0.4}) {
    const Scenario sc = scenario_dark_state(theta, 1.0);
    const HolonomyResult r = wilson_loop(sc.path, 4000);
    EXPECT_LE(berry_error(r, *sc.expected.abelian_phase), 1e-6) << theta;
    EXPECT_LE(r.unitarity_defect, 1e-12);
    EXPECT_LE(r.raw_unitarity_defect, 1e-6);
  }
  EXPECT_NEAR(*scenario_dark_state(kPi / 6.0, 1.0).expected.abelian_phase, kPi / 2.0, 1e-15);
}

TEST(Wilson, SecondOrderInSteps) {
  const Scenario sc = scenario_dark_state(0.4, 1.0);
  const double e1 = berry_error(wilson_loop(sc.path, 500), *sc.expected.abelian_phase);
  const double e2 = berry_error(wilson_loop(sc.path, 1000), *sc.expected.abelian_phase);
  EXPECT_GT(e1 / e2, 3.0);
  EXPECT_LT(e1 / e2, 5.0);
}

TEST(Wilson, TripodRotationAngle) {
  for (double theta : {kPi / 4.0, 1.0}) {
    const Scenario sc = scenario_tripod(phi_circle(theta), 1.0);
    WilsonOptions o;
    o.reference_basis = reference_pair(theta);
    const HolonomyResult r = wilson_loop(sc.path, 4000, o);
    const double a = 2.0 * kPi * std::cos(theta);
    EXPECT_NEAR(std::real(r.U(0, 0)), std::cos(a), 1e-6);
    EXPECT_NEAR(std::real(r.U(1, 1)), std::cos(a), 1e-6);
    EXPECT_NEAR(std::abs(r.U(0, 1)), std::abs(std::sin(a)), 1e-6);
    EXPECT_LE(std::abs(r.U(0, 1) + r.U(1, 0)), 1e-6);
    std::vector<double> expected{ops::wrap_phase(a), ops::wrap_phase(-a)};
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < 2; ++k) EXPECT_LE(ops::phase_distance(r.phases[k], expected[k]), 1e-6);
  }
}

TEST(Wilson, OpenPathRejected) {
  const Scenario sc = scenario_dark_state(kPi / 4.0, 1.0);
  const ReservoirPath& full = sc.path;
  ReservoirPath half("half", full.dim(), full.num_ops(), [full](double s) { return full.eval(0.5 * s); }, false);
  EXPECT_THROW(wilson_loop(half, 1000), PreconditionError);
  EXPECT_THROW(wilson_loop(sc.path, 100), PreconditionError);
}

TEST(Connection, DarkStateQuadrature) {
  const Scenario sc = scenario_dark_state(kPi / 4.0, 1.0);
  const BasisChain chain = basis_chain(sc.dark_frame, 10000);
  const std::vector<Matrix> a = connection(chain);
  Complex integral = 0.0;
  for (std::size_t j = 0; j + 1 < a.size(); ++j)
    integral += 0.5 * (a[j](0, 0) + a[j + 1](0, 0)) * (chain.s[j + 1] - chain.s[j]);
  EXPECT_NEAR(std::real(integral), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(std::imag(integral)), kPi, 1e-6);
  const HolonomyResult r = holonomy_from_connection(chain);
  EXPECT_LE(berry_error(r, *sc.expected.abelian_phase), 1e-6);
}

TEST(Connection, GaugeTransformationLaw) {
  const Scenario sc = scenario_tripod(ellipse_loop(1.0, 0.3, 0.9, 0.4), 1.0);
  Matrix sy(2, 2);
  sy << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
  auto omega = [sy](double s) { return ops::matexp(sy, Complex(0.0, std::sin(2.0 * kPi * s) + 0.7 * s)); };
  auto domega = [sy, omega](double s) {
    return Matrix(Complex(0.0, 2.0 * kPi * std::cos(2.0 * kPi * s) + 0.7) * sy * omega(s));
  };
  const FrameFunction frame = sc.dark_frame;
  const BasisChain c1 = basis_chain(frame, 20000);
  const BasisChain c2 = basis_chain([frame, omega](double s) { return Matrix(frame(s) * omega(s)); }, 20000);
  const std::vector<Matrix> a1 = connection(c1), a2 = connection(c2);
  for (std::size_t j = 100; j < a1.size(); j += 3000) {
    const double s = c1.s[j];
    const Matrix expected = omega(s).adjoint() * a1[j] * omega(s) - omega(s).adjoint() * domega(s);
    EXPECT_LE((a2[j] - expected).norm(), 1e-5) << s;
  }
  // Holonomy classes agree: eigenphases are gauge invariant.
  const HolonomyResult h1 = holonomy_from_connection(c1), h2 = holonomy_from_connection(c2);
  for (int k = 0; k < 2; ++k) EXPECT_LE(ops::phase_distance(h1.phases[k], h2.phases[k]), 1e-5);
}

TEST(Connection, ComponentsOfTripodFamily) {
  auto basis = [](const std::vector<double>& l) { return tripod_dark_pair({l[0], l[1], 0.0}); };
  const std::vector<Matrix> a = connection_components(basis, {0.8, 0.3});
  ASSERT_EQ(a.size(), 2u);
  // theta component vanishes, phi component is cos(theta) times the rotation generator.
  EXPECT_LE(a[0].norm(), 1e-8);
  EXPECT_NEAR(std::abs(a[1](0, 1)), std::cos(0.8), 1e-8);
  EXPECT_LE(std::abs(a[1](0, 0)) + std::abs(a[1](1, 1)), 1e-8);
}

TEST(Frame, AgreesWithWilsonUnderGauges) {
  const Scenario dark = scenario_dark_state(kPi / 6.0, 1.0);
  const GaugeCheck g0 = gauge_invariance_check(dark.path, zero_gauge(), zero_gauge(), 4000);
  EXPECT_LE(g0.max_discrepancy, 1e-6);
  const GaugeCheck g1 =
      gauge_invariance_check(dark.path, zero_gauge(), block_gauge(random_hermitian(3, 7)), 4000);
  EXPECT_LE(g1.max_discrepancy, 1e-6);
  EXPECT_LE(g1.phase_discrepancy, 1e-6);
  const Scenario tri = scenario_tripod(ellipse_loop(1.0, 0.3, 0.9, 0.4), 1.0);
  const GaugeCheck g2 = gauge_invariance_check(
      tri.path, block_gauge(random_hermitian(4, 3)),
      block_gauge(random_hermitian(4, 5), [](double s) { return std::sin(kPi * s); }), 4000);
  EXPECT_LE(g2.max_discrepancy, 1e-5);
}

TEST(Frame, ReparameterizationInvariance) {
  const Scenario sc = scenario_tripod(ellipse_loop(1.0, 0.3, 0.9), 1.0);
  const ReservoirPath warped =
      reparameterized(sc.path, [](double s) { return s - 0.15 * std::sin(2.0 * kPi * s) / kPi; }, "warped");
  WilsonOptions o;
  o.reference_basis = reference_pair(1.0);
  const HolonomyResult u = wilson_loop(sc.path, 4000, o);
  const HolonomyResult w = wilson_loop(warped, 4000, o);
  EXPECT_LE((u.U - w.U).norm(), 1e-5);
}

TEST(Frame, ReversalAndComposition) {
  const double theta = kPi / 4.0;
  const Scenario a = scenario_tripod(phi_circle(theta), 1.0);
  const Scenario b = scenario_tripod(ellipse_loop(theta, 0.2, 0.8), 1.0);
  WilsonOptions o;
  o.reference_basis = reference_pair(theta);
  const Matrix ua = wilson_loop(a.path, 4000, o).U;
  const Matrix ub = wilson_loop(b.path, 4000, o).U;
  EXPECT_LE((wilson_loop(reversed(a.path), 4000, o).U - ua.adjoint()).norm(), 1e-6);
  const Matrix uab = wilson_loop(concatenated(a.path, b.path), 8000, o).U;
  EXPECT_LE((uab - ub * ua).norm(), 1e-5);
}

TEST(Noncommutativity, LoopsAtDifferentRelativePhase) {
  const Scenario la = scenario_tripod(phi_circle(kPi / 4.0, 0.0), 1.0);
  const Scenario lb = scenario_tripod(phi_circle(kPi / 4.0, kPi / 2.0), 1.0);
  const Commutator c = noncommutativity(la.path, lb.path, 4000);
  EXPECT_GT(c.norm, 0.01);
  EXPECT_LE(noncommutativity(la.path, la.path, 2000).norm, 1e-10);
  Matrix g = Matrix::Zero(3, 3);
  g(2, 2) = 1.0;
  const Scenario st = scenario_static({g});
  EXPECT_LE(noncommutativity(st.path, st.path, 1000).norm, 1e-12);
  const Scenario other = scenario_tripod(phi_circle(1.0), 1.0);
  EXPECT_THROW(noncommutativity(la.path, other.path, 1000), PreconditionError);
}

TEST(Csv, HolonomyColumns) {
  const Scenario sc = scenario_tripod(phi_circle(kPi / 4.0), 1.0);
  HolonomyResult r = wilson_loop(sc.path, 1000);
  r.loop_id = "L_A";
  const std::string file = (std::filesystem::temp_directory_path() / "holodyn_hol_test.csv").string();
  write_holonomy_csv(file, {r});
  std::ifstream is(file);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header, "loop_id,dim_dfs,phase_1,phase_2,unitarity_defect");
  EXPECT_EQ(row.rfind("L_A,2,", 0), 0u);
  std::filesystem::remove(file);
}

}  // namespace
}  // namespace holodyn
