/*
 Copyright 2026 The conic-h2 Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <gtest/gtest.h>

#include "conic_h2/lti.hpp"
#include "test_util.hpp"

namespace conic_h2 {
namespace {

Matrix M1(double v) { return Matrix::Constant(1, 1, v); }

TEST(IsHurwitz, ScalarAndSmallCases) {
  EXPECT_TRUE(is_hurwitz(M1(-1.0)));
  Matrix dbl(2, 2);
  dbl << 0, 1, 0, 0;
  EXPECT_FALSE(is_hurwitz(dbl));
  Matrix comp(2, 2);
  comp << 0, 1, -2, -3;  // eigenvalues -1, -2
  EXPECT_TRUE(is_hurwitz(comp));
}

TEST(IsHurwitz, RejectsNonSquare) { EXPECT_THROW(is_hurwitz(Matrix::Zero(2, 3)), DimensionError); }

TEST(SolveLyapunov, ClosedFormExamples) {
  EXPECT_NEAR(solve_lyapunov(M1(-1.0), M1(1.0)).X(0, 0), 0.5, 1e-14);
  const Matrix I2 = Matrix::Identity(2, 2);
  EXPECT_TRUE(solve_lyapunov(-I2, I2).X.isApprox(0.5 * I2, 1e-14));

  Matrix A(2, 2);
  A << 0, 1, -2, -3;
  // Frozen from the Kronecker oracle.
  Matrix expected(2, 2);
  expected << 1.25, 0.25, 0.25, 0.25;
  EXPECT_TRUE(testing::lyapunov_kronecker(A, I2).isApprox(expected, 1e-12));
  const auto sol = solve_lyapunov(A, I2);
  EXPECT_TRUE(sol.X.isApprox(expected, 1e-12));
  EXPECT_TRUE(sol.warning.empty());
}

TEST(SolveLyapunov, RejectsUnstable) {
  EXPECT_THROW(solve_lyapunov(M1(1.0), M1(1.0)), NoSolutionError);
  EXPECT_THROW(solve_lyapunov(M1(-1.0), Matrix::Identity(2, 2)), DimensionError);
}

TEST(SolveLyapunov, ResidualBoundOnRandomSystems) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    const Matrix A = testing::random_hurwitz(rng, n);
    const Matrix W = testing::random_psd(rng, n);
    const auto sol = solve_lyapunov(A, W);
    const double res = (A.transpose() * sol.X + sol.X * A + W).norm();
    EXPECT_LE(res, 1e-8 * (A.norm() * sol.X.norm() + W.norm())) << "trial " << trial;
    EXPECT_EQ(symmetry_defect(sol.X), 0.0);
    EXPECT_TRUE(sol.X.isApprox(testing::lyapunov_kronecker(A, W), 1e-8));
  }
}

TEST(H2Norm, ScalarExamples) {
  EXPECT_NEAR(h2_norm_sq(StateSpace(M1(-1), M1(1), M1(1))), 0.5, 1e-14);
  EXPECT_EQ(h2_norm_sq(StateSpace(M1(-1), M1(0), M1(1))), 0.0);
  EXPECT_NEAR(h2_norm_sq(StateSpace(M1(-2), M1(1), M1(1))), 0.25, 1e-14);
  EXPECT_THROW(h2_norm_sq(StateSpace(M1(1), M1(1), M1(1))), InfiniteNormError);
}

TEST(H2Norm, MatchesFrequencyDomainQuadrature) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    const Eigen::Index p = 1 + trial % 2, q = 1 + (trial / 2) % 2;
    const StateSpace sys(testing::random_hurwitz(rng, n, 0.3), testing::random_matrix(rng, n, p),
                         testing::random_matrix(rng, q, n));
    const double exact = h2_norm_sq(sys);
    const double quad = testing::h2_norm_sq_quadrature(sys);
    EXPECT_NEAR(exact, quad, 1e-4 * std::abs(quad)) << "trial " << trial;
  }
}

TEST(SolveRiccati, ScalarExamples) {
  EXPECT_NEAR(solve_riccati(M1(0), M1(1), M1(1), M1(1))(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(solve_riccati(M1(-1), M1(1), M1(0), M1(1))(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(solve_riccati(M1(1), M1(1), M1(0), M1(1))(0, 0), 2.0, 1e-12);
}

TEST(SolveRiccati, StabilizingOnRandomData) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 5, m = 1 + trial % 2;
    const Matrix A = testing::random_matrix(rng, n, n);
    const Matrix B = testing::random_matrix(rng, n, m);
    const Matrix Q = testing::random_pd(rng, n);
    const Matrix R = testing::random_pd(rng, m);
    const Matrix X = solve_riccati(A, B, Q, R);
    const Matrix res = A.transpose() * X + X * A - X * B * R.inverse() * B.transpose() * X + Q;
    EXPECT_LE(res.norm(), 1e-7 * std::max(1.0, X.norm() * (A.norm() + 1.0)));
    EXPECT_TRUE(is_hurwitz(A - B * R.inverse() * B.transpose() * X));
    Eigen::SelfAdjointEigenSolver<Matrix> es(X);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(SolveRiccati, ImaginaryAxisAndUnstabilizable) {
  // A = 0, B = 0: (A,B) not stabilizable.
  EXPECT_THROW(solve_riccati(M1(0), M1(0), M1(1), M1(1)), NoSolutionError);
  // Undamped oscillator with Q = 0 has Hamiltonian eigenvalues on the axis.
  Matrix A(2, 2);
  A << 0, 1, -1, 0;
  Matrix B(2, 1);
  B << 0, 1;
  EXPECT_THROW(solve_riccati(A, B, Matrix::Zero(2, 2), M1(1)), NoSolutionError);
  EXPECT_THROW(solve_riccati(M1(0), M1(1), M1(1), M1(-1)), InvalidArgument);
}

Plant scalar_plant(double a, double b2, double c2) {
  Plant p;
  p.A = M1(a);
  p.B1 = M1(1);
  p.B2 = M1(b2);
  p.C1 = M1(1);
  p.C2 = M1(c2);
  p.D12 = M1(0);
  p.D21 = M1(0);
  return p;
}

TEST(CloseLoop, BlockLayout) {
  const Plant p = scalar_plant(-0.5, 2.0, 3.0);
  const Controller k{M1(-4.0), M1(5.0), M1(7.0)};
  const StateSpace cl = close_loop(p, k);
  Matrix expected(2, 2);
  expected << -0.5, -2.0 * 7.0, 5.0 * 3.0, -4.0;
  EXPECT_EQ(cl.A, expected);

  const StateSpace open = close_loop(p, Controller::zero(1, 1));
  Matrix blk = Matrix::Zero(2, 2);
  blk(0, 0) = -0.5;
  EXPECT_EQ(open.A, blk);
  EXPECT_EQ(open.B(0, 0), 1.0);
  EXPECT_EQ(open.B(1, 0), 0.0);
  EXPECT_EQ(open.C(0, 1), 0.0);
}

TEST(CloseLoop, DimensionMismatch) {
  const Plant p = scalar_plant(-1, 1, 1);
  const Controller k{Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  EXPECT_THROW(close_loop(p, k), DimensionError);
}

TEST(CloseLoop, EigenvaluesAgreeWithHurwitzTest) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    Plant p;
    p.A = testing::random_matrix(rng, 3, 3);
    p.B1 = testing::random_matrix(rng, 3, 2);
    p.B2 = testing::random_matrix(rng, 3, 1);
    p.C1 = testing::random_matrix(rng, 2, 3);
    p.C2 = testing::random_matrix(rng, 1, 3);
    p.D12 = Matrix::Zero(2, 1);
    p.D21 = Matrix::Zero(1, 2);
    const Controller k{testing::random_matrix(rng, 2, 2), testing::random_matrix(rng, 2, 1),
                       testing::random_matrix(rng, 1, 2)};
    const StateSpace cl = close_loop(p, k);
    const auto ev = eigenvalues(cl.A);
    bool stable = true;
    for (const auto& l : ev) stable = stable && l.real() < -kHurwitzTol;
    EXPECT_EQ(stable, is_hurwitz(cl.A));
  }
}

TEST(PlantAssumptions, DetectsCrossTerm) {
  Plant p = scalar_plant(-1, 1, 1);
  p.D21 = M1(1.0);
  const auto issues = check_plant_assumptions(p);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_NE(issues[0].find("D21"), std::string::npos);
}

}  // namespace
}  // namespace conic_h2
