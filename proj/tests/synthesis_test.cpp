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

#include <random>

#include "conic_h2/initialization.hpp"
#include "conic_h2/synthesis.hpp"
#include "test_util.hpp"

namespace conic_h2 {
namespace {

using testing::random_controller;
using testing::random_matrix;
using testing::random_pd;
using testing::random_plant;

Plant scalar_plant(double a, double b2 = 1.0) {
  Plant g;
  g.A = Matrix::Constant(1, 1, a);
  g.B1 = (Matrix(1, 2) << 1, 0).finished();
  g.B2 = Matrix::Constant(1, 1, b2);
  g.C1 = (Matrix(2, 1) << 1, 0).finished();
  g.C2 = Matrix::Constant(1, 1, 1.0);
  g.D12 = (Matrix(2, 1) << 0, 1).finished();
  g.D21 = (Matrix(1, 2) << 0, 1).finished();
  return g;
}

// Conic inequality in its dilated form, written out block by block from the controller data.
Matrix dilated_direct(const Controller& c, const Matrix& P, const Cone& cone) {
  const auto nc = c.order(), m = c.channels();
  const double a = cone.lower(), b = cone.upper();
  Matrix L = Matrix::Zero(nc + 2 * m, nc + 2 * m);
  L.block(0, 0, nc, nc) = P * c.Ahat + c.Ahat.transpose() * P;
  L.block(0, nc, nc, m) = P * c.Bhat;
  L.block(nc, 0, m, nc) = c.Bhat.transpose() * P;
  L.block(0, nc + m, nc, m) = c.Chat.transpose();
  L.block(nc + m, 0, m, nc) = c.Chat;
  L.block(nc, nc, m, m) = -(a - b) * (a - b) / (4 * b) * Matrix::Identity(m, m);
  L.block(nc, nc + m, m, m) = -(a + b) / 2 * Matrix::Identity(m, m);
  L.block(nc + m, nc, m, m) = -(a + b) / 2 * Matrix::Identity(m, m);
  L.block(nc + m, nc + m, m, m) = -b * Matrix::Identity(m, m);
  return L;
}

TEST(Transform, ScalarBlocks) {
  const auto t = build_transform(scalar_plant(-1.0, 2.0), 1, Cone(-1, 4));
  EXPECT_EQ(t.E, (Matrix(2, 2) << -2, 0, 0, 1).finished());
  EXPECT_EQ(t.R, (Matrix(2, 2) << 1, 0, 0, 1).finished());
  EXPECT_EQ(t.S, (Matrix(2, 2) << 0, 1, 0, 0).finished());
  EXPECT_EQ(t.F, (Matrix(2, 2) << 0, 0, -1, 0).finished());
  EXPECT_DOUBLE_EQ(t.Gamma(1, 1), -25.0 / 16.0);
  EXPECT_DOUBLE_EQ(t.Gamma(2, 2), -4.0);
  EXPECT_DOUBLE_EQ(t.Gamma(2, 1), -1.5);
  EXPECT_DOUBLE_EQ(t.Gamma(1, 2), -1.5);
  EXPECT_EQ(t.Gamma.row(0).cwiseAbs().sum(), 0.0);
  EXPECT_EQ(t.Gamma.col(0).cwiseAbs().sum(), 0.0);
}

TEST(Transform, PaddingAndErrors) {
  std::mt19937 rng(3);
  const auto g = random_plant(rng, 3, 2, 2, 2);
  const auto t = build_transform(g, 2, Cone(-1, 1));
  EXPECT_EQ(t.At.bottomRightCorner(2, 2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(t.At.topLeftCorner(3, 3), g.A);
  EXPECT_EQ(t.X.rows(), 4);
  EXPECT_EQ(t.X.cols(), 6);
  EXPECT_THROW(build_transform(g, 0, Cone(-1, 1)), InvalidArgument);
  Cone bad;
  bad.a = 1.0;
  EXPECT_THROW(build_transform(g, 1, bad), InvalidArgument);
}

TEST(ClosedLoop, ZeroControllerAndBlocks) {
  std::mt19937 rng(4);
  const auto g = random_plant(rng, 2, 1);
  const auto t = build_transform(g, 2, Cone(-1, 1));
  const auto cl0 = assemble_closed_loop(t, Matrix::Zero(3, 3));
  EXPECT_EQ(cl0.A, t.At);
  EXPECT_EQ(cl0.B, t.Bt);
  EXPECT_EQ(cl0.C, t.Ct);
  const auto c = random_controller(rng, 2, 1);
  const auto cl = assemble_closed_loop(t, pack_k(c));
  EXPECT_TRUE(cl.B.topRows(2).isApprox(g.B1));
  EXPECT_TRUE(cl.B.bottomRows(2).isApprox(c.Bhat * g.D21));
  const auto back = unpack_k(pack_k(c), 1, 2);
  EXPECT_EQ(back.Ahat, c.Ahat);
  EXPECT_EQ(back.Bhat, c.Bhat);
  EXPECT_EQ(back.Chat, c.Chat);
}

TEST(ConicLmi, ScalarExample) {
  const auto t = build_transform(scalar_plant(-1.0), 1, Cone(-1, 1));
  const Controller c{Matrix::Constant(1, 1, -1), Matrix::Constant(1, 1, 1), Matrix::Constant(1, 1, 1)};
  const Matrix L = conic_lmi_matrix(t, pack_k(c), Matrix::Identity(1, 1));
  const Matrix expected = (Matrix(3, 3) << -2, 1, 1, 1, -1, 0, 1, 0, -1).finished();
  EXPECT_LE((L - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(conic_lmi_matrix(t, Matrix::Zero(2, 2), Matrix::Identity(1, 1)), t.Gamma);
}

TEST(ConicLmi, MatchesDirectAssemblyAndCloseLoop) {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> nd(1, 3), md(1, 2), cd(1, 2);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto n = nd(rng), m = md(rng), nc = cd(rng);
    const auto g = random_plant(rng, n, m, 1 + i % 2, 1 + i % 3, i % 2 == 0);
    const Cone cone(-std::pow(10.0, 2 * ud(rng)), std::pow(10.0, 2 * ud(rng)));
    const auto t = build_transform(g, nc, cone);
    const Controller c{random_matrix(rng, nc, nc), random_matrix(rng, nc, m), random_matrix(rng, m, nc)};
    const Matrix P = random_pd(rng, nc);
    EXPECT_LE((conic_lmi_matrix(t, pack_k(c), P) - dilated_direct(c, P, cone)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((conic_lmi_matrix(t, pack_k(c), P) - csl_matrix(P, c.as_state_space(), cone, 2)).cwiseAbs().maxCoeff(),
              1e-12);
    const auto a1 = assemble_closed_loop(t, pack_k(c));
    const auto a2 = close_loop(g, c);
    EXPECT_LE((a1.A - a2.A).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((a1.B - a2.B).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((a1.C - a2.C).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Overbound, CrossTermVanishes) {
  std::mt19937 rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto g = random_plant(rng, 3, 1 + i % 2, 2, 2);
    const auto t = build_transform(g, 2, Cone(-1, 1));
    Matrix K = pack_k(random_controller(rng, 2, g.m()));
    K *= 0.05;
    const auto cl = assemble_closed_loop(t, K);
    ASSERT_TRUE(is_hurwitz(cl.A));
    const Matrix Q = observability_gramian(cl);
    const Matrix T = t.Bt.transpose() * Q * t.E * K * t.S;
    EXPECT_NEAR((T + T.transpose()).trace(), 0.0, 1e-10 * std::max(1.0, Q.norm()));
  }
}

TEST(Overbound, InverseBoundOnRandomPairs) {
  std::mt19937 rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto n = 1 + i % 5;
    const Matrix Q = random_pd(rng, n), Qt = random_pd(rng, n);
    const Matrix Qi = Q.inverse(), Qti = Qt.inverse();
    const Matrix gapm = Qi - (2 * Qti - Qti * Q * Qti);
    EXPECT_GE(min_eigenvalue(gapm), -1e-9 * std::max(1.0, Qi.norm())) << i;
  }
}

TEST(TrueCost, AgreesWithH2AndFlagsInstability) {
  std::mt19937 rng(21);
  const auto g = random_plant(rng, 2, 1);
  const auto t = build_transform(g, 1, Cone(-1, 1));
  const Controller c{Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 0.1), Matrix::Constant(1, 1, 0.1)};
  const auto cl = close_loop(g, c);
  ASSERT_TRUE(is_hurwitz(cl.A));
  EXPECT_NEAR(true_cost(t, pack_k(c)), h2_norm_sq(cl), 1e-9 * h2_norm_sq(cl));
  const Controller bad{Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 0.0), Matrix::Constant(1, 1, 0.0)};
  EXPECT_TRUE(std::isinf(true_cost(t, pack_k(bad))));
  const StateSpace open(g.A, g.B1, g.C1);
  EXPECT_NEAR(true_cost(t, Matrix::Zero(2, 2)), h2_norm_sq(open), 1e-12);
}

TEST(IterationBound, Examples) {
  EXPECT_EQ(iteration_bound(100, 10, 0.01), 9000);
  EXPECT_EQ(iteration_bound(5, 5, 0.1), 0);
  EXPECT_THROW(iteration_bound(1, 2, 0.1), InvalidArgument);
  EXPECT_THROW(iteration_bound(2, 1, 0.0), InvalidArgument);
}

TEST(Luenberger, ScalarPlantStabilizesAndImproves) {
  const auto g = scalar_plant(-1.0);
  const auto c = design_h2_luenberger(g);
  const auto cl = close_loop(g, c);
  ASSERT_TRUE(is_hurwitz(cl.A));
  EXPECT_LT(h2_norm_sq(cl), h2_norm_sq(StateSpace(g.A, g.B1, g.C1)));
  // Control Riccati -2X - X^2 + 1 = 0 gives X = sqrt(2) - 1 = Chat.
  EXPECT_NEAR(c.Chat(0, 0), std::sqrt(2.0) - 1.0, 1e-10);
  EXPECT_NEAR(c.Bhat(0, 0), std::sqrt(2.0) - 1.0, 1e-10);
}

TEST(Luenberger, ZeroPerformanceWeight) {
  auto g = scalar_plant(-2.0);
  g.C1.setZero();
  const auto c = design_h2_luenberger(g);
  EXPECT_NEAR(c.Chat(0, 0), 0.0, 1e-12);
}

TEST(Luenberger, CostFormulaAndLocalOptimality) {
  std::mt19937 rng(31);
  for (int i = 0; i < 10; ++i) {
    const auto g = random_plant(rng, 3, 1 + i % 2, 2, 2, i % 2 == 0);
    if (!check_plant_assumptions(g).empty()) continue;
    const auto c = design_h2_luenberger(g);
    const auto cl = close_loop(g, c);
    ASSERT_TRUE(is_hurwitz(cl.A));
    const double J = h2_norm_sq(cl);
    // J = tr(B1^T X B1) + tr(Chat Y Chat^T) for unit control and noise weights.
    const Matrix X = solve_riccati(g.A, g.B2, g.C1.transpose() * g.C1, Matrix::Identity(g.m(), g.m()));
    const Matrix Qf = g.B1 * g.B1.transpose();
    const Matrix Y = solve_riccati(g.A.transpose(), g.C2.transpose(), symmetrize(Qf), Matrix::Identity(g.m(), g.m()));
    EXPECT_NEAR(J, (g.B1.transpose() * X * g.B1).trace() + (c.Chat * Y * c.Chat.transpose()).trace(), 1e-7 * J);
    for (int k = 0; k < 10; ++k) {
      Controller d = c;
      d.Ahat += 1e-3 * random_matrix(rng, 3, 3);
      d.Bhat += 1e-3 * random_matrix(rng, 3, g.m());
      d.Chat += 1e-3 * random_matrix(rng, g.m(), 3);
      const auto cld = close_loop(g, d);
      if (is_hurwitz(cld.A)) EXPECT_GE(h2_norm_sq(cld), J - 1e-9 * J);
    }
  }
}

TEST(Luenberger, ReportsViolations) {
  auto g = scalar_plant(1.0);
  g.B2.setZero();
  EXPECT_THROW(design_h2_luenberger(g), InvalidArgument);
}

// Stable plant and a small-gain controller inside the cone: a feasible point for any cone.
struct Setup {
  Plant plant;
  TransformData t;
  InitResult init;
};

Setup small_setup(unsigned seed, Eigen::Index n, Eigen::Index m, Eigen::Index nc, const Cone& cone) {
  std::mt19937 rng(seed);
  Setup s;
  s.plant = random_plant(rng, n, m, 1, 1);
  s.t = build_transform(s.plant, nc, cone);
  Controller c = random_controller(rng, nc, m);
  const auto est = estimate_symmetric_cone(c.as_state_space());
  const Cone target(cone.lower() * 0.5, cone.upper() * 0.5);
  c.Chat *= cone_scale_factor(est, target);
  s.init = init_arbitrary(s.t, c);
  return s;
}

TEST(Subproblem, CollapsesAtZeroStep) {
  auto s = small_setup(41, 2, 1, 2, Cone(-1, 2));
  const auto sp = build_subproblem(s.t, s.init.K0, s.init.Q0, s.init.P0, SubproblemSettings{});
  const auto& prog = sp.program;
  Vector y = Vector::Zero(prog.num_scalars());
  const auto& lyap = prog.constraints()[1];
  ASSERT_EQ(lyap.name, "lyapunov");
  const Matrix at0 = lyap.expr.evaluate(y).topLeftCorner(s.t.ncl(), s.t.ncl());
  EXPECT_LE((at0 - lyapunov_lmi_matrix(s.t, s.init.K0, s.init.Q0)).cwiseAbs().maxCoeff(), 1e-12);
  // Z at its tight value reproduces J(K0, Q0).
  const Matrix EKS = s.t.E * s.init.K0 * s.t.S;
  const Matrix Zt = EKS.transpose() * s.init.Q0 * EKS;
  const auto& zv = prog.variable(sp.Z);
  for (Eigen::Index i = 0; i < zv.rows(); ++i)
    for (Eigen::Index j = i; j < zv.cols(); ++j) y(zv.index(i, j)) = Zt(i, j);
  const double J0 = overbound_cost(s.t, s.init.K0, s.init.Q0);
  EXPECT_NEAR(sp.cost_at(y), J0, 1e-10 * (1 + J0));
  EXPECT_NEAR(prog.objective_value(y), J0, 1e-10 * (1 + J0));
  EXPECT_NEAR(J0, s.init.Jtrue, 1e-6 * (1 + J0));
  EXPECT_LE(prog.max_violation(y), 1e-9);
}

TEST(Subproblem, ScalarPlantSolves) {
  const auto g = scalar_plant(-1.0);
  const auto t = build_transform(g, 1, Cone(-1, 1));
  const Controller c{Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.3)};
  const auto init = init_arbitrary(t, c);
  const auto sp = build_subproblem(t, init.K0, init.Q0, init.P0, SubproblemSettings{});
  const auto sol = sdp::solve(sp.program);
  EXPECT_TRUE(sol.optimal()) << sol.message;
  EXPECT_LE(sp.cost_at(sol.y), init.Jtrue + 1e-7);
}

TEST(Subproblem, RejectsInfeasibleOrSingularStart) {
  auto s = small_setup(42, 2, 1, 1, Cone(-1, 2));
  EXPECT_THROW(build_subproblem(s.t, s.init.K0, Matrix::Zero(3, 3), s.init.P0, {}), NoSolutionError);
  EXPECT_THROW(build_subproblem(s.t, s.init.K0, 1e-3 * s.init.Q0, s.init.P0, {}), InfeasibleError);
}

void expect_run_invariants(const TransformData& t, const SynthesisResult& r, double feas_tol) {
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    const auto& h = r.history[k];
    EXPECT_LE(h.Jtrue, h.Jprime + 10 * feas_tol * std::max(1.0, h.Jprime)) << k;
    EXPECT_LE(h.lyap_residual, 10 * feas_tol * std::max(1.0, h.Jprime)) << k;
    EXPECT_LE(h.conic_residual, 10 * feas_tol) << k;
    if (k > 0) EXPECT_LE(h.Jprime, r.history[k - 1].Jprime + 10 * feas_tol * std::max(1.0, h.Jprime)) << k;
  }
  EXPECT_GT(min_eigenvalue(r.final_state.P), 0.0);
  EXPECT_GT(min_eigenvalue(r.final_state.Q), 0.0);
  const auto c = unpack_k(r.final_state.K, t.m, t.nc);
  EXPECT_TRUE(csl_check(c.as_state_space(), t.cone, 1).feasible);
}

TEST(Algorithm1, DescendsOnSmallPlants) {
  for (unsigned seed : {51u, 52u, 53u}) {
    auto s = small_setup(seed, 3, 1 + seed % 2, 2, Cone(-0.5, 2.0));
    SynthesisOptions o;
    o.epsilon = 1e-4;
    const auto r = run_algorithm1(s.t, s.init.state(), o);
    EXPECT_EQ(r.status, SynthesisStatus::Converged) << r.message;
    EXPECT_GE(r.iterations, 1);
    EXPECT_LE(r.final_state.Jtrue, s.init.Jtrue + 1e-9);
    expect_run_invariants(s.t, r, o.feas_tol);
  }
}

TEST(Algorithm1, ZeroControllerDoesNotMove) {
  std::mt19937 rng(61);
  const auto g = random_plant(rng, 2, 1);
  const auto t = build_transform(g, 2, Cone(-1, 1));
  const auto init = init_arbitrary(t, Controller::zero(2, 1));
  EXPECT_FALSE(init.warnings.empty());
  const auto r = run_algorithm1(t, init.state(), SynthesisOptions{});
  EXPECT_EQ(r.status, SynthesisStatus::Converged) << r.message;
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NEAR(r.final_state.Jtrue, init.Jtrue, 5e-3);
}

TEST(Algorithm1, RejectsBadOptions) {
  auto s = small_setup(71, 2, 1, 1, Cone(-1, 1));
  SynthesisOptions o;
  o.epsilon = 0.0;
  EXPECT_THROW(run_algorithm1(s.t, s.init.state(), o), InvalidArgument);
  o = SynthesisOptions{};
  o.W1 = -Matrix::Identity(2, 2);
  EXPECT_THROW(run_algorithm1(s.t, s.init.state(), o), InvalidArgument);
}

}  // namespace
}  // namespace conic_h2
