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

#include "conic_h2/sdp.hpp"

namespace conic_h2::sdp {
namespace {

TEST(Sdp, TraceAboveIdentity) {
  SdpProgram p;
  const auto W = p.add_variable("W", 2, 2, VarKind::Symmetric);
  p.add_psd("W>=I", p.expr(W) - AffineExpr::identity(2));
  p.add_trace_objective(p.expr(W));
  const auto s = solve(p);
  ASSERT_TRUE(s.optimal()) << s.message;
  EXPECT_NEAR(s.objective, 2.0, 1e-7);
  EXPECT_TRUE(p.value(s.y, W).isApprox(Matrix::Identity(2, 2), 1e-6));
}

TEST(Sdp, SchurComplementPair) {
  // min w + v  s.t. [[w, 1], [1, v]] >= 0  ->  w = v = 1.
  SdpProgram p;
  const auto w = p.add_scalar("w");
  const auto v = p.add_scalar("v");
  p.add_psd("schur", symmetric_blocks({{p.expr(w)}, {AffineExpr(Matrix::Ones(1, 1)), p.expr(v)}}));
  p.add_trace_objective(p.expr(w));
  p.add_trace_objective(p.expr(v));
  const auto s = solve(p);
  ASSERT_TRUE(s.optimal()) << s.message;
  EXPECT_NEAR(s.objective, 2.0, 1e-7);
  EXPECT_NEAR(p.value(s.y, w)(0, 0), 1.0, 1e-4);
  EXPECT_NEAR(p.value(s.y, v)(0, 0), 1.0, 1e-4);
}

TEST(Sdp, ContradictoryBoundsAreInfeasible) {
  SdpProgram p;
  const auto x = p.add_scalar("x");
  p.add_psd("x>=1", p.expr(x) - AffineExpr(Matrix::Ones(1, 1)));
  p.add_nsd("x<=0", p.expr(x));
  p.add_trace_objective(p.expr(x));
  const auto s = solve(p);
  EXPECT_EQ(s.status, Status::Infeasible) << s.message;
}

TEST(Sdp, UnboundedBelow) {
  SdpProgram p;
  const auto x = p.add_scalar("x");
  p.add_nsd("x<=0", p.expr(x));
  p.add_trace_objective(p.expr(x));
  const auto s = solve(p);
  EXPECT_EQ(s.status, Status::Unbounded) << s.message;
}

TEST(Sdp, EqualityAndQuadraticObjective) {
  // min (x-3)^2 + y^2  s.t.  x + y = 1, [[x,0],[0,y]] >= 0  ->  x = 1, y = 0 ... with y>=0 binding: x=1,y=0?
  // Unconstrained on the line: x = 2, y = -1 violates y >= 0, so the optimum is x = 1, y = 0.
  SdpProgram p;
  const auto x = p.add_scalar("x");
  const auto y = p.add_scalar("y");
  p.add_zero("sum", p.expr(x) + p.expr(y) - AffineExpr(Matrix::Ones(1, 1)));
  p.add_psd("y>=0", p.expr(y));
  p.add_frobenius_penalty(x, 1.0);
  p.add_frobenius_penalty(y, 1.0);
  p.add_trace_objective(p.expr(x), -6.0);
  p.add_objective_constant(9.0);
  const auto s = solve(p);
  ASSERT_TRUE(s.optimal()) << s.message;
  EXPECT_NEAR(p.value(s.y, x)(0, 0), 1.0, 1e-6);
  EXPECT_NEAR(p.value(s.y, y)(0, 0), 0.0, 1e-6);
  EXPECT_NEAR(s.objective, 4.0, 1e-6);
}

TEST(Sdp, PinnedEntriesStayZero) {
  SdpProgram p;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pins = Eigen::Matrix<bool, -1, -1>::Constant(2, 2, false);
  pins(0, 0) = true;
  const auto K = p.add_variable("K", 2, 2, VarKind::Full, pins);
  EXPECT_EQ(p.num_scalars(), 3);
  EXPECT_EQ(p.variable(K).index(0, 0), -1);
  // min ||K - ones||^2: pinned entry stays 0, the others go to 1.
  p.add_frobenius_penalty(K, 1.0);
  p.add_trace_objective(Matrix::Ones(2, 2) * p.expr(K).transpose(), -2.0);
  p.add_psd("dummy", AffineExpr::identity(1));
  const auto s = solve(p);
  ASSERT_TRUE(s.optimal()) << s.message;
  Matrix expected = Matrix::Ones(2, 2);
  expected(0, 0) = 0.0;
  EXPECT_TRUE(p.value(s.y, K).isApprox(expected, 1e-6));
}

TEST(Sdp, TextRoundTripReproducesSolution) {
  SdpProgram p;
  const auto W = p.add_variable("W", 3, 3, VarKind::Symmetric);
  const auto V = p.add_variable("V", 2, 2, VarKind::Symmetric);
  Matrix R(3, 2);
  R << 1, 0.5, -0.2, 1, 0.3, 0.1;
  p.add_psd("schur", symmetric_blocks({{p.expr(W)}, {AffineExpr(Matrix(R.transpose())), p.expr(V)}}));
  p.add_trace_objective(p.expr(V));
  p.add_trace_objective(p.expr(W));
  p.add_frobenius_penalty(W, 0.1);
  const auto text = p.to_text();
  const auto q = SdpProgram::from_text(text);
  EXPECT_EQ(q.to_text(), text);
  const auto s1 = solve(p);
  const auto s2 = solve(q);
  ASSERT_EQ(s1.status, s2.status);
  EXPECT_LE((s1.y - s2.y).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Sdp, AffineAlgebra) {
  SdpProgram p;
  const auto X = p.add_variable("X", 2, 2, VarKind::Full);
  Matrix L(2, 2);
  L << 1, 2, 3, 4;
  const AffineExpr e = he(L * p.expr(X));
  Vector y(4);
  y << 1, 2, 3, 4;
  const Matrix Xv = p.value(y, X);
  EXPECT_TRUE(e.evaluate(y).isApprox(L * Xv + (L * Xv).transpose()));
  EXPECT_THROW(p.add_psd("bad", L * p.expr(X)), InvalidArgument);
}

}  // namespace
}  // namespace conic_h2::sdp
