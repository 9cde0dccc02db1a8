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
#pragma once

// Fixed-order H2-conic synthesis by iterative convex overbounding. All
// controller parameters are collected in K = [0, Chat; Bhat, Ahat]; each
// iteration solves a convex program in (dK, dQ, dP, Z) around a feasible
// point (K0, Q0, P0) whose optimum can only lower the cost bound.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conic_h2/conic.hpp"
#include "conic_h2/lti.hpp"
#include "conic_h2/sdp.hpp"

namespace conic_h2 {

/// Block matrices that make the closed loop affine in K:
///   Acl = At + E K R,  Bcl = Bt + E K S,  Ccl = Ct + F K R,
/// and the controller conic inequality He(Pt K X) + Gamma <= 0.
struct TransformData {
  Matrix At, Bt, Ct, E, R, S, F, X, Gamma;
  Eigen::Index n = 0, m = 0, p = 0, q = 0, nc = 0;
  Cone cone;

  Eigen::Index nk() const { return m + nc; }
  Eigen::Index ncl() const { return n + nc; }
};

inline TransformData build_transform(const Plant& plant, Eigen::Index nc, const Cone& cone_c) {
  plant.validate();
  cone_c.validate();
  if (nc < 1) throw InvalidArgument("controller order must be at least 1");
  TransformData t;
  t.n = plant.n();
  t.m = plant.m();
  t.p = plant.p();
  t.q = plant.q();
  t.nc = nc;
  t.cone = cone_c;
  const auto n = t.n, m = t.m, p = t.p, q = t.q;
  const auto N = n + nc, M = m + nc;
  t.At = Matrix::Zero(N, N);
  t.At.topLeftCorner(n, n) = plant.A;
  t.Bt = Matrix::Zero(N, p);
  t.Bt.topRows(n) = plant.B1;
  t.Ct = Matrix::Zero(q, N);
  t.Ct.leftCols(n) = plant.C1;
  t.E = Matrix::Zero(N, M);
  t.E.topLeftCorner(n, m) = -plant.B2;
  t.E.bottomRightCorner(nc, nc).setIdentity();
  t.R = Matrix::Zero(M, N);
  t.R.topLeftCorner(m, n) = plant.C2;
  t.R.bottomRightCorner(nc, nc).setIdentity();
  t.S = Matrix::Zero(M, p);
  t.S.topRows(m) = plant.D21;
  t.F = Matrix::Zero(q, M);
  t.F.leftCols(m) = -plant.D12;
  // X: rows (m, nc), columns (nc, m, m).
  t.X = Matrix::Zero(M, nc + 2 * m);
  t.X.block(0, nc, m, m).setIdentity();
  t.X.block(m, 0, nc, nc).setIdentity();
  const double a = cone_c.lower(), b = cone_c.upper();
  t.Gamma = Matrix::Zero(nc + 2 * m, nc + 2 * m);
  const Matrix Im = Matrix::Identity(m, m);
  t.Gamma.block(nc, nc, m, m) = -(a - b) * (a - b) / (4.0 * b) * Im;
  t.Gamma.block(nc + m, nc + m, m, m) = -b * Im;
  t.Gamma.block(nc + m, nc, m, m) = -0.5 * (a + b) * Im;
  t.Gamma.block(nc, nc + m, m, m) = -0.5 * (a + b) * Im;
  return t;
}

inline Matrix pack_k(const Controller& c) {
  c.validate();
  const auto m = c.channels(), nc = c.order();
  Matrix K = Matrix::Zero(m + nc, m + nc);
  K.topRightCorner(m, nc) = c.Chat;
  K.bottomLeftCorner(nc, m) = c.Bhat;
  K.bottomRightCorner(nc, nc) = c.Ahat;
  return K;
}

inline Controller unpack_k(const Matrix& K, Eigen::Index m, Eigen::Index nc) {
  if (K.rows() != m + nc || K.cols() != m + nc)
    throw DimensionError("K must be " + std::to_string(m + nc) + " square, got " + shape(K));
  return {K.bottomRightCorner(nc, nc), K.bottomLeftCorner(nc, m), K.topRightCorner(m, nc)};
}

/// Pt = [0, P; 0, 0; I, 0] with rows (nc, m, m) and columns (m, nc).
inline Matrix p_tilde(const Matrix& P, Eigen::Index m) {
  const auto nc = P.rows();
  Matrix Pt = Matrix::Zero(nc + 2 * m, m + nc);
  Pt.topRightCorner(nc, nc) = P;
  Pt.block(nc + m, 0, m, m).setIdentity();
  return Pt;
}

inline void check_k(const TransformData& t, const Matrix& K) {
  if (K.rows() != t.nk() || K.cols() != t.nk())
    throw DimensionError("K must be " + std::to_string(t.nk()) + " square, got " + shape(K));
}

inline StateSpace assemble_closed_loop(const TransformData& t, const Matrix& K) {
  check_k(t, K);
  return StateSpace(t.At + t.E * K * t.R, t.Bt + t.E * K * t.S, t.Ct + t.F * K * t.R);
}

/// He(Pt K X) + Gamma.
inline Matrix conic_lmi_matrix(const TransformData& t, const Matrix& K, const Matrix& P) {
  check_k(t, K);
  if (P.rows() != t.nc || P.cols() != t.nc) throw DimensionError("P must be " + std::to_string(t.nc) + " square");
  const Matrix G = p_tilde(P, t.m) * K * t.X;
  return symmetrize(G + G.transpose() + t.Gamma);
}

/// He[Q (At + E K R)] + (Ct + F K R)^T (Ct + F K R).
inline Matrix lyapunov_lmi_matrix(const TransformData& t, const Matrix& K, const Matrix& Q) {
  const auto cl = assemble_closed_loop(t, K);
  const Matrix G = Q * cl.A;
  return symmetrize(G + G.transpose() + cl.C.transpose() * cl.C);
}

/// J(K, Q) = tr((Bt + E K S)^T Q (Bt + E K S)).
inline double overbound_cost(const TransformData& t, const Matrix& K, const Matrix& Q) {
  check_k(t, K);
  const Matrix Bcl = t.Bt + t.E * K * t.S;
  return (Bcl.transpose() * Q * Bcl).trace();
}

/// Squared closed-loop H2 norm, or +infinity when the loop is unstable. A
/// zero controller leaves its states inert, so the cost is that of the open
/// plant.
inline double true_cost(const TransformData& t, const Matrix& K) {
  const auto cl = assemble_closed_loop(t, K);
  if (is_hurwitz(cl.A)) return h2_norm_sq(cl);
  if (K.cwiseAbs().maxCoeff() == 0.0) {
    const StateSpace open(cl.A.topLeftCorner(t.n, t.n), cl.B.topRows(t.n), cl.C.leftCols(t.n));
    if (is_hurwitz(open.A)) return h2_norm_sq(open);
  }
  return std::numeric_limits<double>::infinity();
}

/// Upper bound ceil((J0' - J_H2) / epsilon) on the number of iterations.
inline long long iteration_bound(double j0prime, double j_h2, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("iteration_bound: epsilon must be positive");
  if (!(j0prime >= j_h2)) throw InvalidArgument("iteration_bound: initial cost is below the unconstrained optimum");
  return static_cast<long long>(std::ceil((j0prime - j_h2) / epsilon));
}

/// H2-optimal observer-based controller: Chat from the control Riccati
/// equation, Bhat from the filter Riccati equation, Ahat = A - B2 Chat - Bhat C2.
inline Controller design_h2_luenberger(const Plant& plant) {
  plant.validate();
  std::vector<std::string> issues;
  const Matrix Ru = plant.D12.transpose() * plant.D12;
  const Matrix Vy = plant.D21 * plant.D21.transpose();
  if (Ru.size() && Eigen::LLT<Matrix>(Ru).info() != Eigen::Success) issues.emplace_back("D12^T D12 is not positive definite");
  if (Vy.size() && Eigen::LLT<Matrix>(Vy).info() != Eigen::Success) issues.emplace_back("D21 D21^T is not positive definite");
  if (!is_stabilizable(plant.A, plant.B2)) issues.emplace_back("(A, B2) is not stabilizable");
  if (!is_detectable(plant.A, plant.C2)) issues.emplace_back("(A, C2) is not detectable");
  if (!issues.empty()) {
    std::string msg = "design_h2_luenberger:";
    for (const auto& s : issues) msg += " " + s + ";";
    throw InvalidArgument(msg);
  }
  const Matrix Ruinv = Ru.inverse();
  const Matrix Vyinv = Vy.inverse();
  // Remove the cross weights so both equations take the plain Riccati form.
  const Matrix Ac = plant.A - plant.B2 * Ruinv * plant.D12.transpose() * plant.C1;
  const Matrix Qc = plant.C1.transpose() *
                    (Matrix::Identity(plant.q(), plant.q()) - plant.D12 * Ruinv * plant.D12.transpose()) * plant.C1;
  const Matrix Xc = solve_riccati(Ac, plant.B2, symmetrize(Qc), Ru);
  const Matrix Chat = Ruinv * (plant.B2.transpose() * Xc + plant.D12.transpose() * plant.C1);
  const Matrix Af = plant.A - plant.B1 * plant.D21.transpose() * Vyinv * plant.C2;
  const Matrix Qf = plant.B1 *
                    (Matrix::Identity(plant.p(), plant.p()) - plant.D21.transpose() * Vyinv * plant.D21) *
                    plant.B1.transpose();
  const Matrix Yf = solve_riccati(Af.transpose(), plant.C2.transpose(), symmetrize(Qf), Vy);
  const Matrix Bhat = (Yf * plant.C2.transpose() + plant.B1 * plant.D21.transpose()) * Vyinv;
  return {plant.A - plant.B2 * Chat - Bhat * plant.C2, Bhat, Chat};
}

/// A point of the reformulated problem together with its two costs.
struct IterateState {
  Matrix K, Q, P;
  double Jprime = 0.0;
  double Jtrue = 0.0;
};

struct SynthesisOptions {
  double epsilon = 5e-3;
  double gamma_reg = 0.1;
  int max_iters = 2000;
  /// Empty means identity.
  Matrix W1, W2;
  double feas_tol = 1e-7;
  /// Largest tolerated condition number of Q0.
  double max_condition = 1e12;
  sdp::SdpOptions solver;

  void validate() const {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (!(gamma_reg >= 0.0)) throw InvalidArgument("gamma_reg must be nonnegative");
    if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
    if (!(feas_tol > 0.0)) throw InvalidArgument("feas_tol must be positive");
    for (const Matrix* W : {&W1, &W2})
      if (W->size() && (symmetry_defect(*W) > 1e-12 * std::max(1.0, W->norm()) ||
                        Eigen::LLT<Matrix>(*W).info() != Eigen::Success))
        throw InvalidArgument("W1 and W2 must be symmetric positive definite");
  }
};

/// Convex program around (K0, Q0, P0) with handles to its variables.
struct Subproblem {
  sdp::SdpProgram program;
  sdp::VarRef dK, dQ, dP, Z;
  /// Present when the conic block is relaxed to <= eps I.
  std::optional<sdp::VarRef> eps;
  /// tr(Bt^T (Q0 + dQ) Bt) + tr(Z) as an affine expression.
  sdp::AffineExpr cost;
  std::string warning;

  /// Cost without the regularization at a solution vector.
  double cost_at(const Vector& y) const { return cost.evaluate(y)(0, 0); }
};

struct SubproblemSettings {
  Matrix W1, W2;
  double gamma_reg = 0.1;
  double feas_tol = 1e-7;
  double max_condition = 1e12;
  /// Minimize eps with the Pi2 block of the conic inequality shifted by
  /// eps I instead of minimizing the cost, and cap the cost at cost_cap.
  bool relax_conic = false;
  double cost_cap = std::numeric_limits<double>::infinity();
};

namespace detail {

inline Matrix or_identity(const Matrix& W, Eigen::Index n) { return W.size() ? W : Matrix(Matrix::Identity(n, n)); }

inline double lmi_scale(const Matrix& M) { return std::max(1.0, M.cwiseAbs().maxCoeff()); }

}  // namespace detail

inline Subproblem build_subproblem(const TransformData& t, const Matrix& K0, const Matrix& Q0, const Matrix& P0,
                                   const SubproblemSettings& s) {
  using sdp::AffineExpr;
  check_k(t, K0);
  const auto N = t.ncl(), M = t.nk(), nc = t.nc, m = t.m, p = t.p;
  if (Q0.rows() != N || Q0.cols() != N) throw DimensionError("Q0 must be " + std::to_string(N) + " square");
  if (P0.rows() != nc || P0.cols() != nc) throw DimensionError("P0 must be " + std::to_string(nc) + " square");
  const Matrix W1 = detail::or_identity(s.W1, M);
  const Matrix W2 = detail::or_identity(s.W2, M);

  Eigen::SelfAdjointEigenSolver<Matrix> qes(symmetrize(Q0));
  const double qmin = qes.eigenvalues().minCoeff(), qmax = qes.eigenvalues().maxCoeff();
  if (!(qmin > 0.0) || qmax / qmin > s.max_condition)
    throw NoSolutionError("Q0 is singular or too ill-conditioned to invert (eigenvalues " + std::to_string(qmin) +
                          " .. " + std::to_string(qmax) + ")");
  const Matrix Qhalf = qes.operatorSqrt();
  const Matrix Qihalf = qes.operatorInverseSqrt();

  Subproblem sp;
  const double lyap = max_eigenvalue(lyapunov_lmi_matrix(t, K0, Q0));
  const double conic = max_eigenvalue(conic_lmi_matrix(t, K0, P0));
  const double pmin = min_eigenvalue(P0);
  const double lyap_scale = detail::lmi_scale(lyapunov_lmi_matrix(t, K0, Q0));
  if (lyap > 1e3 * s.feas_tol * lyap_scale || (!s.relax_conic && conic > 1e3 * s.feas_tol) || !(pmin > 0.0))
    throw InfeasibleError("initial point violates the constraints: lyapunov " + std::to_string(lyap) + ", conic " +
                          std::to_string(conic) + ", min eig P " + std::to_string(pmin));
  if (lyap > s.feas_tol * lyap_scale || (!s.relax_conic && conic > s.feas_tol))
    sp.warning = "initial point is only marginally feasible";

  auto& prog = sp.program;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pins = Eigen::Matrix<bool, -1, -1>::Constant(M, M, false);
  pins.topLeftCorner(m, m).setConstant(true);
  sp.dK = prog.add_variable("dK", M, M, sdp::VarKind::Full, pins);
  sp.dQ = prog.add_variable("dQ", N, N, sdp::VarKind::Symmetric);
  sp.dP = prog.add_variable("dP", nc, nc, sdp::VarKind::Symmetric);
  sp.Z = prog.add_variable("Z", p, p, sdp::VarKind::Symmetric);
  const AffineExpr dK = prog.expr(sp.dK), dQ = prog.expr(sp.dQ), dP = prog.expr(sp.dP), Z = prog.expr(sp.Z);

  // Cost bound constraint, congruence-scaled by blkdiag(Q0^(1/2), I).
  const Matrix EK0S = t.E * K0 * t.S;
  const AffineExpr lower =
      AffineExpr(Matrix(EK0S.transpose() * Qhalf)) + t.S.transpose() * dK.transpose() * (t.E.transpose() * Qhalf);
  prog.add_psd("cost", sdp::symmetric_blocks({{AffineExpr(Matrix(Matrix::Identity(N, N))) - Qihalf * dQ * Qihalf},
                                              {lower, Z}}));

  // Lyapunov inequality.
  const Matrix EK0R = t.E * K0 * t.R;
  const Matrix FK0R = t.F * K0 * t.R;
  const AffineExpr lin = t.At.transpose() * dQ + AffineExpr(Matrix(t.At.transpose() * Q0 + Q0 * EK0R)) +
                         dQ * EK0R + (Q0 * t.E) * dK * t.R + AffineExpr(Matrix(t.Ct.transpose() * FK0R)) +
                         (t.Ct.transpose() * t.F) * dK * t.R + (FK0R.transpose() * t.F) * dK * t.R;
  const AffineExpr Pi1 = sdp::he(lin) + AffineExpr(Matrix(t.Ct.transpose() * t.Ct + FK0R.transpose() * FK0R));
  const Matrix W1inv = symmetrize(W1.inverse());
  const Matrix W1F = symmetrize((W1inv + t.F.transpose() * t.F).inverse());
  prog.add_nsd("lyapunov", sdp::symmetric_blocks({{Pi1},
                                                   {t.E.transpose() * dQ, AffineExpr(Matrix(-W1inv))},
                                                   {dK * t.R, AffineExpr::zero(M, M), AffineExpr(Matrix(-W1F))}}));

  // Controller conic inequality.
  const Matrix Pt0 = p_tilde(P0, m);
  const Matrix K0X = K0 * t.X;
  const auto nr = nc + 2 * m;
  const AffineExpr dPt = sdp::blocks({{AffineExpr::zero(nc, m), dP}, {AffineExpr::zero(2 * m, m), AffineExpr::zero(2 * m, nc)}});
  AffineExpr Pi2 = AffineExpr(t.Gamma) + sdp::he(AffineExpr(Matrix(Pt0 * K0X)) + Pt0 * dK * t.X + dPt * K0X);
  if (s.relax_conic) {
    sp.eps = prog.add_scalar("eps");
    AffineExpr shift(nr, nr);
    shift.add_term(prog.variable(*sp.eps).index(0, 0), Matrix::Identity(nr, nr));
    Pi2 = Pi2 - shift;
  }
  const Matrix W2inv = symmetrize(W2.inverse());
  prog.add_nsd("conic", sdp::symmetric_blocks({{Pi2},
                                               {dPt.transpose(), AffineExpr(Matrix(-W2inv))},
                                               {dK * t.X, AffineExpr::zero(M, M), AffineExpr(Matrix(-W2))}}));

  // Positivity.
  prog.add_psd("Q", AffineExpr(Q0) + dQ, 1e-3 * qmin);
  prog.add_psd("P", AffineExpr(P0) + dP, 1e-3 * pmin);

  // Objective.
  sp.cost = AffineExpr(Matrix::Constant(1, 1, (t.Bt.transpose() * Q0 * t.Bt).trace()));
  {
    AffineExpr c1 = t.Bt.transpose() * dQ * t.Bt;
    AffineExpr tr(1, 1);
    for (const auto& [slot, coef] : c1.terms()) tr.add_term(slot, Matrix::Constant(1, 1, coef.trace()));
    for (const auto& [slot, coef] : Z.terms()) tr.add_term(slot, Matrix::Constant(1, 1, coef.trace()));
    sp.cost = sp.cost + tr;
  }
  if (s.relax_conic) {
    prog.add_linear_objective(prog.variable(*sp.eps).index(0, 0), 1.0);
    if (std::isfinite(s.cost_cap))
      prog.add_nsd("cost_cap", sp.cost - AffineExpr(Matrix::Constant(1, 1, s.cost_cap)));
  } else {
    prog.add_trace_objective(sp.cost);
  }
  for (const auto ref : {sp.dK, sp.dQ, sp.dP}) prog.add_frobenius_penalty(ref, s.gamma_reg);

  // Strictly feasible start: zero step with a slack epigraph and shift.
  Vector y0 = Vector::Zero(prog.num_scalars());
  const Matrix L0 = EK0S.transpose() * Qhalf;
  const Matrix LLt = L0 * L0.transpose();
  prog.assign(y0, sp.Z, Matrix(LLt + std::max(1.0, LLt.trace()) * Matrix::Identity(p, p)));
  if (sp.eps) prog.assign(y0, *sp.eps, Matrix::Constant(1, 1, std::max(0.0, conic) + 1.0));
  prog.set_start(std::move(y0));
  return sp;
}

struct HistoryRow {
  int iter = 0;
  double Jprime = 0.0;
  double Jtrue = 0.0;
  double lyap_residual = 0.0;
  double conic_residual = 0.0;
};

enum class SynthesisStatus { Converged, MaxIterations, Stalled, SolverFailure };

inline const char* to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::Converged: return "converged";
    case SynthesisStatus::MaxIterations: return "max-iterations";
    case SynthesisStatus::Stalled: return "stalled";
    case SynthesisStatus::SolverFailure: return "solver-failure";
  }
  return "unknown";
}

struct SynthesisResult {
  IterateState final_state;
  std::vector<HistoryRow> history;
  SynthesisStatus status = SynthesisStatus::SolverFailure;
  int iterations = 0;
  std::string message;
  std::vector<std::string> warnings;

  bool ok() const { return status == SynthesisStatus::Converged || status == SynthesisStatus::MaxIterations; }
};

inline HistoryRow history_row(const TransformData& t, int iter, const IterateState& s) {
  return {iter, s.Jprime, s.Jtrue, max_eigenvalue(lyapunov_lmi_matrix(t, s.K, s.Q)),
          max_eigenvalue(conic_lmi_matrix(t, s.K, s.P))};
}

/// Iterates the convex subproblem from `init` until the bound J' moves by at
/// most epsilon. J' of the initial point is J(K0, Q0); afterwards it is the
/// subproblem cost at its solution.
inline SynthesisResult run_algorithm1(const TransformData& t, const IterateState& init, const SynthesisOptions& opts) {
  opts.validate();
  SynthesisResult res;
  IterateState cur = init;
  cur.Jprime = overbound_cost(t, cur.K, cur.Q);
  cur.Jtrue = true_cost(t, cur.K);
  res.history.push_back(history_row(t, 0, cur));
  res.final_state = cur;

  SubproblemSettings ss;
  ss.W1 = opts.W1;
  ss.W2 = opts.W2;
  ss.gamma_reg = opts.gamma_reg;
  ss.feas_tol = opts.feas_tol;
  ss.max_condition = opts.max_condition;

  for (int k = 0; k < opts.max_iters; ++k) {
    std::optional<Subproblem> sp;
    try {
      sp.emplace(build_subproblem(t, cur.K, cur.Q, cur.P, ss));
    } catch (const std::exception& e) {
      res.status = SynthesisStatus::SolverFailure;
      res.message = std::string("iteration ") + std::to_string(k + 1) + ": " + e.what();
      return res;
    }
    if (!sp->warning.empty()) res.warnings.push_back("iteration " + std::to_string(k + 1) + ": " + sp->warning);
    const auto sol = sdp::solve(sp->program, opts.solver);
    // Descent only needs a feasible point no worse than the current one; the
    // cost check below enforces the second half.
    const bool inexact = !sol.optimal() && sol.feasible_point(opts.feas_tol);
    if (inexact)
      res.warnings.push_back("iteration " + std::to_string(k + 1) + ": subproblem solved inexactly (" + sol.message +
                             ")");
    if (!sol.optimal() && !inexact) {
      res.status = SynthesisStatus::SolverFailure;
      res.message = std::string("iteration ") + std::to_string(k + 1) + ": subproblem " + sdp::to_string(sol.status) +
                    " (" + sol.message + ")";
      return res;
    }
    IterateState next;
    next.K = cur.K + sp->program.value(sol.y, sp->dK);
    next.Q = symmetrize(cur.Q + sp->program.value(sol.y, sp->dQ));
    next.P = symmetrize(cur.P + sp->program.value(sol.y, sp->dP));
    next.Jprime = sp->cost_at(sol.y);
    next.Jtrue = true_cost(t, next.K);
    const double slack = 10.0 * opts.feas_tol * std::max(1.0, cur.Jprime);
    if (next.Jprime > cur.Jprime + slack || !std::isfinite(next.Jtrue)) {
      res.status = SynthesisStatus::Stalled;
      res.iterations = k + 1;
      res.message = "step rejected: bound rose from " + std::to_string(cur.Jprime) + " to " +
                    std::to_string(next.Jprime);
      return res;
    }
    const double change = std::abs(next.Jprime - cur.Jprime);
    cur = next;
    res.final_state = cur;
    res.iterations = k + 1;
    res.history.push_back(history_row(t, k + 1, cur));
    if (change <= opts.epsilon) {
      res.status = SynthesisStatus::Converged;
      return res;
    }
  }
  res.status = SynthesisStatus::MaxIterations;
  res.message = "iteration limit reached";
  return res;
}

}  // namespace conic_h2
