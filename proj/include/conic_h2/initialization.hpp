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

// Starting points for the synthesis iteration: the overbounding weights
// (W1, W2) and a feasible triple (K0, Q0, P0).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "conic_h2/conic.hpp"
#include "conic_h2/synthesis.hpp"

namespace conic_h2 {

struct WPair {
  Matrix W1, W2;
  std::string warning;
};

inline WPair w_identity(const TransformData& t) {
  const auto M = t.nk();
  return {Matrix::Identity(M, M), Matrix::Identity(M, M), ""};
}

namespace detail {

/// argmin tr(L W L^T) + tr(V) s.t. [[W, G], [G^T, V]] >= 0, with a ridge
/// keeping W positive definite.
inline Matrix weight_sdp(const Matrix& L, const Matrix& G, double ridge, const sdp::SdpOptions& so,
                         std::string& warning) {
  using sdp::AffineExpr;
  const auto M = G.rows(), k = G.cols();
  sdp::SdpProgram prog;
  const auto W = prog.add_variable("W", M, M, sdp::VarKind::Symmetric);
  const auto V = prog.add_variable("V", k, k, sdp::VarKind::Symmetric);
  const AffineExpr We = prog.expr(W), Ve = prog.expr(V);
  prog.add_psd("schur", sdp::symmetric_blocks({{We}, {AffineExpr(Matrix(G.transpose())), Ve}}));
  prog.add_trace_objective(L * We * L.transpose());
  prog.add_trace_objective(Ve);
  const auto sol = sdp::solve(prog, so);
  if (!sol.optimal()) {
    warning = std::string("weight optimization ") + sdp::to_string(sol.status) + " (" + sol.message +
              "); using identity";
    return Matrix::Identity(M, M);
  }
  Matrix Wv = symmetrize(prog.value(sol.y, W));
  const double lmin = min_eigenvalue(Wv);
  if (lmin < ridge) Wv += (ridge - lmin) * Matrix::Identity(M, M);
  return Wv;
}

}  // namespace detail

/// W1 = argmin tr(E W1 E^T) + tr(V1) s.t. [[W1, R], [R^T, V1]] >= 0 and
/// W2 = argmin tr(W2) + tr(V2) s.t. [[W2, X], [X^T, V2]] >= 0.
inline WPair w_optimize(const TransformData& t, double ridge = 1e-8, const sdp::SdpOptions& so = {}) {
  WPair out;
  std::string w1, w2;
  out.W1 = detail::weight_sdp(t.E, t.R, ridge, so, w1);
  out.W2 = detail::weight_sdp(Matrix::Identity(t.nk(), t.nk()), t.X, ridge, so, w2);
  out.warning = w1.empty() ? w2 : (w2.empty() ? w1 : w1 + "; " + w2);
  return out;
}

enum class InitMethod { Arbitrary, ConicC, Ico };

inline const char* to_string(InitMethod m) {
  switch (m) {
    case InitMethod::Arbitrary: return "arbitrary";
    case InitMethod::ConicC: return "conicc";
    case InitMethod::Ico: return "ico";
  }
  return "unknown";
}

struct InitResult {
  Matrix K0, Q0, P0;
  InitMethod method = InitMethod::Arbitrary;
  /// False only for an ICO run that did not reach a feasible point.
  bool feasible = true;
  double Jtrue = 0.0;
  double lyap_residual = 0.0;
  double conic_residual = 0.0;
  double p_min_eig = 0.0;
  int relaxation_iters = 0;
  /// Set when a stalled ICO run was finished by projecting Chat.
  bool projected = false;
  std::vector<double> eps_trajectory;
  std::vector<std::string> warnings;
  std::string message;

  IterateState state() const {
    IterateState s;
    s.K = K0;
    s.Q = Q0;
    s.P = P0;
    return s;
  }
};

struct InitOptions {
  CslOptions csl;
  /// ||K0||_F below this draws a warning.
  double small_k = 1e-6;
  double feas_tol = 1e-7;
};

/// Recomputes the feasibility residuals of (K0, Q0, P0) and the true cost.
inline void verify_init(const TransformData& t, InitResult& r) {
  r.lyap_residual = max_eigenvalue(lyapunov_lmi_matrix(t, r.K0, r.Q0));
  r.conic_residual = max_eigenvalue(conic_lmi_matrix(t, r.K0, r.P0));
  r.p_min_eig = min_eigenvalue(r.P0);
  r.Jtrue = true_cost(t, r.K0);
}

/// Exact Gramian of the closed loop; for K = 0 the inert controller block
/// gets the identity.
inline Matrix closed_loop_gramian(const TransformData& t, const Matrix& K) {
  const auto cl = assemble_closed_loop(t, K);
  if (is_hurwitz(cl.A)) return observability_gramian(cl);
  if (K.cwiseAbs().maxCoeff() == 0.0 && is_hurwitz(t.At.topLeftCorner(t.n, t.n))) {
    Matrix Q = Matrix::Zero(t.ncl(), t.ncl());
    const Matrix C1 = t.Ct.leftCols(t.n);
    Q.topLeftCorner(t.n, t.n) = solve_lyapunov(t.At.topLeftCorner(t.n, t.n), C1.transpose() * C1).X;
    Q.bottomRightCorner(t.nc, t.nc).setIdentity();
    return Q;
  }
  throw InfeasibleError("closed loop is not stable");
}

/// Feasible point from a known controller: Q0 is the closed-loop Gramian and
/// P0 a conic certificate of the controller.
inline InitResult init_arbitrary(const TransformData& t, const Controller& ctrl, const InitOptions& opts = {}) {
  ctrl.validate();
  if (ctrl.order() != t.nc || ctrl.channels() != t.m)
    throw DimensionError("controller does not match the transform dimensions");
  InitResult r;
  r.method = InitMethod::Arbitrary;
  r.K0 = pack_k(ctrl);
  const bool zero = r.K0.cwiseAbs().maxCoeff() == 0.0;
  r.Q0 = closed_loop_gramian(t, r.K0);
  if (zero) {
    r.P0 = Matrix::Identity(t.nc, t.nc);
    r.warnings.emplace_back("K0 = 0: every controller step is infinitely conservative, the iteration cannot move");
  } else {
    const auto cert = csl_check(ctrl.as_state_space(), t.cone, 2, opts.csl);
    if (!cert.feasible)
      throw InfeasibleError("controller is not inside the cone (margin " + std::to_string(cert.margin) + ")");
    r.P0 = cert.certificate->P;
    if (r.K0.norm() < opts.small_k) r.warnings.emplace_back("K0 is small; steps will be tiny");
  }
  verify_init(t, r);
  return r;
}

struct ConicCOptions {
  double p_min = 1e-8;
  double p_max = 1e8;
  /// Shift of the target's dynamics when the Luenberger Ahat is unstable.
  double stabilize_margin = 0.1;
  InitOptions init;
  sdp::SdpOptions solver;
};

/// Chat closest to the target in Frobenius norm such that (Ahat, Bhat, Chat)
/// satisfies the dilated conic inequality, with Ahat and Bhat held fixed.
/// Returns the controller and its certificate P.
inline std::pair<Controller, Matrix> conicc_adjust(const Controller& target, const Cone& cone,
                                                    const ConicCOptions& opts = {}) {
  using sdp::AffineExpr;
  target.validate();
  const auto nc = target.order(), m = target.channels();
  sdp::SdpProgram prog;
  const auto Cv = prog.add_variable("Chat", m, nc, sdp::VarKind::Full);
  const auto Pv = prog.add_variable("P", nc, nc, sdp::VarKind::Symmetric);
  const AffineExpr C = prog.expr(Cv), P = prog.expr(Pv);
  const double a = cone.lower(), b = cone.upper();
  const Matrix Im = Matrix::Identity(m, m);
  prog.add_nsd("conic", sdp::symmetric_blocks({{P * target.Ahat + target.Ahat.transpose() * P},
                                               {target.Bhat.transpose() * P,
                                                AffineExpr(Matrix(-(a - b) * (a - b) / (4.0 * b) * Im))},
                                               {C, AffineExpr(Matrix(-0.5 * (a + b) * Im)), AffineExpr(Matrix(-b * Im))}}));
  prog.add_psd("P_lower", P - AffineExpr(Matrix(opts.p_min * Matrix::Identity(nc, nc))));
  prog.add_nsd("P_upper", P - AffineExpr(Matrix(opts.p_max * Matrix::Identity(nc, nc))));
  prog.add_frobenius_penalty(Cv, 1.0);
  prog.add_trace_objective(Matrix(target.Chat.transpose()) * C, -2.0);
  prog.add_objective_constant(target.Chat.squaredNorm());
  const auto sol = sdp::solve(prog, opts.solver);
  if (!sol.optimal())
    throw NoSolutionError(std::string("ConicC program ") + sdp::to_string(sol.status) + " (" + sol.message + ")");
  Controller out{target.Ahat, target.Bhat, prog.value(sol.y, Cv)};
  return {out, symmetrize(prog.value(sol.y, Pv))};
}

/// ConicC starting point: the Luenberger controller with Chat moved minimally
/// into the cone. An unstable Luenberger Ahat is shifted left first.
inline InitResult init_conicc(const Plant& plant, const Cone& cone_c, const ConicCOptions& opts = {}) {
  const auto t = build_transform(plant, plant.n(), cone_c);
  InitResult r;
  r.method = InitMethod::ConicC;
  Controller target = design_h2_luenberger(plant);
  if (!is_hurwitz(target.Ahat)) {
    const double shift = spectral_abscissa(target.Ahat) + opts.stabilize_margin;
    target.Ahat -= shift * Matrix::Identity(target.order(), target.order());
    r.warnings.emplace_back("Luenberger Ahat is unstable; target dynamics shifted left by " + std::to_string(shift));
  }
  const auto [ctrl, P] = conicc_adjust(target, t.cone, opts);
  r.K0 = pack_k(ctrl);
  const auto cl = assemble_closed_loop(t, r.K0);
  if (!is_hurwitz(cl.A)) throw InfeasibleError("ConicC controller does not stabilize the design plant");
  r.Q0 = observability_gramian(cl);
  r.P0 = P;
  verify_init(t, r);
  if (r.conic_residual > opts.init.feas_tol)
    r.warnings.emplace_back("ConicC certificate residual " + std::to_string(r.conic_residual));
  return r;
}

struct IcoOptions {
  double delta = 0.1;
  double gamma_reg = 1e-3;
  int max_iters = 200;
  /// Stop once eps < -eps_strict.
  double eps_strict = 1e-8;
  /// Consecutive iterations without eps progress before declaring a stall.
  int stall_window = 5;
  Matrix W1, W2;
  double feas_tol = 1e-7;
  /// When the relaxation stops short of eps < 0, move the last iterate's Chat
  /// into the cone with Ahat and Bhat fixed, as ConicC does.
  bool project_on_stop = false;
  CslOptions csl;
  sdp::SdpOptions solver;
};

/// Relaxation initialization: start from the target controller (Luenberger by
/// default), then repeatedly minimize the shift eps of the conic block while
/// the cost may grow by at most a factor (1 + delta) per step.
inline InitResult init_ico(const Plant& plant, Eigen::Index nc, const Cone& cone_c, const IcoOptions& opts = {},
                           const std::optional<Controller>& target = std::nullopt) {
  if (!(opts.delta >= 0.0)) throw InvalidArgument("ICO increment must be nonnegative");
  const auto t = build_transform(plant, nc, cone_c);
  InitResult r;
  r.method = InitMethod::Ico;
  const Controller kl = target ? *target : design_h2_luenberger(plant);
  if (kl.order() != nc) throw DimensionError("ICO target order does not match n_c");
  Matrix K = pack_k(kl);
  const auto cl = assemble_closed_loop(t, K);
  if (!is_hurwitz(cl.A)) throw InfeasibleError("ICO target does not stabilize the plant");
  Matrix Q = observability_gramian(cl);
  const auto stage1 = csl_check(kl.as_state_space(), t.cone, 2, opts.csl);
  Matrix P = stage1.P;
  double eps = max_eigenvalue(conic_lmi_matrix(t, K, P));
  r.eps_trajectory.push_back(eps);

  SubproblemSettings ss;
  ss.W1 = opts.W1;
  ss.W2 = opts.W2;
  ss.gamma_reg = opts.gamma_reg;
  ss.feas_tol = opts.feas_tol;
  ss.relax_conic = true;
  int still = 0;
  while (eps >= -opts.eps_strict) {
    if (r.relaxation_iters >= opts.max_iters) {
      r.feasible = false;
      r.message = "ICO relaxation reached the iteration limit with eps = " + std::to_string(eps);
      break;
    }
    ss.cost_cap = (1.0 + opts.delta) * overbound_cost(t, K, Q);
    const auto sp = build_subproblem(t, K, Q, P, ss);
    const auto sol = sdp::solve(sp.program, opts.solver);
    if (!sol.optimal() && !sol.feasible_point(opts.feas_tol)) {
      r.feasible = false;
      r.message = std::string("ICO subproblem ") + sdp::to_string(sol.status) + " (" + sol.message + ")";
      break;
    }
    K += sp.program.value(sol.y, sp.dK);
    Q = symmetrize(Q + sp.program.value(sol.y, sp.dQ));
    P = symmetrize(P + sp.program.value(sol.y, sp.dP));
    const double next = sp.program.value(sol.y, *sp.eps)(0, 0);
    ++r.relaxation_iters;
    r.eps_trajectory.push_back(next);
    still = next < eps - 1e-9 * std::max(1.0, std::abs(eps)) ? 0 : still + 1;
    eps = next;
    if (still >= opts.stall_window) {
      r.feasible = false;
      r.message = "ICO relaxation stalled at eps = " + std::to_string(eps);
      break;
    }
  }
  if (!r.feasible && opts.project_on_stop) {
    const Controller last = unpack_k(K, t.m, t.nc);
    if (!is_hurwitz(last.Ahat)) {
      r.message += "; projection skipped, Ahat is not Hurwitz";
    } else {
      ConicCOptions co;
      co.solver = opts.solver;
      try {
        const auto [ctrl, Pc] = conicc_adjust(last, t.cone, co);
        const Matrix Kc = pack_k(ctrl);
        if (is_hurwitz(assemble_closed_loop(t, Kc).A)) {
          r.warnings.push_back(r.message + "; finished by projecting Chat into the cone");
          r.message.clear();
          r.feasible = true;
          r.projected = true;
          K = Kc;
          P = Pc;
        } else {
          r.message += "; projected controller does not stabilize the plant";
        }
      } catch (const std::runtime_error& e) {
        r.message += std::string("; projection failed: ") + e.what();
      }
    }
  }
  r.K0 = K;
  r.P0 = P;
  // The relaxed iterates carry an overbounding Q; restart from the exact
  // Gramian so the bound is tight at the handoff.
  const auto cl_end = assemble_closed_loop(t, K);
  r.Q0 = is_hurwitz(cl_end.A) ? observability_gramian(cl_end) : Q;
  verify_init(t, r);
  return r;
}

}  // namespace conic_h2
