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

// Conic sector analysis: the three matrix-inequality forms of the conic
// sector lemma, a sampled frequency-domain check, symmetric cone estimation,
// output scaling between cones and the sector complement used for loop
// stability.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "conic_h2/lti.hpp"
#include "conic_h2/sdp.hpp"

namespace conic_h2 {

/// Sector [a, b] with a < 0 < b. A strict cone (a, b) is stored with its
/// bounds and realized as [a (1 - margin), b (1 - margin)].
struct Cone {
  double a = -1.0;
  double b = 1.0;
  bool strict = false;
  double margin = 1e-6;

  Cone() = default;
  Cone(double lo, double hi, bool is_strict = false, double rel_margin = 1e-6)
      : a(lo), b(hi), strict(is_strict), margin(rel_margin) {
    validate();
  }

  void validate() const {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("cone bounds must be finite");
    if (!(a < 0.0 && 0.0 < b))
      throw InvalidArgument("cone bounds must satisfy a < 0 < b, got (" + std::to_string(a) + ", " +
                            std::to_string(b) + ")");
    if (strict && !(margin > 0.0 && margin < 1.0)) throw InvalidArgument("strict cone margin must lie in (0, 1)");
  }

  /// Closed bounds actually imposed.
  double lower() const { return strict ? a * (1.0 - margin) : a; }
  double upper() const { return strict ? b * (1.0 - margin) : b; }
  Cone closed() const { return Cone(lower(), upper(), false); }
};

/// Evidence that a system lies in a cone: P > 0 and the largest eigenvalue of
/// the selected inequality evaluated at P.
struct ConeCertificate {
  Matrix P;
  int form = 1;
  double residual = 0.0;
};

struct CslOptions {
  /// Accept when the optimal shift t* of L(P) <= t I is at most this.
  double tol = 1e-7;
  double p_min = 1e-8;
  double p_max = 1e8;
  sdp::SdpOptions solver;
};

struct CslResult {
  bool feasible = false;
  /// Optimal shift t*; negative values mean strict feasibility.
  double margin = std::numeric_limits<double>::infinity();
  std::optional<ConeCertificate> certificate;
  /// Minimizing P, also when the shift stays positive.
  Matrix P;
  sdp::Status status = sdp::Status::NumericalFailure;
  std::string message;
};

namespace detail {

inline void require_conic_system(const StateSpace& sys) {
  sys.validate();
  if (!sys.is_square())
    throw DimensionError("conic analysis needs a square system, got " + std::to_string(sys.inputs()) + " inputs and " +
                         std::to_string(sys.outputs()) + " outputs");
  if (!sys.strictly_proper()) throw InvalidArgument("conic analysis needs D = 0");
}

inline void require_form(int form) {
  if (form < 1 || form > 3) throw InvalidArgument("conic sector form must be 1, 2 or 3");
}

}  // namespace detail

/// The selected inequality as an affine function of P, given as the block
/// rows of a symmetric matrix that must be <= 0. Form 3 is stated through its
/// Schur complement so that it stays linear in P.
inline sdp::AffineExpr csl_expr(const sdp::AffineExpr& P, const StateSpace& sys, const Cone& cone, int form) {
  using sdp::AffineExpr;
  detail::require_form(form);
  const double a = cone.lower(), b = cone.upper();
  const auto& A = sys.A;
  const auto& B = sys.B;
  const auto& C = sys.C;
  const auto m = sys.inputs();
  const Matrix Im = Matrix::Identity(m, m);
  switch (form) {
    case 1: {
      const AffineExpr tl = P * A + A.transpose() * P + AffineExpr(Matrix(C.transpose() * C));
      const AffineExpr bl = B.transpose() * P - AffineExpr(Matrix(0.5 * (a + b) * C));
      return sdp::symmetric_blocks({{tl}, {bl, AffineExpr(Matrix(a * b * Im))}});
    }
    case 2: {
      const AffineExpr tl = P * A + A.transpose() * P;
      const AffineExpr mid = B.transpose() * P;
      return sdp::symmetric_blocks({{tl},
                                    {mid, AffineExpr(Matrix(-(a - b) * (a - b) / (4.0 * b) * Im))},
                                    {AffineExpr(C), AffineExpr(Matrix(-0.5 * (a + b) * Im)),
                                     AffineExpr(Matrix(-b * Im))}});
    }
    default: {
      const Matrix Ak = A + (a + b) / (2.0 * a * b) * B * C;
      const AffineExpr tl = P * Ak + Ak.transpose() * P +
                            AffineExpr(Matrix((1.0 - (a + b) * (a + b) / (4.0 * a * b)) * C.transpose() * C));
      return sdp::symmetric_blocks({{tl}, {B.transpose() * P, AffineExpr(Matrix(a * b * Im))}});
    }
  }
}

/// The selected inequality evaluated at a fixed P.
inline Matrix csl_matrix(const Matrix& P, const StateSpace& sys, const Cone& cone, int form) {
  detail::require_conic_system(sys);
  return symmetrize(csl_expr(sdp::AffineExpr(P), sys, cone, form).constant());
}

inline double max_eigenvalue(const Matrix& S) {
  if (S.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double min_eigenvalue(const Matrix& S) {
  if (S.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace detail {

struct CslSolve {
  sdp::SdpSolution sol;
  Matrix P;
  bool usable = false;
};

/// Minimizes t subject to L(P) <= t I and p_min I <= P <= p_max I.
inline CslSolve csl_minimize(const StateSpace& sys, const Cone& cone, int form, const CslOptions& opts) {
  const auto n = sys.states();
  sdp::SdpProgram prog;
  const auto Pv = prog.add_variable("P", n, n, sdp::VarKind::Symmetric);
  const auto tv = prog.add_scalar("t");
  const sdp::AffineExpr P = prog.expr(Pv);
  const sdp::AffineExpr L = csl_expr(P, sys, cone, form);
  const auto k = L.rows();
  sdp::AffineExpr shift(k, k);
  shift.add_term(prog.variable(tv).index(0, 0), Matrix::Identity(k, k));
  prog.add_nsd("csl", L - shift);
  if (n > 0) {
    prog.add_psd("P_lower", P - sdp::AffineExpr(Matrix(opts.p_min * Matrix::Identity(n, n))));
    prog.add_nsd("P_upper", P - sdp::AffineExpr(Matrix(opts.p_max * Matrix::Identity(n, n))));
  }
  prog.add_linear_objective(prog.variable(tv).index(0, 0), 1.0);
  CslSolve out;
  out.sol = sdp::solve(prog, opts.solver);
  out.usable = out.sol.y.size() == prog.num_scalars() && out.sol.y.allFinite();
  if (out.usable) out.P = symmetrize(prog.value(out.sol.y, Pv));
  return out;
}

}  // namespace detail

/// Decides membership of sys in the cone by minimizing t subject to
/// L(P) <= t I and p_min I <= P <= p_max I, where L is the selected form.
/// Forms 1 and 3 share their P; form 2 is equivalent under P -> b P. When the
/// direct solve falls short, the companion form's optimizer is mapped over
/// and checked as a second candidate.
inline CslResult csl_check(const StateSpace& sys, const Cone& cone, int form = 1, const CslOptions& opts = {}) {
  detail::require_conic_system(sys);
  cone.validate();
  detail::require_form(form);
  const auto n = sys.states();
  CslResult out;
  const auto direct = detail::csl_minimize(sys, cone, form, opts);
  out.status = direct.sol.status;
  out.message = direct.sol.message;
  auto evaluate = [&](const Matrix& P) {
    return std::pair{max_eigenvalue(csl_matrix(P, sys, cone, form)), n > 0 ? min_eigenvalue(P) : 1.0};
  };
  double residual = std::numeric_limits<double>::infinity(), pmin = 0.0;
  if (direct.usable) {
    std::tie(residual, pmin) = evaluate(direct.P);
    out.P = direct.P;
  }
  if (!(pmin > 0.0 && residual <= opts.tol)) {
    const int other = form == 2 ? 1 : 2;
    const double scale = form == 2 ? 1.0 / cone.upper() : cone.upper();
    const auto alt = detail::csl_minimize(sys, cone, other, opts);
    if (alt.usable) {
      const Matrix P = scale * alt.P;
      const auto [r2, p2] = evaluate(P);
      if (p2 > 0.0 && (r2 < residual || !(pmin > 0.0))) {
        residual = r2;
        pmin = p2;
        out.P = P;
        out.status = alt.sol.status;
        out.message = alt.sol.message + " (via form " + std::to_string(other) + ")";
      }
    }
  }
  if (!direct.usable && out.P.size() == 0) {
    if (direct.sol.status == sdp::Status::NumericalFailure) throw SolverError("csl_check: " + direct.sol.message);
    return out;
  }
  out.margin = residual;
  out.feasible = pmin > 0.0 && residual <= opts.tol;
  if (!out.feasible && direct.sol.status == sdp::Status::NumericalFailure && direct.sol.max_violation > 1e-3)
    throw SolverError("csl_check: " + direct.sol.message);
  if (out.feasible) out.certificate = ConeCertificate{out.P, form, residual};
  return out;
}

/// Hermitian matrix -(1/b) G^H G + (1 + a/b) He(G)/2 - a I, which is PSD at
/// every frequency for a system inside [a, b].
inline Eigen::MatrixXcd cone_frequency_matrix(const Eigen::MatrixXcd& G, const Cone& cone) {
  const double a = cone.lower(), b = cone.upper();
  const auto m = G.rows();
  Eigen::MatrixXcd H = -(1.0 / b) * (G.adjoint() * G) + (1.0 + a / b) * 0.5 * (G + G.adjoint()) -
                       a * Eigen::MatrixXcd::Identity(m, m);
  return 0.5 * (H + H.adjoint());
}

struct FrequencyCheck {
  bool inside = true;
  /// Frequency (rad/s) of the smallest eigenvalue seen; infinity for the
  /// high-frequency limit.
  double worst_frequency = 0.0;
  double worst_value = std::numeric_limits<double>::infinity();
};

/// Log-spaced grid of `points` frequencies over [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) throw InvalidArgument("log_grid needs 0 < lo < hi and >= 2 points");
  std::vector<double> w(static_cast<std::size_t>(points));
  const double l0 = std::log10(lo), l1 = std::log10(hi);
  for (int i = 0; i < points; ++i) w[static_cast<std::size_t>(i)] = std::pow(10.0, l0 + (l1 - l0) * i / (points - 1));
  return w;
}

/// Sampled frequency-domain membership test over the grid plus the limits
/// w = 0 and w -> infinity. Passes when the smallest eigenvalue of the
/// sector matrix stays above -tol * max(1, |a|).
inline FrequencyCheck frequency_cone_oracle(const StateSpace& sys, const Cone& cone,
                                            const std::vector<double>& grid = log_grid(1e-3, 1e4, 400),
                                            double tol = 1e-9) {
  detail::require_conic_system(sys);
  cone.validate();
  if (sys.states() > 0 && !is_hurwitz(sys.A)) throw InvalidArgument("frequency_cone_oracle: system is not stable");
  FrequencyCheck out;
  auto visit = [&](double w, const Eigen::MatrixXcd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cone_frequency_matrix(G, cone), Eigen::EigenvaluesOnly);
    const double v = es.eigenvalues().minCoeff();
    if (v < out.worst_value) {
      out.worst_value = v;
      out.worst_frequency = w;
    }
  };
  const auto m = sys.outputs();
  visit(std::numeric_limits<double>::infinity(), Eigen::MatrixXcd::Zero(m, m));
  visit(0.0, sys.frequency_response({0.0, 0.0}));
  for (double w : grid) visit(w, sys.frequency_response({0.0, w}));
  out.inside = out.worst_value >= -tol * std::max(1.0, std::abs(cone.lower()));
  return out;
}

/// Symmetric cone (-g, g) containing a stable system: P solves
/// P A + A^T P = -(C^T C + B B^T + eps I) and g = (1 + margin) max|lambda(P)|.
/// The bound is confirmed with form 3 and doubled until it certifies.
inline Cone estimate_symmetric_cone(const StateSpace& sys, double margin = 1e-6, double eps = 1e-9,
                                    const CslOptions& opts = {}) {
  detail::require_conic_system(sys);
  if (sys.states() > 0 && !is_hurwitz(sys.A)) throw NoSolutionError("estimate_symmetric_cone: A is not Hurwitz");
  const auto n = sys.states();
  double gamma = 1.0;
  if (n > 0) {
    const Matrix W = sys.C.transpose() * sys.C + sys.B * sys.B.transpose() + eps * Matrix::Identity(n, n);
    const Matrix P = solve_lyapunov(sys.A, W).X;
    Eigen::SelfAdjointEigenSolver<Matrix> es(P, Eigen::EigenvaluesOnly);
    gamma = (1.0 + margin) * es.eigenvalues().cwiseAbs().maxCoeff();
  }
  gamma = std::max(gamma, std::numeric_limits<double>::min() * 1e10);
  for (int k = 0; k < 60; ++k) {
    const Cone c(-gamma, gamma);
    if (csl_check(sys, c, 3, opts).feasible) return c;
    gamma *= 2.0;
  }
  throw NoSolutionError("estimate_symmetric_cone: no certified symmetric cone found");
}

/// Output scale min(a/a0, b/b0) that maps cone(a0, b0) inside cone(a, b).
inline double cone_scale_factor(const Cone& current, const Cone& target) {
  current.validate();
  target.validate();
  return std::min(target.a / current.a, target.b / current.b);
}

/// Scales the output matrix so that a system certified in `current` lies in
/// `target`.
inline StateSpace scale_into_cone(const StateSpace& sys, const Cone& current, const Cone& target,
                                  const CslOptions& opts = {}) {
  detail::require_conic_system(sys);
  if (!csl_check(sys, current, 1, opts).feasible)
    throw InvalidArgument("scale_into_cone: system is not certified in the current cone");
  const double k = cone_scale_factor(current, target);
  return StateSpace(sys.A, sys.B, k * sys.C, sys.D);
}

/// Strict sector (-1/b, -1/a) a loop partner must occupy for a plant in [a, b].
inline Cone cst_complement(const Cone& cone) {
  cone.validate();
  return Cone(-1.0 / cone.b, -1.0 / cone.a, true, cone.margin);
}

}  // namespace conic_h2
