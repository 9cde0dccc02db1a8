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

// State-space containers and the dense linear-algebra kernels used throughout
// the toolkit: stability tests, Lyapunov and Riccati solvers, H2 norm and
// closed-loop assembly.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "conic_h2/errors.hpp"

namespace conic_h2 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default threshold for "strictly in the open left half plane".
inline constexpr double kHurwitzTol = 1e-9;

inline Matrix symmetrize(const Matrix& M) { return 0.5 * (M + M.transpose()); }

inline double symmetry_defect(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return (M - M.transpose()).cwiseAbs().maxCoeff();
}

inline std::string shape(const Matrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

inline void require_square(const Matrix& M, const char* name) {
  if (M.rows() != M.cols())
    throw DimensionError(std::string(name) + " must be square, got " + shape(M));
}

/// Linear time-invariant system x' = Ax + Bu, y = Cx + Du.
struct StateSpace {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  StateSpace() = default;
  StateSpace(Matrix a, Matrix b, Matrix c)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(Matrix::Zero(C.rows(), B.cols())) {
    validate();
  }
  StateSpace(Matrix a, Matrix b, Matrix c, Matrix d)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    validate();
  }

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
  bool is_square() const { return inputs() == outputs(); }
  bool strictly_proper() const { return D.size() == 0 || D.cwiseAbs().maxCoeff() == 0.0; }

  void validate() const {
    require_square(A, "A");
    const auto n = A.rows();
    if (B.rows() != n) throw DimensionError("B must have " + std::to_string(n) + " rows, got " + shape(B));
    if (C.cols() != n) throw DimensionError("C must have " + std::to_string(n) + " columns, got " + shape(C));
    if (D.rows() != C.rows() || D.cols() != B.cols())
      throw DimensionError("D must be " + std::to_string(C.rows()) + "x" + std::to_string(B.cols()) +
                           ", got " + shape(D));
  }

  /// G(s) = C (sI - A)^{-1} B + D evaluated at s.
  Eigen::MatrixXcd frequency_response(std::complex<double> s) const {
    const auto n = states();
    Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
    Eigen::MatrixXcd G = C.cast<std::complex<double>>() * M.partialPivLu().solve(B.cast<std::complex<double>>());
    return G + D.cast<std::complex<double>>();
  }
};

/// Generalized plant with disturbance w, control u, performance z and measurement y:
///   x' = A x + B1 w + B2 u,  z = C1 x + D12 u,  y = C2 x + D21 w.
struct Plant {
  Matrix A, B1, B2, C1, C2, D12, D21;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index p() const { return B1.cols(); }
  Eigen::Index m() const { return B2.cols(); }
  Eigen::Index q() const { return C1.rows(); }

  void validate() const {
    require_square(A, "A");
    const auto n = A.rows();
    auto rows = [](const Matrix& M, Eigen::Index r, const char* name) {
      if (M.rows() != r)
        throw DimensionError(std::string(name) + " must have " + std::to_string(r) + " rows, got " + shape(M));
    };
    auto cols = [](const Matrix& M, Eigen::Index c, const char* name) {
      if (M.cols() != c)
        throw DimensionError(std::string(name) + " must have " + std::to_string(c) + " columns, got " + shape(M));
    };
    rows(B1, n, "B1");
    rows(B2, n, "B2");
    cols(C1, n, "C1");
    cols(C2, n, "C2");
    rows(D12, C1.rows(), "D12");
    cols(D12, B2.cols(), "D12");
    rows(D21, C2.rows(), "D21");
    cols(D21, B1.cols(), "D21");
    if (C2.rows() != B2.cols())
      throw DimensionError("control channel must be square: " + std::to_string(B2.cols()) + " inputs vs " +
                           std::to_string(C2.rows()) + " measurements");
  }
};

/// Strictly proper fixed-order controller xh' = Ahat xh + Bhat y, yh = Chat xh; the
/// loop closes with u = -yh.
struct Controller {
  Matrix Ahat, Bhat, Chat;

  Eigen::Index order() const { return Ahat.rows(); }
  Eigen::Index channels() const { return Bhat.cols(); }

  void validate() const {
    require_square(Ahat, "Ahat");
    if (Bhat.rows() != Ahat.rows() || Chat.cols() != Ahat.rows())
      throw DimensionError("controller blocks disagree on the order: Ahat " + shape(Ahat) + ", Bhat " +
                           shape(Bhat) + ", Chat " + shape(Chat));
    if (Chat.rows() != Bhat.cols())
      throw DimensionError("controller must be square: Bhat " + shape(Bhat) + ", Chat " + shape(Chat));
  }

  StateSpace as_state_space() const { return StateSpace(Ahat, Bhat, Chat); }

  static Controller zero(Eigen::Index order, Eigen::Index channels) {
    return {Matrix::Zero(order, order), Matrix::Zero(order, channels), Matrix::Zero(channels, order)};
  }
};

inline Eigen::VectorXcd eigenvalues(const Matrix& A) {
  require_square(A, "A");
  if (A.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues();
}

inline double spectral_abscissa(const Matrix& A) {
  const auto ev = eigenvalues(A);
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& l : ev) s = std::max(s, l.real());
  return s;
}

/// True iff every eigenvalue of A has real part below -tol.
inline bool is_hurwitz(const Matrix& A, double tol = kHurwitzTol) {
  require_square(A, "A");
  if (!A.allFinite()) throw InvalidArgument("is_hurwitz: non-finite entries");
  if (A.rows() == 0) return true;
  return spectral_abscissa(A) < -tol;
}

namespace detail {

// PBH rank test of [lambda I - A, B] (or its dual) at every eigenvalue with
// real part >= -tol.
inline bool pbh_full_rank(const Matrix& A, const Matrix& B, double tol) {
  const auto n = A.rows();
  const auto ev = eigenvalues(A);
  for (const auto& l : ev) {
    if (l.real() < -tol) continue;
    Eigen::MatrixXcd M(n, n + B.cols());
    M.leftCols(n) = l * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
    M.rightCols(B.cols()) = B.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const auto& sv = svd.singularValues();
    const double scale = std::max(1.0, sv(0));
    if (sv(n - 1) <= 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace detail

inline bool is_stabilizable(const Matrix& A, const Matrix& B, double tol = kHurwitzTol) {
  return detail::pbh_full_rank(A, B, tol);
}

inline bool is_detectable(const Matrix& A, const Matrix& C, double tol = kHurwitzTol) {
  return detail::pbh_full_rank(A.transpose(), C.transpose(), tol);
}

/// Result of a Lyapunov solve. `warning` is non-empty when the spectrum of A
/// nearly pairs to zero or the residual check failed.
struct LyapunovSolution {
  Matrix X;
  double residual = 0.0;
  double separation = 0.0;
  std::string warning;
};

/// Solves A^T X + X A + W = 0 for Hurwitz A by complex Schur back substitution.
inline LyapunovSolution solve_lyapunov(const Matrix& A, const Matrix& W) {
  using cd = std::complex<double>;
  require_square(A, "A");
  require_square(W, "W");
  if (W.rows() != A.rows()) throw DimensionError("W must match A: " + shape(W) + " vs " + shape(A));
  const auto n = A.rows();
  LyapunovSolution out;
  if (n == 0) {
    out.X = Matrix(0, 0);
    return out;
  }
  if (!is_hurwitz(A)) throw NoSolutionError("solve_lyapunov: A is not Hurwitz");
  const double wscale = std::max(1.0, W.cwiseAbs().maxCoeff());
  if (symmetry_defect(W) > 1e-9 * wscale) throw InvalidArgument("solve_lyapunov: W is not symmetric");

  Eigen::ComplexSchur<Matrix> schur(A);
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();
  // T^H Y + Y T = -U^H W U
  Eigen::MatrixXcd Cm = -(U.adjoint() * W.cast<cd>() * U);
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
  double sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      cd acc = Cm(i, j);
      for (Eigen::Index k = 0; k < i; ++k) acc -= std::conj(T(k, i)) * Y(k, j);
      for (Eigen::Index k = 0; k < j; ++k) acc -= Y(i, k) * T(k, j);
      const cd d = std::conj(T(i, i)) + T(j, j);
      sep = std::min(sep, std::abs(d));
      Y(i, j) = acc / d;
    }
  }
  out.X = symmetrize((U * Y * U.adjoint()).real());
  out.separation = sep;
  const Matrix R = A.transpose() * out.X + out.X * A + W;
  out.residual = R.norm();
  const double bound = 1e-8 * (A.norm() * out.X.norm() + W.norm());
  if (sep < 1e-10 * std::max(1.0, A.norm()))
    out.warning = "ill-conditioned Lyapunov equation: eigenvalue pair separation " + std::to_string(sep);
  else if (out.residual > bound)
    out.warning = "Lyapunov residual " + std::to_string(out.residual) + " exceeds bound " + std::to_string(bound);
  return out;
}

/// Observability Gramian Q with A^T Q + Q A + C^T C = 0.
inline Matrix observability_gramian(const StateSpace& sys) {
  return solve_lyapunov(sys.A, sys.C.transpose() * sys.C).X;
}

/// Squared H2 norm tr(B^T Q B) of a strictly proper stable system.
inline double h2_norm_sq(const StateSpace& sys) {
  sys.validate();
  if (!sys.strictly_proper()) throw InvalidArgument("h2_norm_sq: system has feedthrough (infinite H2 norm)");
  if (sys.states() == 0) return 0.0;
  if (!is_hurwitz(sys.A)) throw InfiniteNormError("h2_norm_sq: system is not stable");
  const Matrix Q = observability_gramian(sys);
  return std::max(0.0, (sys.B.transpose() * Q * sys.B).trace());
}

namespace detail {

inline double log_abs_det(const Matrix& M) {
  Eigen::PartialPivLU<Matrix> lu(M);
  const Matrix& LU = lu.matrixLU();
  double s = 0.0;
  for (Eigen::Index i = 0; i < LU.rows(); ++i) s += std::log(std::abs(LU(i, i)));
  return s;
}

}  // namespace detail

/// Stabilizing solution of A^T X + X A - X B R^{-1} B^T X + Q = 0.
///
/// The stable invariant subspace of the Hamiltonian [A, -B R^{-1} B^T; -Q, -A^T]
/// is extracted with the scaled matrix sign iteration, followed by a single
/// Newton-Kleinman refinement step.
inline Matrix solve_riccati(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R) {
  require_square(A, "A");
  require_square(Q, "Q");
  require_square(R, "R");
  const auto n = A.rows();
  const auto m = B.cols();
  if (B.rows() != n || Q.rows() != n || R.rows() != m)
    throw DimensionError("solve_riccati: incompatible shapes A " + shape(A) + ", B " + shape(B) + ", Q " + shape(Q) +
                         ", R " + shape(R));
  if (symmetry_defect(Q) > 1e-9 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw InvalidArgument("solve_riccati: Q is not symmetric");
  Eigen::LLT<Matrix> Rllt(symmetrize(R));
  if (Rllt.info() != Eigen::Success) throw InvalidArgument("solve_riccati: R must be positive definite");
  if (n == 0) return Matrix(0, 0);
  if (!is_stabilizable(A, B)) throw NoSolutionError("solve_riccati: (A, B) is not stabilizable");

  const Matrix G = B * Rllt.solve(B.transpose());
  Matrix H(2 * n, 2 * n);
  H << A, -G, -symmetrize(Q), -A.transpose();

  const auto hev = eigenvalues(H);
  const double hscale = std::max(1.0, H.norm());
  for (const auto& l : hev)
    if (std::abs(l.real()) < 1e-10 * hscale)
      throw NoSolutionError("solve_riccati: Hamiltonian has eigenvalues on the imaginary axis");

  Matrix Z = H;
  const double N = static_cast<double>(2 * n);
  for (int it = 0; it < 200; ++it) {
    const double c = std::exp(-detail::log_abs_det(Z) / N);
    const Matrix Zs = c * Z;
    const Matrix Znext = 0.5 * (Zs + Zs.partialPivLu().inverse());
    const double change = (Znext - Z).norm() / std::max(1.0, Znext.norm());
    Z = Znext;
    if (!Z.allFinite()) throw NoSolutionError("solve_riccati: sign iteration diverged");
    if (change < 1e-13) break;
  }
  const Matrix I = Matrix::Identity(n, n);
  Matrix lhs(2 * n, n), rhs(2 * n, n);
  lhs << Z.topRightCorner(n, n), Z.bottomRightCorner(n, n) + I;
  rhs << Z.topLeftCorner(n, n) + I, Z.bottomLeftCorner(n, n);
  Matrix X = symmetrize(lhs.colPivHouseholderQr().solve(-rhs));

  // Newton-Kleinman refinement.
  Matrix K = Rllt.solve(B.transpose() * X);
  Matrix Ak = A - B * K;
  if (!is_hurwitz(Ak)) throw NoSolutionError("solve_riccati: no stabilizing solution");
  X = solve_lyapunov(Ak, symmetrize(Q + K.transpose() * R * K)).X;
  K = Rllt.solve(B.transpose() * X);
  if (!is_hurwitz(A - B * K)) throw NoSolutionError("solve_riccati: refined solution is not stabilizing");

  const Matrix res = A.transpose() * X + X * A - X * G * X + Q;
  const double scale = std::max(1.0, A.norm() * X.norm() + X.norm() * G.norm() * X.norm() + Q.norm());
  if (res.norm() > 1e-7 * scale) throw NoSolutionError("solve_riccati: residual check failed");
  return X;
}

/// Closed loop of plant and controller with u = -yh:
///   Acl = [A, -B2 Chat; Bhat C2, Ahat], Bcl = [B1; Bhat D21], Ccl = [C1, -D12 Chat].
inline StateSpace close_loop(const Plant& plant, const Controller& ctrl) {
  plant.validate();
  ctrl.validate();
  if (ctrl.channels() != plant.m())
    throw DimensionError("controller has " + std::to_string(ctrl.channels()) + " channels, plant has " +
                         std::to_string(plant.m()));
  const auto n = plant.n(), nc = ctrl.order();
  Matrix Acl(n + nc, n + nc), Bcl(n + nc, plant.p()), Ccl(plant.q(), n + nc);
  Acl << plant.A, -plant.B2 * ctrl.Chat, ctrl.Bhat * plant.C2, ctrl.Ahat;
  Bcl << plant.B1, ctrl.Bhat * plant.D21;
  Ccl << plant.C1, -plant.D12 * ctrl.Chat;
  return StateSpace(std::move(Acl), std::move(Bcl), std::move(Ccl));
}

/// Violations of the standard H2 assumptions, one message per failed check.
inline std::vector<std::string> check_plant_assumptions(const Plant& plant, double tol = 1e-9) {
  plant.validate();
  std::vector<std::string> issues;
  const Matrix cross = plant.D21 * plant.B1.transpose();
  if (cross.size() > 0 && cross.cwiseAbs().maxCoeff() > tol) issues.emplace_back("D21 * B1^T must vanish");
  if (!is_stabilizable(plant.A, plant.B2)) issues.emplace_back("(A, B2) is not stabilizable");
  if (!is_detectable(plant.A, plant.C2)) issues.emplace_back("(A, C2) is not detectable");
  return issues;
}

}  // namespace conic_h2
