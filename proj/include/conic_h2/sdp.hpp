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

// Solver-agnostic description of semidefinite programs over matrix-valued
// decision variables, plus a dense primal-dual interior-point backend.
//
// A program minimizes c^T y + 1/2 y^T diag(h) y + const over the stacked
// scalar unknowns y of all declared variables, subject to affine matrix
// constraints G(y) >= margin*I (PSD), G(y) <= -margin*I (NSD) or G(y) = 0.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conic_h2/errors.hpp"
#include "conic_h2/lti.hpp"

namespace conic_h2::sdp {

enum class VarKind { Full, Symmetric };
enum class Sense { PSD, NSD, Zero };
enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::PSD: return "psd";
    case Sense::NSD: return "nsd";
    case Sense::Zero: return "zero";
  }
  return "unknown";
}

/// Handle to a declared matrix variable.
struct VarRef {
  int id = -1;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::Full;
  /// index(i, j) is the scalar slot of entry (i, j), or -1 for an entry pinned to zero.
  Eigen::MatrixXi index;

  Eigen::Index rows() const { return index.rows(); }
  Eigen::Index cols() const { return index.cols(); }
};

/// Matrix-valued affine function constant + sum_i y_i * terms[i].
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(Eigen::Index rows, Eigen::Index cols) : constant_(Matrix::Zero(rows, cols)) {}
  AffineExpr(Matrix constant) : constant_(std::move(constant)) {}  // NOLINT: implicit by intent

  static AffineExpr zero(Eigen::Index rows, Eigen::Index cols) { return AffineExpr(rows, cols); }
  static AffineExpr identity(Eigen::Index n) { return AffineExpr(Matrix(Matrix::Identity(n, n))); }

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  const Matrix& constant() const { return constant_; }
  Matrix& constant() { return constant_; }
  const std::map<int, Matrix>& terms() const { return terms_; }

  void add_term(int slot, const Matrix& coef) {
    if (coef.rows() != rows() || coef.cols() != cols()) throw DimensionError("AffineExpr::add_term: shape mismatch");
    auto it = terms_.find(slot);
    if (it == terms_.end())
      terms_.emplace(slot, coef);
    else
      it->second += coef;
  }

  Matrix evaluate(const Vector& y) const {
    Matrix out = constant_;
    for (const auto& [slot, coef] : terms_) out += y(slot) * coef;
    return out;
  }

  AffineExpr transpose() const {
    AffineExpr out(Matrix(constant_.transpose()));
    for (const auto& [slot, coef] : terms_) out.terms_.emplace(slot, coef.transpose());
    return out;
  }

  /// Drops coefficient matrices that are exactly zero.
  AffineExpr& prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->second.cwiseAbs().maxCoeff() == 0.0)
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  AffineExpr& operator+=(const AffineExpr& o) {
    check_same(o, "+");
    constant_ += o.constant_;
    for (const auto& [slot, coef] : o.terms_) add_term(slot, coef);
    return *this;
  }
  AffineExpr& operator-=(const AffineExpr& o) { return *this += -o; }
  AffineExpr& operator*=(double s) {
    constant_ *= s;
    for (auto& [slot, coef] : terms_) coef *= s;
    return *this;
  }

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }

  friend AffineExpr operator*(const Matrix& L, const AffineExpr& e) {
    if (L.cols() != e.rows()) throw DimensionError("Matrix * AffineExpr: " + shape(L) + " * " + e.shape_str());
    AffineExpr out(Matrix(L * e.constant_));
    for (const auto& [slot, coef] : e.terms_) out.terms_.emplace(slot, L * coef);
    return out.prune();
  }
  friend AffineExpr operator*(const AffineExpr& e, const Matrix& R) {
    if (e.cols() != R.rows()) throw DimensionError("AffineExpr * Matrix: " + e.shape_str() + " * " + shape(R));
    AffineExpr out(Matrix(e.constant_ * R));
    for (const auto& [slot, coef] : e.terms_) out.terms_.emplace(slot, coef * R);
    return out.prune();
  }

  std::string shape_str() const { return std::to_string(rows()) + "x" + std::to_string(cols()); }

  double symmetry_defect() const {
    double d = conic_h2::symmetry_defect(constant_);
    for (const auto& [slot, coef] : terms_) d = std::max(d, conic_h2::symmetry_defect(coef));
    return d;
  }

 private:
  void check_same(const AffineExpr& o, const char* op) const {
    if (o.rows() != rows() || o.cols() != cols())
      throw DimensionError(std::string("AffineExpr ") + op + ": " + shape_str() + " vs " + o.shape_str());
  }

  Matrix constant_;
  std::map<int, Matrix> terms_;
};

/// He[M] = M + M^T.
inline AffineExpr he(const AffineExpr& e) { return e + e.transpose(); }

/// Assembles a block matrix from rows of expressions.
inline AffineExpr blocks(const std::vector<std::vector<AffineExpr>>& grid) {
  if (grid.empty()) return AffineExpr(0, 0);
  std::vector<Eigen::Index> heights, widths;
  for (const auto& row : grid) {
    if (row.size() != grid.front().size()) throw DimensionError("blocks: ragged block rows");
    heights.push_back(row.front().rows());
  }
  for (const auto& e : grid.front()) widths.push_back(e.cols());
  Eigen::Index total_r = 0, total_c = 0;
  for (auto h : heights) total_r += h;
  for (auto w : widths) total_c += w;
  AffineExpr out(total_r, total_c);
  Eigen::Index r0 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Eigen::Index c0 = 0;
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      const auto& e = grid[i][j];
      if (e.rows() != heights[i] || e.cols() != widths[j])
        throw DimensionError("blocks: block (" + std::to_string(i) + "," + std::to_string(j) + ") is " +
                             e.shape_str() + ", expected " + std::to_string(heights[i]) + "x" +
                             std::to_string(widths[j]));
      out.constant().block(r0, c0, heights[i], widths[j]) = e.constant();
      for (const auto& [slot, coef] : e.terms()) {
        Matrix full = Matrix::Zero(total_r, total_c);
        full.block(r0, c0, heights[i], widths[j]) = coef;
        out.add_term(slot, full);
      }
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  return out;
}

/// Symmetric block matrix from its lower triangle: row i lists blocks (i,0)..(i,i);
/// the upper triangle is filled with transposes (the "*" entries of a printed LMI).
inline AffineExpr symmetric_blocks(const std::vector<std::vector<AffineExpr>>& lower) {
  const std::size_t k = lower.size();
  std::vector<std::vector<AffineExpr>> grid(k, std::vector<AffineExpr>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (lower[i].size() != i + 1) throw DimensionError("symmetric_blocks: row " + std::to_string(i) + " must hold " +
                                                       std::to_string(i + 1) + " blocks");
    for (std::size_t j = 0; j <= i; ++j) {
      grid[i][j] = lower[i][j];
      if (j != i) grid[j][i] = lower[i][j].transpose();
    }
  }
  return blocks(grid);
}

struct Constraint {
  std::string name;
  AffineExpr expr;
  Sense sense = Sense::PSD;
  double margin = 0.0;
};

class SdpProgram {
 public:
  VarRef add_variable(const std::string& name, Eigen::Index rows, Eigen::Index cols, VarKind kind,
                      const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& pinned = {}) {
    if (kind == VarKind::Symmetric && rows != cols) throw DimensionError("symmetric variable must be square");
    const bool has_pins = pinned.size() > 0;
    if (has_pins && (pinned.rows() != rows || pinned.cols() != cols))
      throw DimensionError("pin mask shape mismatch for variable " + name);
    Variable v;
    v.name = sanitize(name);
    v.kind = kind;
    v.index = Eigen::MatrixXi::Constant(rows, cols, -1);
    const int first = num_scalars_;
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = (kind == VarKind::Symmetric ? i : 0); j < cols; ++j) {
        bool pin = has_pins && pinned(i, j);
        if (kind == VarKind::Symmetric && has_pins) pin = pin || pinned(j, i);
        if (pin) continue;
        v.index(i, j) = num_scalars_;
        if (kind == VarKind::Symmetric) v.index(j, i) = num_scalars_;
        ++num_scalars_;
      }
    }
    vars_.push_back(std::move(v));
    linear_.conservativeResize(num_scalars_);
    quad_.conservativeResize(num_scalars_);
    linear_.tail(num_scalars_ - first).setZero();
    quad_.tail(num_scalars_ - first).setZero();
    return VarRef{static_cast<int>(vars_.size()) - 1};
  }

  VarRef add_scalar(const std::string& name) { return add_variable(name, 1, 1, VarKind::Full); }

  const Variable& variable(VarRef v) const { return vars_.at(static_cast<std::size_t>(v.id)); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  int num_scalars() const { return num_scalars_; }

  /// The variable as an affine expression.
  AffineExpr expr(VarRef ref) const {
    const auto& v = variable(ref);
    AffineExpr out(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const int slot = v.index(i, j);
        if (slot < 0 || (v.kind == VarKind::Symmetric && j < i)) continue;
        Matrix coef = Matrix::Zero(v.rows(), v.cols());
        coef(i, j) = 1.0;
        if (v.kind == VarKind::Symmetric) coef(j, i) = 1.0;
        out.add_term(slot, coef);
      }
    }
    return out;
  }

  void add_constraint(const std::string& name, const AffineExpr& e, Sense sense, double margin = 0.0) {
    if (sense != Sense::Zero) {
      if (e.rows() != e.cols()) throw DimensionError("constraint " + name + " must be square, got " + e.shape_str());
      double scale = std::max(1.0, e.constant().cwiseAbs().maxCoeff());
      if (e.symmetry_defect() > 1e-9 * scale) throw InvalidArgument("constraint " + name + " is not symmetric");
      if (margin < 0.0) throw InvalidArgument("constraint margin must be nonnegative");
    }
    AffineExpr stored = e;
    if (sense != Sense::Zero) {
      stored.constant() = symmetrize(stored.constant());
      AffineExpr sym(stored.constant());
      for (const auto& [slot, coef] : stored.terms()) sym.add_term(slot, symmetrize(coef));
      stored = std::move(sym);
    }
    stored.prune();
    constraints_.push_back({sanitize(name), std::move(stored), sense, margin});
  }
  void add_psd(const std::string& name, const AffineExpr& e, double margin = 0.0) {
    add_constraint(name, e, Sense::PSD, margin);
  }
  void add_nsd(const std::string& name, const AffineExpr& e, double margin = 0.0) {
    add_constraint(name, e, Sense::NSD, margin);
  }
  void add_zero(const std::string& name, const AffineExpr& e) { add_constraint(name, e, Sense::Zero); }

  /// Adds weight * tr(e) to the objective.
  void add_trace_objective(const AffineExpr& e, double weight = 1.0) {
    if (e.rows() != e.cols()) throw DimensionError("trace objective needs a square expression");
    constant_ += weight * e.constant().trace();
    for (const auto& [slot, coef] : e.terms()) linear_(slot) += weight * coef.trace();
  }
  void add_linear_objective(int slot, double coef) { linear_(slot) += coef; }
  void add_objective_constant(double c) { constant_ += c; }

  /// Adds weight * ||v||_F^2 (symmetric off-diagonal slots count twice).
  void add_frobenius_penalty(VarRef ref, double weight) {
    if (weight < 0.0) throw InvalidArgument("penalty weight must be nonnegative");
    const auto& v = variable(ref);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        if (v.index(i, j) >= 0) quad_(v.index(i, j)) += 2.0 * weight;
  }
  void add_quadratic_objective(int slot, double hdiag) { quad_(slot) += hdiag; }

  const Vector& linear_objective() const { return linear_; }
  const Vector& quadratic_diagonal() const { return quad_; }
  double objective_constant() const { return constant_; }

  double objective_value(const Vector& y) const {
    return linear_.dot(y) + 0.5 * (quad_.array() * y.array().square()).sum() + constant_;
  }

  Matrix value(const Vector& y, VarRef ref) const {
    const auto& v = variable(ref);
    Matrix out = Matrix::Zero(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        if (v.index(i, j) >= 0) out(i, j) = y(v.index(i, j));
    return out;
  }

  /// Writes the entries of `value` into the slots of `ref` inside y.
  void assign(Vector& y, VarRef ref, const Matrix& value) const {
    const auto& v = variable(ref);
    if (value.rows() != v.rows() || value.cols() != v.cols()) throw DimensionError("assign: shape mismatch");
    if (y.size() != num_scalars_) y = Vector::Zero(num_scalars_);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        if (v.index(i, j) >= 0) y(v.index(i, j)) = value(i, j);
  }

  /// Optional point expected to satisfy every inequality strictly. The
  /// backend starts from it when it does.
  void set_start(Vector y) { start_ = std::move(y); }
  const Vector& start() const { return start_; }

  /// Largest violation of any constraint at y, measured relative to
  /// max(1, |constant part|) of each constraint.
  double max_violation(const Vector& y) const {
    double worst = 0.0;
    for (const auto& c : constraints_) worst = std::max(worst, violation(c, y));
    return worst;
  }

  static double violation(const Constraint& c, const Vector& y) {
    const Matrix G = c.expr.evaluate(y);
    const double scale = std::max(1.0, c.expr.constant().norm());
    if (G.size() == 0) return 0.0;
    if (c.sense == Sense::Zero) return G.cwiseAbs().maxCoeff() / scale;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(G), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double v = c.sense == Sense::PSD ? c.margin - ev.minCoeff() : ev.maxCoeff() + c.margin;
    return std::max(0.0, v) / scale;
  }

  /// Human-readable dump; from_text() re-parses it exactly.
  std::string to_text() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "sdp-program v1\n";
    for (const auto& v : vars_) {
      os << "var " << v.name << ' ' << (v.kind == VarKind::Symmetric ? "sym" : "full") << ' ' << v.rows() << ' '
         << v.cols() << '\n';
      for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = (v.kind == VarKind::Symmetric ? i : 0); j < v.cols(); ++j)
          if (v.index(i, j) < 0) os << "  pin " << i << ' ' << j << '\n';
    }
    os << "objective constant " << constant_ << '\n';
    for (int s = 0; s < num_scalars_; ++s) {
      if (linear_(s) != 0.0) os << "objective linear " << s << ' ' << linear_(s) << '\n';
      if (quad_(s) != 0.0) os << "objective quadratic " << s << ' ' << quad_(s) << '\n';
    }
    for (const auto& c : constraints_) {
      os << "constraint " << c.name << ' ' << to_string(c.sense) << ' ' << c.expr.rows() << ' ' << c.expr.cols()
         << ' ' << c.margin << '\n';
      write_entries(os, "  const", c.expr.constant());
      for (const auto& [slot, coef] : c.expr.terms()) {
        os << "  term " << slot << '\n';
        write_entries(os, "    at", coef);
      }
      os << "end\n";
    }
    return os.str();
  }

  static SdpProgram from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    SdpProgram p;
    std::getline(is, line);
    if (line.rfind("sdp-program v1", 0) != 0) throw InvalidArgument("from_text: missing header");
    std::string pending_name;
    VarKind pending_kind = VarKind::Full;
    Eigen::Index pr = 0, pc = 0;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pins;
    bool have_pending = false;
    auto flush = [&]() {
      if (have_pending) p.add_variable(pending_name, pr, pc, pending_kind, pins);
      have_pending = false;
    };
    std::optional<Constraint> cur;
    int cur_slot = -1;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      std::string tok;
      if (!(ls >> tok)) continue;
      if (tok == "var") {
        flush();
        std::string kind;
        ls >> pending_name >> kind >> pr >> pc;
        pending_kind = kind == "sym" ? VarKind::Symmetric : VarKind::Full;
        pins = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(pr, pc, false);
        have_pending = true;
      } else if (tok == "pin") {
        Eigen::Index i, j;
        ls >> i >> j;
        pins(i, j) = true;
      } else if (tok == "objective") {
        flush();
        std::string what;
        ls >> what;
        if (what == "constant") {
          ls >> p.constant_;
        } else {
          int s;
          double val;
          ls >> s >> val;
          if (what == "linear")
            p.linear_(s) = val;
          else
            p.quad_(s) = val;
        }
      } else if (tok == "constraint") {
        flush();
        Constraint c;
        std::string sense;
        Eigen::Index r, cc;
        ls >> c.name >> sense >> r >> cc >> c.margin;
        c.sense = sense == "psd" ? Sense::PSD : sense == "nsd" ? Sense::NSD : Sense::Zero;
        c.expr = AffineExpr(r, cc);
        cur = std::move(c);
        cur_slot = -1;
      } else if (tok == "const" && cur) {
        Eigen::Index i, j;
        double val;
        ls >> i >> j >> val;
        cur->expr.constant()(i, j) = val;
      } else if (tok == "term" && cur) {
        ls >> cur_slot;
        cur->expr.add_term(cur_slot, Matrix::Zero(cur->expr.rows(), cur->expr.cols()));
      } else if (tok == "at" && cur) {
        Eigen::Index i, j;
        double val;
        ls >> i >> j >> val;
        cur->expr.add_term(cur_slot, unit(cur->expr.rows(), cur->expr.cols(), i, j, val));
      } else if (tok == "end" && cur) {
        p.constraints_.push_back(std::move(*cur));
        cur.reset();
      } else {
        throw InvalidArgument("from_text: unexpected line '" + line + "'");
      }
    }
    flush();
    return p;
  }

 private:
  static std::string sanitize(std::string s) {
    for (auto& ch : s)
      if (std::isspace(static_cast<unsigned char>(ch))) ch = '_';
    return s.empty() ? std::string("_") : s;
  }
  static Matrix unit(Eigen::Index r, Eigen::Index c, Eigen::Index i, Eigen::Index j, double v) {
    Matrix M = Matrix::Zero(r, c);
    M(i, j) = v;
    return M;
  }
  static void write_entries(std::ostream& os, const char* tag, const Matrix& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      for (Eigen::Index j = 0; j < M.cols(); ++j)
        if (M(i, j) != 0.0) os << tag << ' ' << i << ' ' << j << ' ' << M(i, j) << '\n';
  }

  std::vector<Variable> vars_;
  std::vector<Constraint> constraints_;
  int num_scalars_ = 0;
  Vector linear_ = Vector(0);
  Vector quad_ = Vector(0);
  double constant_ = 0.0;
  Vector start_ = Vector(0);
};

struct SdpOptions {
  /// Largest relative constraint violation accepted for an optimal status.
  double feas_tol = 1e-7;
  /// Largest relative duality gap accepted for an optimal status.
  double rel_tol = 1e-7;
  /// Stopping targets; the solver keeps iterating past the acceptance levels
  /// while it can still make progress.
  double target_feas = 1e-10;
  double target_gap = 1e-10;
  /// Largest relative stationarity residual accepted when stopping early.
  double stat_tol = 1e-5;
  int max_iters = 120;
  bool verbose = false;
};

struct SdpSolution {
  Status status = Status::NumericalFailure;
  Vector y;
  double objective = 0.0;
  double max_violation = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == Status::Optimal; }
  /// A numerical failure that still returned a point within tol of every constraint.
  bool feasible_point(double tol) const {
    return status == Status::NumericalFailure && y.size() > 0 && y.allFinite() && max_violation <= tol;
  }
};

/// Backend contract: any solver that maps an SdpProgram to a status-tagged solution.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual SdpSolution solve(const SdpProgram& program, const SdpOptions& opts) const = 0;
};

/// Infeasible-start primal-dual path following with the HKM search direction
/// and Mehrotra predictor-corrector steps. Dense; meant for problems with a
/// few hundred scalars and blocks of size up to ~100.
class InteriorPointBackend final : public Backend {
 public:
  std::string name() const override { return "dense-hkm-ipm"; }

  SdpSolution solve(const SdpProgram& program, const SdpOptions& opts) const override {
    try {
      return solve_impl(program, opts);
    } catch (const std::exception& e) {
      SdpSolution s;
      s.status = Status::NumericalFailure;
      s.y = Vector::Zero(program.num_scalars());
      s.message = std::string("backend exception: ") + e.what();
      return s;
    }
  }

 private:
  struct Block {
    Eigen::Index dim = 0;
    Matrix C;                // S = C - sum_i y_i A_i
    std::vector<int> slots;  // scalars with nonzero A_i in this block
    Matrix Acols;            // dim*dim x slots.size(), column k is vec(A_{slots[k]})
  };

  static Eigen::Map<const Matrix> as_mat(const double* data, Eigen::Index d) { return {data, d, d}; }

  static double min_eigenvalue_of(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    return Eigen::SelfAdjointEigenSolver<Matrix>(A, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  }

  static double max_step(const Eigen::LLT<Matrix>& L, const Matrix& D) {
    Matrix T = L.matrixL().solve(D);
    T = L.matrixL().solve(T.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(T), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
  }

  SdpSolution solve_impl(const SdpProgram& prog, const SdpOptions& opts) const {
    const int nv0 = prog.num_scalars();
    SdpSolution sol;
    sol.y = Vector::Zero(nv0);

    // Objective scaling; the quadratic terms become 2x2 epigraph blocks
    // [t, y; y, 2/h] >= 0 so the solver works on a linear program.
    const Vector& c0 = prog.linear_objective();
    const Vector& h0 = prog.quadratic_diagonal();
    if (h0.size() && h0.minCoeff() < 0.0) throw InvalidArgument("sdp: negative quadratic weight");
    const double oscale =
        1.0 / std::max({1.0, c0.size() ? c0.cwiseAbs().maxCoeff() : 0.0, h0.size() ? h0.maxCoeff() : 0.0});
    std::vector<int> qslots;
    for (int i = 0; i < nv0; ++i)
      if (h0.size() && h0(i) > 0.0) qslots.push_back(i);
    const int nq = static_cast<int>(qslots.size());
    const int nv = nv0 + nq;
    Vector bvec = Vector::Zero(nv);
    if (c0.size()) bvec.head(nv0) = -c0 * oscale;
    bvec.tail(nq).setConstant(-1.0);

    // Conic blocks and equality rows.
    std::vector<Block> blocks;
    std::vector<Eigen::RowVectorXd> eq_rows;
    std::vector<double> eq_rhs;
    for (const auto& c : prog.constraints()) {
      const auto& e = c.expr;
      if (c.sense == Sense::Zero) {
        for (Eigen::Index i = 0; i < e.rows(); ++i) {
          for (Eigen::Index j = 0; j < e.cols(); ++j) {
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
            for (const auto& [slot, coef] : e.terms()) row(slot) = coef(i, j);
            const double rhs = -e.constant()(i, j);
            if (row.cwiseAbs().maxCoeff() == 0.0) {
              if (std::abs(rhs) > 1e-12) {
                sol.status = Status::Infeasible;
                sol.message = "constant equality " + c.name + " cannot hold";
                return sol;
              }
              continue;
            }
            eq_rows.push_back(row);
            eq_rhs.push_back(rhs);
          }
        }
        continue;
      }
      if (e.rows() == 0) continue;
      Block b;
      b.dim = e.rows();
      const double sign = c.sense == Sense::PSD ? 1.0 : -1.0;
      b.C = sign * e.constant() - c.margin * Matrix::Identity(b.dim, b.dim);
      double scale = b.C.norm();
      for (const auto& [slot, coef] : e.terms()) scale = std::max(scale, coef.norm());
      if (scale == 0.0) scale = 1.0;
      b.C /= scale;
      b.Acols.resize(b.dim * b.dim, static_cast<Eigen::Index>(e.terms().size()));
      Eigen::Index k = 0;
      for (const auto& [slot, coef] : e.terms()) {
        b.slots.push_back(slot);
        const Matrix A = -sign * coef / scale;
        b.Acols.col(k++) = Eigen::Map<const Vector>(A.data(), A.size());
      }
      blocks.push_back(std::move(b));
    }
    for (int j = 0; j < nq; ++j) {
      const double w = 2.0 / (h0(qslots[j]) * oscale);
      const double scale = std::max(1.0, w);
      Block b;
      b.dim = 2;
      b.C = Matrix::Zero(2, 2);
      b.C(1, 1) = w / scale;
      b.slots = {nv0 + j, qslots[j]};
      b.Acols = Matrix::Zero(4, 2);
      b.Acols(0, 0) = -1.0 / scale;
      b.Acols(1, 1) = b.Acols(2, 1) = -1.0 / scale;
      blocks.push_back(std::move(b));
    }
    const auto neq = static_cast<Eigen::Index>(eq_rows.size());
    Matrix E(neq, nv);
    Vector e_rhs(neq);
    for (Eigen::Index i = 0; i < neq; ++i) {
      const double s = std::max(1.0, eq_rows[i].norm());
      E.row(i) = eq_rows[i] / s;
      e_rhs(i) = eq_rhs[i] / s;
    }

    std::size_t ntot = 0;
    for (const auto& b : blocks) ntot += static_cast<std::size_t>(b.dim);

    auto apply_A = [&](const std::vector<Matrix>& Y) {
      Vector out = Vector::Zero(nv);
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        if (b.slots.empty()) continue;
        const Vector v = b.Acols.transpose() * Eigen::Map<const Vector>(Y[k].data(), Y[k].size());
        for (std::size_t j = 0; j < b.slots.size(); ++j) out(b.slots[j]) += v(static_cast<Eigen::Index>(j));
      }
      return out;
    };
    auto apply_At = [&](const Vector& y, std::size_t k) {
      const auto& b = blocks[k];
      Vector ys(static_cast<Eigen::Index>(b.slots.size()));
      for (std::size_t j = 0; j < b.slots.size(); ++j) ys(static_cast<Eigen::Index>(j)) = y(b.slots[j]);
      Matrix out = Matrix::Zero(b.dim, b.dim);
      if (!b.slots.empty()) {
        const Vector v = b.Acols * ys;
        out = Eigen::Map<const Matrix>(v.data(), b.dim, b.dim);
      }
      return out;
    };
    auto identity = [](Eigen::Index d) { return Matrix(Matrix::Identity(d, d)); };

    // Starting point.
    double normC = 0.0;
    for (const auto& b : blocks) normC += b.C.squaredNorm();
    normC = std::sqrt(normC);
    const double normb = bvec.norm();
    const double norme = e_rhs.norm();
    std::vector<Matrix> X(blocks.size()), S(blocks.size());
    Vector y = Vector::Zero(nv);
    Vector lam = Vector::Zero(neq);
    if (prog.start().size() == nv0 && prog.start().allFinite()) {
      // Start at the hint, centered. Blocks it leaves on or past the boundary
      // get a small shift and a modest dual residual.
      y.head(nv0) = prog.start();
      for (int j = 0; j < nq; ++j) {
        const double yi = y(qslots[j]);
        y(nv0 + j) = 0.5 * h0(qslots[j]) * oscale * yi * yi + 1.0;
      }
      double sx = 0.0;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        S[k] = symmetrize(blocks[k].C - apply_At(y, k));
        const double floor = 1e-3 * std::max(1.0, S[k].norm() / std::sqrt(static_cast<double>(blocks[k].dim)));
        const double lmin = min_eigenvalue_of(S[k]);
        if (lmin < floor) S[k].diagonal().array() += floor - lmin;
        sx += S[k].trace();
      }
      const double mu0 = std::max(1.0, normb) * std::max(1.0, sx) / static_cast<double>(ntot);
      for (std::size_t k = 0; k < blocks.size(); ++k)
        X[k] = symmetrize(mu0 * Eigen::LLT<Matrix>(S[k]).solve(identity(blocks[k].dim)));
    } else {
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const double d = static_cast<double>(blocks[k].dim);
        const double xi = std::max({10.0, std::sqrt(d), d * (1.0 + normb)});
        const double eta = std::max({10.0, std::sqrt(d), 1.0 + normC});
        X[k] = xi * identity(blocks[k].dim);
        S[k] = eta * identity(blocks[k].dim);
      }
    }

    Vector best_y = y;
    double best_merit = std::numeric_limits<double>::infinity();
    double best_pinf = best_merit, best_gap = best_merit, last_gap = best_merit;
    int stalls = 0;
    std::string stop_reason = "iteration limit";
    bool converged = false;

    for (int it = 0; it < opts.max_iters; ++it) {
      sol.iterations = it;
      std::vector<Eigen::LLT<Matrix>> Lx(blocks.size()), Ls(blocks.size());
      std::vector<Matrix> Sinv(blocks.size()), Rd(blocks.size());
      bool chol_ok = true;
      double gap = 0.0, dinf2 = 0.0;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        Lx[k].compute(X[k]);
        Ls[k].compute(S[k]);
        if (Lx[k].info() != Eigen::Success || Ls[k].info() != Eigen::Success) chol_ok = false;
        Sinv[k] = symmetrize(Ls[k].solve(identity(blocks[k].dim)));
        gap += X[k].cwiseProduct(S[k]).sum();
        Rd[k] = blocks[k].C - S[k] - apply_At(y, k);
        dinf2 += Rd[k].squaredNorm();
      }
      if (!chol_ok) {
        stop_reason = "lost positive definiteness";
        break;
      }
      const double mu = ntot ? gap / static_cast<double>(ntot) : 0.0;
      const Vector AX = apply_A(X);
      const Vector rp = bvec + E.transpose() * lam - AX;
      const Vector re = e_rhs - E * y;
      const double f = -bvec.dot(y);
      const double pinf = rp.norm() / (1.0 + normb);
      const double dinf = std::sqrt(dinf2) / (1.0 + normC);
      const double einf = re.norm() / (1.0 + norme);
      const double relgap = gap / (1.0 + std::abs(f));
      last_gap = relgap;
      if (opts.verbose)
        std::fprintf(stderr, "ipm %3d  f=% .10e  gap=%.2e  pinf=%.2e  dinf=%.2e  einf=%.2e\n", it, f / oscale, relgap,
                     pinf, dinf, einf);

      const double merit = std::max({pinf / opts.stat_tol, relgap / opts.rel_tol, dinf / 1e-6, einf / 1e-6});
      if (dinf < 1e-6 && einf < 1e-6 && merit < best_merit) {
        best_merit = merit;
        best_pinf = pinf;
        best_gap = relgap;
        best_y = y;
      }
      if (std::max({pinf, dinf, einf}) <= opts.target_feas && relgap <= opts.target_gap) {
        converged = true;
        stop_reason = "converged";
        break;
      }
      // Farkas certificate for infeasibility of {y : S(y) >= 0, E y = e}.
      double cx = 0.0;
      for (std::size_t k = 0; k < blocks.size(); ++k) cx += blocks[k].C.cwiseProduct(X[k]).sum();
      const double den = -(cx - e_rhs.dot(lam));
      if (den > 0.0) {
        const double ratio = (AX - E.transpose() * lam).norm() / den;
        if (ratio < 1e-8 && dinf > 1e-8) {
          sol.status = Status::Infeasible;
          sol.y = y.head(nv0);
          sol.iterations = it;
          sol.message = "Farkas certificate found (ratio " + std::to_string(ratio) + ")";
          return sol;
        }
      }
      if (f < -1e12 && dinf < 1e-6) {
        sol.status = Status::Unbounded;
        sol.y = y.head(nv0);
        sol.message = "objective diverges to -infinity";
        return sol;
      }

      // Schur complement M_ij = <A_i, X A_j S^{-1}>.
      Matrix M = Matrix::Zero(nv, nv);
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        if (b.slots.empty()) continue;
        // Gram form <R^T A_i L^-T, R^T A_j L^-T> with X = R R^T, S = L L^T.
        const Matrix Rt = Lx[k].matrixU();
        Matrix G(b.dim * b.dim, static_cast<Eigen::Index>(b.slots.size()));
        for (std::size_t j = 0; j < b.slots.size(); ++j) {
          const auto Aj = as_mat(b.Acols.col(static_cast<Eigen::Index>(j)).data(), b.dim);
          const Matrix T = Rt * Matrix(Ls[k].matrixL().solve(Aj)).transpose();
          G.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(T.data(), T.size());
        }
        const Matrix Mb = G.transpose() * G;
        for (std::size_t i = 0; i < b.slots.size(); ++i)
          for (std::size_t j = 0; j < b.slots.size(); ++j)
            M(b.slots[i], b.slots[j]) += Mb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      M = symmetrize(M);
      // Jacobi scaling: the diagonal spans many decades near the optimum.
      const Vector dsc = M.diagonal().cwiseAbs().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
      Matrix Ms = dsc.asDiagonal() * M * dsc.asDiagonal();
      Ms.diagonal().array() += 1e-14;
      const Eigen::LDLT<Matrix> Mfac_s(Ms);
      if (Mfac_s.info() != Eigen::Success) {
        stop_reason = "Schur complement factorization failed";
        break;
      }
      Matrix MinvEt;
      Eigen::LDLT<Matrix> Efac;
      if (neq > 0) {
        MinvEt = dsc.asDiagonal() * Mfac_s.solve(Matrix(dsc.asDiagonal() * E.transpose()));
        Matrix SE = E * MinvEt;
        SE.diagonal().array() += 1e-14 * std::max(1.0, SE.diagonal().cwiseAbs().maxCoeff());
        Efac.compute(SE);
      }

      // Direction for complementarity target K_b: dX = sym(K_b - X dS S^{-1}).
      struct Dir {
        Vector dy, dlam;
        std::vector<Matrix> dX, dS;
      };
      auto direction = [&](const std::vector<Matrix>& K) {
        std::vector<Matrix> T(blocks.size());
        for (std::size_t k = 0; k < blocks.size(); ++k) T[k] = K[k] - X[k] * Rd[k] * Sinv[k];
        const Vector h = rp - apply_A(T);
        Dir d;
        auto msolve = [&](const Vector& r) {
          auto base = [&](const Vector& v) -> Vector { return dsc.cwiseProduct(Mfac_s.solve(Vector(dsc.cwiseProduct(v)))); };
          Vector x = base(r);
          for (int pass = 0; pass < 2; ++pass) x += base(r - M * x);
          return x;
        };
        if (neq > 0) {
          const Vector Mh = msolve(h);
          d.dlam = Efac.solve(re - E * Mh);
          d.dy = Mh + MinvEt * d.dlam;
        } else {
          d.dlam = Vector(0);
          d.dy = msolve(h);
        }
        d.dX.resize(blocks.size());
        d.dS.resize(blocks.size());
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          d.dS[k] = Rd[k] - apply_At(d.dy, k);
          d.dX[k] = symmetrize(K[k] - X[k] * d.dS[k] * Sinv[k]);
        }
        return d;
      };
      // Largest primal (X) and dual (S) steps keeping positive definiteness.
      auto step_lengths = [&](const Dir& d) {
        double ax = std::numeric_limits<double>::infinity(), as = ax;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          ax = std::min(ax, max_step(Lx[k], d.dX[k]));
          as = std::min(as, max_step(Ls[k], d.dS[k]));
        }
        return std::pair{ax, as};
      };

      std::vector<Matrix> K(blocks.size());
      for (std::size_t k = 0; k < blocks.size(); ++k) K[k] = -X[k];
      const Dir pred = direction(K);
      const auto [px, ps] = step_lengths(pred);
      const double apx = std::min(1.0, px), aps = std::min(1.0, ps);
      double gap_aff = 0.0;
      for (std::size_t k = 0; k < blocks.size(); ++k)
        gap_aff += (X[k] + apx * pred.dX[k]).cwiseProduct(S[k] + aps * pred.dS[k]).sum();
      const double mu_aff = ntot ? gap_aff / static_cast<double>(ntot) : 0.0;
      const double sigma = mu > 0.0 ? std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0) : 0.0;
      for (std::size_t k = 0; k < blocks.size(); ++k)
        K[k] = sigma * mu * Sinv[k] - X[k] - pred.dX[k] * pred.dS[k] * Sinv[k];
      const Dir corr = direction(K);
      const auto [cx_max, cs_max] = step_lengths(corr);
      const double tau = relgap < 1e-4 ? 0.99 : 0.95;
      const double ax = std::min(1.0, tau * cx_max), as = std::min(1.0, tau * cs_max);
      if (!std::isfinite(ax) || !std::isfinite(as) || std::min(ax, as) < 1e-12) {
        if (++stalls > 3) {
          stop_reason = "step length collapsed";
          break;
        }
      }
      y += as * corr.dy;
      if (neq > 0) lam += ax * corr.dlam;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        X[k] = symmetrize(X[k] + ax * corr.dX[k]);
        S[k] = symmetrize(S[k] + as * corr.dS[k]);
      }
      if (!y.allFinite()) {
        stop_reason = "non-finite iterate";
        break;
      }
      sol.iterations = it + 1;
    }

    if (!converged && best_merit < std::numeric_limits<double>::infinity()) y = best_y;
    sol.y = y.head(nv0);
    sol.objective = prog.objective_value(sol.y);
    sol.max_violation = prog.max_violation(sol.y);
    sol.gap = converged ? last_gap : best_gap;
    const bool acceptable =
        sol.max_violation <= opts.feas_tol && (converged || (best_gap <= opts.rel_tol && best_pinf <= opts.stat_tol));
    sol.status = acceptable ? Status::Optimal : Status::NumericalFailure;
    sol.message = stop_reason;
    return sol;
  }
};

inline SdpSolution solve(const SdpProgram& program, const SdpOptions& opts = {}) {
  return InteriorPointBackend{}.solve(program, opts);
}

}  // namespace conic_h2::sdp
