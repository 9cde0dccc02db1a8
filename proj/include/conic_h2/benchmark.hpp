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

// Three-mass spring-damper chain: plant models, parameter grid, controller
// designs and the robustness comparison.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "conic_h2/conic.hpp"
#include "conic_h2/csv.hpp"
#include "conic_h2/initialization.hpp"
#include "conic_h2/synthesis.hpp"

namespace conic_h2::bench {

inline constexpr int kMasses = 3;

/// Masses (kg), spring constants (N/m) and damping (N s/m). Mass 1 hangs on
/// the wall through (k[0], c[0]); (k[1], c[1]) joins masses 1 and 2 and
/// (k[2], c[2]) joins masses 2 and 3.
struct ChainParams {
  std::array<double, kMasses> m{1.0, 1.0, 1.0};
  std::array<double, kMasses> k{1.0, 1.0, 1.0};
  std::array<double, kMasses> c{0.05, 0.05, 0.05};

  void validate() const {
    for (int i = 0; i < kMasses; ++i)
      if (!(m[i] > 0.0) || !(k[i] > 0.0) || !(c[i] >= 0.0) || !std::isfinite(m[i] + k[i] + c[i]))
        throw InvalidArgument("chain parameters must be positive (damping nonnegative) and finite");
  }

  bool operator==(const ChainParams&) const = default;
};

inline ChainParams nominal_params() { return {}; }

enum class Measurement { Velocity, Position, FilteredPosition };

/// Mechanical part of the chain, states (p1, v1, p2, v2, p3, v3). Force u_i
/// and disturbance w_i1 act on mass i; y_i measures position or velocity of
/// mass i plus noise w_i2; z_i = (p_i, v_i, u_i).
inline Plant chain_mechanics(const ChainParams& p, Measurement meas) {
  p.validate();
  constexpr int n = 2 * kMasses;
  Plant g;
  g.A = Matrix::Zero(n, n);
  // Element e couples mass e-1 (or the wall) to mass e.
  auto couple = [&](int e, double stiff, double damp) {
    const int j = e, i = e - 1;
    const int pj = 2 * j, vj = pj + 1;
    g.A(vj, pj) -= stiff / p.m[j];
    g.A(vj, vj) -= damp / p.m[j];
    if (i < 0) return;
    const int pi = 2 * i, vi = pi + 1;
    g.A(vj, pi) += stiff / p.m[j];
    g.A(vj, vi) += damp / p.m[j];
    g.A(vi, pi) -= stiff / p.m[i];
    g.A(vi, vi) -= damp / p.m[i];
    g.A(vi, pj) += stiff / p.m[i];
    g.A(vi, vj) += damp / p.m[i];
  };
  for (int i = 0; i < kMasses; ++i) g.A(2 * i, 2 * i + 1) = 1.0;
  for (int e = 0; e < kMasses; ++e) couple(e, p.k[e], p.c[e]);

  g.B1 = Matrix::Zero(n, 2 * kMasses);
  g.B2 = Matrix::Zero(n, kMasses);
  g.C1 = Matrix::Zero(3 * kMasses, n);
  g.D12 = Matrix::Zero(3 * kMasses, kMasses);
  g.C2 = Matrix::Zero(kMasses, n);
  g.D21 = Matrix::Zero(kMasses, 2 * kMasses);
  for (int i = 0; i < kMasses; ++i) {
    g.B1(2 * i + 1, 2 * i) = 1.0 / p.m[i];
    g.B2(2 * i + 1, i) = 1.0 / p.m[i];
    g.C1(3 * i, 2 * i) = 1.0;
    g.C1(3 * i + 1, 2 * i + 1) = 1.0;
    g.D12(3 * i + 2, i) = 1.0;
    g.C2(i, meas == Measurement::Velocity ? 2 * i + 1 : 2 * i) = 1.0;
    g.D21(i, 2 * i + 1) = 1.0;
  }
  return g;
}

/// Passes every measured channel through 25 s / (s^2 + 4 s + 25), realized in
/// controllable canonical form (xi1' = xi2, xi2' = -25 xi1 - 4 xi2 + y,
/// output 25 xi2). The two filter states of each channel are appended after
/// the plant states; measurement noise stays on the filter output.
inline Plant augment_with_filter(const Plant& g) {
  g.validate();
  const auto n = g.n(), m = g.m(), N = n + 2 * m;
  Plant out;
  out.A = Matrix::Zero(N, N);
  out.A.topLeftCorner(n, n) = g.A;
  out.B1 = Matrix::Zero(N, g.p());
  out.B1.topRows(n) = g.B1;
  out.B2 = Matrix::Zero(N, m);
  out.B2.topRows(n) = g.B2;
  out.C1 = Matrix::Zero(g.q(), N);
  out.C1.leftCols(n) = g.C1;
  out.D12 = g.D12;
  out.C2 = Matrix::Zero(m, N);
  out.D21 = g.D21;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto f = n + 2 * i;
    out.A(f, f + 1) = 1.0;
    out.A(f + 1, f) = -25.0;
    out.A(f + 1, f + 1) = -4.0;
    // The filter sees the noiseless measurement C2 x; the noise enters after.
    out.A.block(f + 1, 0, 1, n) = g.C2.row(i);
    out.C2(i, f + 1) = 25.0;
  }
  return out;
}

/// Chain plant with the selected measurement; FilteredPosition appends the
/// measurement filter to the position-output model.
inline Plant build_chain_plant(const ChainParams& p, Measurement output) {
  if (output == Measurement::FilteredPosition) return augment_with_filter(chain_mechanics(p, Measurement::Position));
  return chain_mechanics(p, output);
}

/// Idealized design model: velocity measurement.
inline Plant plant_g1(const ChainParams& p = nominal_params()) { return build_chain_plant(p, Measurement::Velocity); }

/// Evaluation model: filtered position measurement.
inline Plant plant_g2(const ChainParams& p = nominal_params()) {
  return build_chain_plant(p, Measurement::FilteredPosition);
}

/// Control channel u -> y of a plant as a square system.
inline StateSpace control_channel(const Plant& g) {
  return StateSpace(g.A, g.B2, g.C2, Matrix::Zero(g.m(), g.m()));
}

// ---------------------------------------------------------------------------
// Parameter grid.

struct ParamGrid {
  std::array<double, 3> mass{0.3, 1.0, 3.0};
  std::array<double, 3> stiffness{0.3, 1.0, 3.0};
  std::array<double, 3> damping{0.01, 0.05, 0.1};
  /// Index of the nominal value in each set.
  int nominal_mass = 1, nominal_stiffness = 1, nominal_damping = 1;

  static constexpr long long kCombinations = 19683;  // 3^9

  /// The combination with the given index, read as 9 base-3 digits
  /// (m1 m2 m3 k1 k2 k3 c1 c2 c3, most significant first).
  ChainParams at(long long index) const {
    if (index < 0 || index >= kCombinations) throw InvalidArgument("parameter index out of range");
    std::array<int, 9> d{};
    for (int i = 8; i >= 0; --i) {
      d[static_cast<std::size_t>(i)] = static_cast<int>(index % 3);
      index /= 3;
    }
    ChainParams p;
    for (int i = 0; i < kMasses; ++i) {
      p.m[static_cast<std::size_t>(i)] = mass[static_cast<std::size_t>(d[static_cast<std::size_t>(i)])];
      p.k[static_cast<std::size_t>(i)] = stiffness[static_cast<std::size_t>(d[static_cast<std::size_t>(3 + i)])];
      p.c[static_cast<std::size_t>(i)] = damping[static_cast<std::size_t>(d[static_cast<std::size_t>(6 + i)])];
    }
    return p;
  }

  long long nominal_index() const {
    long long idx = 0;
    for (int i = 0; i < 9; ++i) idx = 3 * idx + (i < 3 ? nominal_mass : i < 6 ? nominal_stiffness : nominal_damping);
    return idx;
  }
};

struct SampleMode {
  bool full = false;
  int count = 500;
  std::uint64_t seed = 20190101;
};

/// Full factorial (all 3^9 combinations, in index order) or `count` distinct
/// seeded draws whose first entry is the nominal set.
inline std::vector<ChainParams> enumerate_parameter_sets(const ParamGrid& grid, const SampleMode& mode) {
  std::vector<ChainParams> out;
  if (mode.full) {
    out.reserve(ParamGrid::kCombinations);
    for (long long i = 0; i < ParamGrid::kCombinations; ++i) out.push_back(grid.at(i));
    return out;
  }
  if (mode.count < 1) throw InvalidArgument("sample count must be at least 1");
  const auto total = ParamGrid::kCombinations;
  const auto n = std::min<long long>(mode.count, total);
  // Partial Fisher-Yates over the index range with the nominal swapped to the front.
  std::vector<long long> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0LL);
  std::swap(idx[0], idx[static_cast<std::size_t>(grid.nominal_index())]);
  std::mt19937_64 rng(mode.seed);
  for (long long i = 1; i < n; ++i) {
    const auto span = static_cast<std::uint64_t>(total - i);
    const auto j = i + static_cast<long long>(rng() % span);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  out.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) out.push_back(grid.at(idx[static_cast<std::size_t>(i)]));
  return out;
}

// ---------------------------------------------------------------------------
// Parallel map.

/// Worker count: CONIC_SYNTH_THREADS when set to a positive integer, capped by
/// the hardware concurrency; otherwise the hardware concurrency.
inline unsigned thread_count() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CONIC_SYNTH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return std::min(hw, static_cast<unsigned>(v));
  }
  return hw;
}

/// Runs task(i) for i in [0, count) on up to thread_count() workers. Tasks
/// write only their own slot, so results do not depend on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Sector of the evaluation plant.

/// Plant sector used for the chain: every grid member's control channel is
/// expected to lie inside it.
inline Cone reference_plant_cone() { return Cone(-24.84, 62200.0); }

/// Published nominal cost of the iterative conic design, reported as a
/// constant row; that design is not rebuilt here.
inline constexpr double kIterativeConicCost = 73.74;

/// Largest lower bound a such that sys lies in [a, upper] on the grid. With
/// H = -(1/b) G*G + He(G)/2 and N = I - He(G)/(2b), the sector condition at
/// one frequency reads H - a N >= 0, so a = lambda_min(H, N) there.
inline double sector_lower_bound(const StateSpace& sys, double upper,
                                 const std::vector<double>& grid = log_grid(1e-3, 1e4, 400)) {
  detail::require_conic_system(sys);
  if (!(upper > 0.0)) throw InvalidArgument("sector_lower_bound: upper bound must be positive");
  if (sys.states() > 0 && !is_hurwitz(sys.A)) throw InvalidArgument("sector_lower_bound: system is not stable");
  const auto m = sys.inputs();
  double a = 0.0;
  auto visit = [&](const Eigen::MatrixXcd& G) {
    const Eigen::MatrixXcd He = 0.5 * (G + G.adjoint());
    const Eigen::MatrixXcd H = -(1.0 / upper) * G.adjoint() * G + He;
    const Eigen::MatrixXcd N = Eigen::MatrixXcd::Identity(m, m) - He / upper;
    Eigen::LLT<Eigen::MatrixXcd> llt(N);
    if (llt.info() != Eigen::Success) {
      a = -std::numeric_limits<double>::infinity();
      return;
    }
    const Eigen::MatrixXcd Li = llt.matrixL().solve(Eigen::MatrixXcd::Identity(m, m));
    const Eigen::MatrixXcd T = Li * H * Li.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (T + T.adjoint()), Eigen::EigenvaluesOnly);
    a = std::min(a, es.eigenvalues().minCoeff());
  };
  visit(sys.frequency_response({0.0, 0.0}));
  for (double w : grid) visit(sys.frequency_response({0.0, w}));
  return a;
}

struct ConeSurvey {
  Cone cone;
  int sets = 0;
  /// Sets whose control channel csl_check certifies in `cone`.
  int certified = 0;
  /// Tightest lower bound over all sets for the cone's upper bound.
  double recomputed_lower = 0.0;
  /// Sets that failed the check, by position in the input list.
  std::vector<std::size_t> failures;

  bool sufficient() const { return certified == sets; }
};

/// Checks that the control channel of every evaluation plant lies in `cone`
/// and recomputes the lower sector bound from frequency responses.
inline ConeSurvey survey_plant_cone(const std::vector<ChainParams>& sets, const Cone& cone,
                                    const CslOptions& csl = {}) {
  ConeSurvey out;
  out.cone = cone;
  out.sets = static_cast<int>(sets.size());
  std::vector<char> ok(sets.size(), 0);
  std::vector<double> lower(sets.size(), 0.0);
  parallel_for(sets.size(), [&](std::size_t i) {
    try {
      const auto ch = control_channel(plant_g2(sets[i]));
      lower[i] = sector_lower_bound(ch, cone.upper());
      ok[i] = csl_check(ch, cone, 1, csl).feasible ? 1 : 0;
    } catch (const std::exception&) {
      ok[i] = 0;
      lower[i] = -std::numeric_limits<double>::infinity();
    }
  });
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (ok[i]) ++out.certified;
    else out.failures.push_back(i);
    out.recomputed_lower = std::min(out.recomputed_lower, lower[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Controller designs on the idealized model.

struct DesignOptions {
  Cone plant_cone = reference_plant_cone();
  double epsilon = 5e-3;
  double gamma_reg = 0.1;
  int max_iters = 2000;
  double ico_delta = 0.1;
  double ico_gamma = 1e-3;
  int ico_max_iters = 200;
  bool optimize_w = true;
  bool with_cnew = true;
  bool with_inew = true;
  sdp::SdpOptions solver;
};

struct DesignedController {
  std::string name;
  Controller controller;
  /// Designed to satisfy the controller cone.
  bool conic = false;
  /// Algorithm 1 iterations; -1 when not iterative.
  int iterations = -1;
  std::string status = "n/a";
  std::vector<HistoryRow> history;
  std::vector<std::string> warnings;
};

struct DesignSuite {
  Cone cone_c;
  WPair W;
  std::vector<DesignedController> controllers;
  std::optional<InitResult> conicc, ico;
};

/// Designs the comparison set on the nominal idealized model: the H2-optimal
/// observer controller, ConicC, Algorithm 1 from ConicC (Cnew) and from the
/// relaxation start (Inew). Controllers that fail to design are reported in
/// `warnings` of the suite's first entry and left out.
inline DesignSuite design_controllers(const DesignOptions& o,
                                      const std::function<void(const std::string&)>& log = {}) {
  auto note = [&](const std::string& s) {
    if (log) log(s);
  };
  const Plant g1 = plant_g1();
  DesignSuite suite;
  suite.cone_c = cst_complement(o.plant_cone);
  const auto t = build_transform(g1, g1.n(), suite.cone_c);
  suite.W = o.optimize_w ? w_optimize(t, 1e-8, o.solver) : w_identity(t);

  DesignedController h2;
  h2.name = "H2-optimal (G1)";
  h2.controller = design_h2_luenberger(g1);
  suite.controllers.push_back(h2);

  SynthesisOptions so;
  so.epsilon = o.epsilon;
  so.gamma_reg = o.gamma_reg;
  so.max_iters = o.max_iters;
  so.W1 = suite.W.W1;
  so.W2 = suite.W.W2;
  so.solver = o.solver;

  auto iterate = [&](const std::string& name, const InitResult& init) {
    note(name + ": Algorithm 1 from J = " + csv::number(init.Jtrue));
    const auto res = run_algorithm1(t, init.state(), so);
    DesignedController d;
    d.name = name;
    d.controller = unpack_k(res.final_state.K, t.m, t.nc);
    d.conic = true;
    d.iterations = res.iterations;
    d.status = to_string(res.status);
    d.history = res.history;
    d.warnings = res.warnings;
    if (!res.message.empty()) d.warnings.push_back(res.message);
    note(name + ": " + d.status + " after " + std::to_string(res.iterations) + " iterations, J = " +
         csv::number(res.final_state.Jtrue));
    return d;
  };

  ConicCOptions co;
  co.solver = o.solver;
  suite.conicc = init_conicc(g1, suite.cone_c, co);
  DesignedController cc;
  cc.name = "ConicC";
  cc.controller = unpack_k(suite.conicc->K0, t.m, t.nc);
  cc.conic = true;
  cc.warnings = suite.conicc->warnings;
  suite.controllers.push_back(cc);
  note("ConicC: J = " + csv::number(suite.conicc->Jtrue));

  if (o.with_inew) {
    IcoOptions io;
    io.delta = o.ico_delta;
    io.gamma_reg = o.ico_gamma;
    io.max_iters = o.ico_max_iters;
    io.W1 = suite.W.W1;
    io.W2 = suite.W.W2;
    io.project_on_stop = true;
    io.solver = o.solver;
    suite.ico = init_ico(g1, g1.n(), suite.cone_c, io);
    note("ICO: " + std::to_string(suite.ico->relaxation_iters) + " relaxation steps" +
         (suite.ico->projected ? " (finished by projection)" : "") + ", J = " + csv::number(suite.ico->Jtrue));
    if (suite.ico->feasible) {
      auto d = iterate("Inew", *suite.ico);
      d.warnings.insert(d.warnings.begin(), suite.ico->warnings.begin(), suite.ico->warnings.end());
      suite.controllers.push_back(std::move(d));
    } else {
      suite.controllers.front().warnings.push_back("Inew skipped: " + suite.ico->message);
    }
  }
  if (o.with_cnew) suite.controllers.push_back(iterate("Cnew", *suite.conicc));
  return suite;
}

// ---------------------------------------------------------------------------
// Robustness comparison on the evaluation model.

struct NamedController {
  std::string name;
  Controller controller;
  bool conic = false;
  int iterations = -1;
};

inline std::vector<NamedController> named(const DesignSuite& suite) {
  std::vector<NamedController> out;
  for (const auto& d : suite.controllers) out.push_back({d.name, d.controller, d.conic, d.iterations});
  return out;
}

struct BenchReport {
  std::vector<NamedController> controllers;
  Cone plant_cone, cone_c;
  std::vector<ChainParams> sets;
  /// sets x controllers; +inf where the closed loop is unstable.
  Matrix cost;
  /// Optimal cost of each set's own H2-optimal controller.
  Vector optimum;
  /// Control channel of the set certified in the plant cone.
  std::vector<char> plant_in_cone;
  /// Controller certified (form 1) in cone_c.
  std::vector<char> controller_in_cone;
  /// Cost on the nominal evaluation plant, per controller.
  Vector nominal_cost;
  double nominal_optimum = 0.0;
  std::vector<std::string> errors;

  Eigen::Index num_controllers() const { return static_cast<Eigen::Index>(controllers.size()); }

  static double percent_over(double cost, double reference) { return (cost / reference - 1.0) * 100.0; }

  double stable_fraction(Eigen::Index j) const {
    if (cost.rows() == 0) return 0.0;
    return static_cast<double>(cost.col(j).array().isFinite().count()) / static_cast<double>(cost.rows());
  }

  /// Share of sets on which controller j has the lowest cost among the
  /// conic controllers (ties count for each).
  double best_conic_fraction(Eigen::Index j) const {
    if (cost.rows() == 0 || !controllers[static_cast<std::size_t>(j)].conic) return 0.0;
    long long wins = 0;
    for (Eigen::Index i = 0; i < cost.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < num_controllers(); ++k)
        if (controllers[static_cast<std::size_t>(k)].conic) best = std::min(best, cost(i, k));
      if (std::isfinite(best) && cost(i, j) <= best) ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(cost.rows());
  }

  double plant_cone_fraction() const {
    if (plant_in_cone.empty()) return 0.0;
    return static_cast<double>(std::count(plant_in_cone.begin(), plant_in_cone.end(), 1)) /
           static_cast<double>(plant_in_cone.size());
  }
};

/// Squared closed-loop H2 norm, or +inf when the loop is unstable.
inline double evaluate_cost(const Plant& g, const Controller& k) {
  const auto cl = close_loop(g, k);
  return is_hurwitz(cl.A) ? h2_norm_sq(cl) : std::numeric_limits<double>::infinity();
}

/// Evaluates every controller on every set's evaluation plant, in parallel
/// over sets. Set i writes only row i, so results are independent of the
/// worker count.
inline BenchReport run_comparison(const std::vector<NamedController>& controllers, const std::vector<ChainParams>& sets,
                                  const Cone& plant_cone, const CslOptions& csl = {}) {
  BenchReport r;
  r.controllers = controllers;
  r.plant_cone = plant_cone;
  r.cone_c = cst_complement(plant_cone);
  r.sets = sets;
  const auto nk = r.num_controllers();
  const auto ns = static_cast<Eigen::Index>(sets.size());
  const Plant nominal = plant_g2();
  for (const auto& c : controllers) {
    if (c.controller.channels() != nominal.m())
      throw DimensionError("controller " + c.name + " does not match the evaluation plant's channels");
  }
  r.cost = Matrix::Constant(ns, nk, std::numeric_limits<double>::infinity());
  r.optimum = Vector::Constant(ns, std::numeric_limits<double>::quiet_NaN());
  r.plant_in_cone.assign(sets.size(), 0);
  std::vector<std::string> errs(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    try {
      const Plant g = plant_g2(sets[i]);
      for (Eigen::Index j = 0; j < nk; ++j)
        r.cost(row, j) = evaluate_cost(g, controllers[static_cast<std::size_t>(j)].controller);
      r.optimum(row) = evaluate_cost(g, design_h2_luenberger(g));
      r.plant_in_cone[i] = csl_check(control_channel(g), plant_cone, 1, csl).feasible ? 1 : 0;
    } catch (const std::exception& e) {
      errs[i] = "set " + std::to_string(i) + ": " + e.what();
    }
  });
  for (auto& e : errs)
    if (!e.empty()) r.errors.push_back(std::move(e));

  r.nominal_cost = Vector(nk);
  r.controller_in_cone.assign(controllers.size(), 0);
  for (Eigen::Index j = 0; j < nk; ++j) {
    const auto& c = controllers[static_cast<std::size_t>(j)];
    r.nominal_cost(j) = evaluate_cost(nominal, c.controller);
    try {
      r.controller_in_cone[static_cast<std::size_t>(j)] =
          is_hurwitz(c.controller.Ahat) && csl_check(c.controller.as_state_space(), r.cone_c, 1, csl).feasible;
    } catch (const std::runtime_error& e) {
      r.errors.push_back("cone check of " + c.name + ": " + e.what());
    }
  }
  r.nominal_optimum = evaluate_cost(nominal, design_h2_luenberger(nominal));
  return r;
}

// ---------------------------------------------------------------------------
// Reports.

/// Nominal cost table: one row per controller plus the evaluation plant's
/// own optimum and the iterative conic reference constant. Percentages are
/// relative to the nominal optimum.
inline std::string table1_csv(const BenchReport& r, const std::vector<std::string>& preamble = {}) {
  csv::Writer w;
  for (const auto& line : preamble) w.comment(line);
  w.row({"controller", "nominal_cost", "percent_increase", "iterations", "conic_certified", "stable_fraction",
         "best_conic_fraction"});
  w.row({"H2-optimal (G2)", csv::number(r.nominal_optimum), csv::number(0.0), "n/a", "n/a", "n/a", "n/a"});
  for (Eigen::Index j = 0; j < r.num_controllers(); ++j) {
    const auto& c = r.controllers[static_cast<std::size_t>(j)];
    w.row({c.name, csv::number(r.nominal_cost(j)), csv::number(BenchReport::percent_over(r.nominal_cost(j), r.nominal_optimum)),
           c.iterations >= 0 ? csv::number(c.iterations) : "n/a", r.controller_in_cone[static_cast<std::size_t>(j)] ? "yes" : "no",
           csv::number(r.stable_fraction(j)), c.conic ? csv::number(r.best_conic_fraction(j)) : "n/a"});
  }
  w.row({"Iterative Conic (reference)", csv::number(kIterativeConicCost),
         csv::number(BenchReport::percent_over(kIterativeConicCost, r.nominal_optimum)), "n/a", "n/a", "n/a", "n/a"});
  return w.str();
}

namespace detail {

/// Percent of finite-or-not samples at or below each threshold.
inline std::string cdf_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& samples,
                           const std::vector<double>& thresholds, const std::string& axis,
                           const std::vector<std::string>& preamble) {
  csv::Writer w;
  for (const auto& line : preamble) w.comment(line);
  std::vector<std::string> header{axis};
  header.insert(header.end(), names.begin(), names.end());
  w.row(header);
  std::vector<std::vector<double>> sorted = samples;
  for (auto& s : sorted) std::sort(s.begin(), s.end());
  for (double th : thresholds) {
    std::vector<std::string> row{csv::number(th)};
    for (const auto& s : sorted) {
      const auto below = std::upper_bound(s.begin(), s.end(), th) - s.begin();
      row.push_back(csv::number(s.empty() ? 0.0 : 100.0 * static_cast<double>(below) / static_cast<double>(s.size())));
    }
    w.row(row);
  }
  return w.str();
}

inline std::vector<double> threshold_grid(double lo, double hi, int points, bool logarithmic) {
  std::vector<double> out;
  if (!(hi > lo)) hi = lo + 1.0;
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    out.push_back(logarithmic ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  // Exact endpoints, so the extreme samples are always counted.
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace detail

/// Cumulative share of sets with closed-loop cost below each threshold.
inline std::string histogram_cost_csv(const BenchReport& r, int points = 200,
                                      const std::vector<std::string>& preamble = {}) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index j = 0; j < r.num_controllers(); ++j) {
    names.push_back(r.controllers[static_cast<std::size_t>(j)].name);
    std::vector<double> s(r.cost.col(j).data(), r.cost.col(j).data() + r.cost.rows());
    for (double v : s)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    samples.push_back(std::move(s));
  }
  if (!std::isfinite(lo)) lo = 1.0, hi = 10.0;
  return detail::cdf_csv(names, samples, detail::threshold_grid(lo, hi, points, lo > 0.0), "cost", preamble);
}

/// Per-set cost relative to the best conic controller on that set, in
/// percent; cumulative share of sets below each threshold.
inline std::string histogram_regret_csv(const BenchReport& r, int points = 200,
                                        const std::vector<std::string>& preamble = {}) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> samples(static_cast<std::size_t>(r.num_controllers()));
  double hi = 0.0;
  for (Eigen::Index i = 0; i < r.cost.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < r.num_controllers(); ++k)
      if (r.controllers[static_cast<std::size_t>(k)].conic) best = std::min(best, r.cost(i, k));
    for (Eigen::Index j = 0; j < r.num_controllers(); ++j) {
      const double v = std::isfinite(best) ? BenchReport::percent_over(r.cost(i, j), best)
                                           : std::numeric_limits<double>::infinity();
      samples[static_cast<std::size_t>(j)].push_back(v);
      if (std::isfinite(v)) hi = std::max(hi, v);
    }
  }
  for (const auto& c : r.controllers) names.push_back(c.name);
  double lo = 0.0;
  for (const auto& s : samples)
    for (double v : s)
      if (std::isfinite(v)) lo = std::min(lo, v);
  return detail::cdf_csv(names, samples, detail::threshold_grid(lo, std::max(hi, lo + 1.0), points, false),
                         "percent_over_best_conic", preamble);
}

/// Convergence histories: the relaxation's eps sequence and each iterative
/// design's J' and true cost on the idealized model.
inline std::string design_curves_csv(const DesignSuite& s, const std::vector<std::string>& preamble = {}) {
  csv::Writer w;
  for (const auto& line : preamble) w.comment(line);
  w.row({"series", "iteration", "quantity", "value"});
  if (s.ico)
    for (std::size_t k = 0; k < s.ico->eps_trajectory.size(); ++k)
      w.row({"ICO", csv::number(static_cast<long long>(k)), "eps", csv::number(s.ico->eps_trajectory[k])});
  for (const auto& d : s.controllers)
    for (const auto& h : d.history) {
      w.row({d.name, csv::number(h.iter), "Jprime", csv::number(h.Jprime)});
      w.row({d.name, csv::number(h.iter), "Jtrue", csv::number(h.Jtrue)});
    }
  return w.str();
}

}  // namespace conic_h2::bench
