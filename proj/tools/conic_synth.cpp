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

// conic_synth: batch front end for cone analysis, initialization, synthesis
// and the mass-chain benchmark. Settings come from defaults, then an optional
// TOML or JSON file (--config), then command-line flags.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toml.hpp"

#include "conic_h2/benchmark.hpp"
#include "conic_h2/csv.hpp"
#include "conic_h2/initialization.hpp"
#include "conic_h2/io.hpp"
#include "conic_h2/synthesis.hpp"

namespace fs = std::filesystem;
using conic_h2::io::Json;
using namespace conic_h2;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

/// Bad flags, bad configuration or unreadable inputs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The computation ran but did not produce what was asked for.
struct RunFailure : std::runtime_error {
  RunFailure(const std::string& what, Json detail = Json::object())
      : std::runtime_error(what), detail(std::move(detail)) {}
  Json detail;
};

Json toml_to_json(const toml::node& node) {
  if (auto t = node.as_table()) {
    Json out = Json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (auto a = node.as_array()) {
    Json out = Json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_boolean()) return v->get();
  if (auto v = node.as_string()) return v->get();
  throw UsageError("unsupported TOML value (dates and times are not accepted)");
}

Json load_config(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("config file not found: " + path.string());
  if (path.extension() == ".json") {
    try {
      return io::load_json(path);
    } catch (const io::IoError& e) {
      throw UsageError(e.what());
    }
  }
  try {
    return toml_to_json(toml::parse_file(path.string()));
  } catch (const toml::parse_error& e) {
    throw UsageError("cannot parse " + path.string() + ": " + std::string(e.description()));
  }
}

// Resolved settings for one subcommand. Every key has a default, so the
// embedded config always lists the full set.
class Settings {
 public:
  explicit Settings(Json defaults) : cfg_(std::move(defaults)) {}

  /// Merges a config file. Path-valued keys are taken relative to the file.
  void merge_file(const fs::path& file, const std::set<std::string>& path_keys) {
    const Json j = load_config(file);
    if (!j.is_object()) throw UsageError("config root must be a table");
    for (const auto& [k, v] : j.items()) {
      if (!cfg_.contains(k)) throw UsageError("unknown config key \"" + k + "\"");
      if (path_keys.count(k) && v.is_string() && !v.get<std::string>().empty() && fs::path(v.get<std::string>()).is_relative())
        cfg_[k] = (file.parent_path() / v.get<std::string>()).lexically_normal().string();
      else
        cfg_[k] = v;
    }
  }

  void set(const std::string& key, Json v) { cfg_[key] = std::move(v); }
  const Json& raw(const std::string& key) const { return cfg_.at(key); }
  const Json& json() const { return cfg_; }

  double number(const std::string& key) const {
    const auto& v = cfg_.at(key);
    if (!v.is_number()) throw UsageError("\"" + key + "\" must be a number");
    return v.get<double>();
  }
  long long integer(const std::string& key) const {
    const auto& v = cfg_.at(key);
    if (!v.is_number_integer()) throw UsageError("\"" + key + "\" must be an integer");
    return v.get<long long>();
  }
  bool flag(const std::string& key) const {
    const auto& v = cfg_.at(key);
    if (!v.is_boolean()) throw UsageError("\"" + key + "\" must be true or false");
    return v.get<bool>();
  }
  std::string text(const std::string& key) const {
    const auto& v = cfg_.at(key);
    if (!v.is_string()) throw UsageError("\"" + key + "\" must be a string");
    return v.get<std::string>();
  }
  std::optional<Cone> cone(const std::string& key, bool strict = false) const {
    const auto& v = cfg_.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw UsageError("\"" + key + "\" must be a pair [a, b]");
    try {
      return Cone(v[0].get<double>(), v[1].get<double>(), strict);
    } catch (const InvalidArgument& e) {
      throw UsageError(key + ": " + e.what());
    }
  }
  std::string one_of(const std::string& key, const std::set<std::string>& allowed) const {
    auto s = text(key);
    if (!allowed.count(s)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw UsageError("\"" + key + "\" must be one of: " + list);
    }
    return s;
  }

 private:
  Json cfg_;
};

// Ties CLI flags to config keys; flags given on the command line win.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <class T>
  void value(const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<T>();
    auto* opt = app_->add_option(flag, *holder, help);
    apply_.push_back([opt, holder, key](Settings& s) {
      if (opt->count()) s.set(key, *holder);
    });
  }

  void pair(const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<std::vector<double>>();
    auto* opt = app_->add_option(flag, *holder, help)->expected(2)->allow_extra_args(false);
    apply_.push_back([opt, holder, key](Settings& s) {
      if (opt->count()) s.set(key, Json::array({(*holder)[0], (*holder)[1]}));
    });
  }

  void list(const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<std::vector<std::string>>();
    auto* opt = app_->add_option(flag, *holder, help)->delimiter(',');
    apply_.push_back([opt, holder, key](Settings& s) {
      if (opt->count()) s.set(key, *holder);
    });
  }

  void toggle(const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<bool>(false);
    auto* opt = app_->add_flag(flag, *holder, help);
    apply_.push_back([opt, holder, key](Settings& s) {
      if (opt->count()) s.set(key, *holder);
    });
  }

  void apply(Settings& s) const {
    for (const auto& f : apply_) f(s);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(Settings&)>> apply_;
};

struct Command {
  CLI::App* app = nullptr;
  std::string config;
  Binder binder{nullptr};
  Json defaults;
  std::set<std::string> path_keys;
};

std::string require_path(const Settings& s, const std::string& key) {
  const auto p = s.text(key);
  if (p.empty()) throw UsageError("missing required setting \"" + key + "\"");
  if (!fs::exists(p)) throw UsageError(key + " file not found: " + p);
  return p;
}

Plant load_plant(const std::string& path) {
  try {
    return io::plant_from_json(io::load_json(path));
  } catch (const io::IoError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string config_line(const Settings& s) { return "config: " + s.json().dump(); }

void log(const Settings& s, const std::string& msg) {
  if (!s.flag("quiet")) std::cerr << msg << '\n';
}

fs::path out_dir(const Settings& s) {
  const auto d = s.text("out");
  if (d.empty()) throw UsageError("missing required setting \"out\"");
  return d;
}

// ---------------------------------------------------------------------------
// Design setup shared by init and synthesize.

Json design_defaults() {
  return Json{{"plant", ""},          {"nc", 0},
              {"cone", nullptr},      {"plant_cone", nullptr},
              {"init", "conicc"},     {"controller", ""},
              {"delta", 0.1},         {"ico_gamma", 1e-3},
              {"ico_max_iters", 200}, {"project_on_stop", true},
              {"w_mode", "optimize"}, {"out", ""},
              {"quiet", false}};
}

void bind_design(Binder& b) {
  b.value<std::string>("--plant", "plant", "plant JSON file");
  b.value<long long>("--nc", "nc", "controller order (default: plant order)");
  b.pair("--cone", "cone", "controller cone a b (closed)");
  b.pair("--plant-cone", "plant_cone", "plant sector a b; the controller is confined to its strict complement");
  b.value<std::string>("--init", "init", "initialization: conicc, ico or arbitrary");
  b.value<std::string>("--controller", "controller", "controller JSON (arbitrary init, or ICO target)");
  b.value<double>("--delta", "delta", "ICO cost increment");
  b.value<double>("--ico-gamma", "ico_gamma", "ICO regularization weight");
  b.value<long long>("--ico-max-iters", "ico_max_iters", "ICO relaxation iteration limit");
  b.value<bool>("--project-on-stop", "project_on_stop", "finish a stalled ICO run by projecting Chat into the cone");
  b.value<std::string>("--w-mode", "w_mode", "weights: identity or optimize");
  b.value<std::string>("--out", "out", "output directory");
  b.toggle("--quiet", "quiet", "suppress progress messages");
}

struct DesignSetup {
  Plant plant;
  Eigen::Index nc = 0;
  Cone cone_c;
  TransformData t;
  WPair W;
};

Cone controller_cone(const Settings& s) {
  const auto c = s.cone("cone");
  const auto pc = s.cone("plant_cone");
  if (c && pc) throw UsageError("give either cone or plant_cone, not both");
  if (pc) return cst_complement(*pc);
  if (c) return *c;
  throw UsageError("missing cone: give cone (controller sector) or plant_cone");
}

DesignSetup design_setup(const Settings& s) {
  DesignSetup d;
  d.plant = load_plant(require_path(s, "plant"));
  const auto nc = s.integer("nc");
  if (nc < 0) throw UsageError("nc must be positive");
  d.nc = nc == 0 ? d.plant.n() : static_cast<Eigen::Index>(nc);
  d.cone_c = controller_cone(s);
  for (const auto& w : check_plant_assumptions(d.plant)) log(s, "warning: " + w);
  d.t = build_transform(d.plant, d.nc, d.cone_c);
  const auto wm = s.one_of("w_mode", {"identity", "optimize"});
  d.W = wm == "optimize" ? w_optimize(d.t) : w_identity(d.t);
  return d;
}

InitResult run_init(const Settings& s, const DesignSetup& d) {
  const auto method = s.one_of("init", {"conicc", "ico", "arbitrary"});
  std::optional<Controller> given;
  if (!s.text("controller").empty()) {
    try {
      given = io::controller_from_json(io::load_json(require_path(s, "controller")));
    } catch (const io::IoError& e) {
      throw UsageError(e.what());
    }
  }
  if (method == "arbitrary") {
    if (!given) throw UsageError("init = arbitrary needs a controller file");
    return init_arbitrary(d.t, *given);
  }
  if (method == "conicc") {
    if (d.nc != d.plant.n()) throw UsageError("ConicC builds an observer controller, so nc must equal the plant order");
    return init_conicc(d.plant, d.cone_c);
  }
  IcoOptions io;
  io.delta = s.number("delta");
  io.gamma_reg = s.number("ico_gamma");
  io.max_iters = static_cast<int>(s.integer("ico_max_iters"));
  io.project_on_stop = s.flag("project_on_stop");
  io.W1 = d.W.W1;
  io.W2 = d.W.W2;
  if (!given && d.nc != d.plant.n()) throw UsageError("ICO without a controller file needs nc equal to the plant order");
  auto r = init_ico(d.plant, d.nc, d.cone_c, io, given);
  if (!r.feasible)
    throw RunFailure("ICO did not reach a feasible point: " + r.message,
                     Json{{"relaxation_iters", r.relaxation_iters}, {"eps_trajectory", r.eps_trajectory}});
  return r;
}

Json cone_json(const Cone& c) { return Json{{"a", c.a}, {"b", c.b}, {"strict", c.strict}, {"margin", c.margin}}; }

Json init_json(const Settings& s, const DesignSetup& d, const InitResult& r) {
  return Json{{"config", s.json()},
              {"controller_cone", cone_json(d.cone_c)},
              {"method", to_string(r.method)},
              {"projected", r.projected},
              {"Jtrue", r.Jtrue},
              {"lyapunov_residual", r.lyap_residual},
              {"conic_residual", r.conic_residual},
              {"P_min_eigenvalue", r.p_min_eig},
              {"relaxation_iters", r.relaxation_iters},
              {"eps_trajectory", r.eps_trajectory},
              {"warnings", r.warnings},
              {"controller", io::to_json(unpack_k(r.K0, d.t.m, d.nc))},
              {"K0", io::to_json(r.K0)},
              {"Q0", io::to_json(r.Q0)},
              {"P0", io::to_json(r.P0)},
              {"W1", io::to_json(d.W.W1)},
              {"W2", io::to_json(d.W.W2)}};
}

int cmd_init(const Settings& s) {
  const auto dir = out_dir(s);
  const auto d = design_setup(s);
  const auto r = run_init(s, d);
  io::write_json(dir / "init.json", init_json(s, d, r));
  log(s, "initial cost " + csv::number(r.Jtrue) + ", written to " + (dir / "init.json").string());
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_synthesize(const Settings& s) {
  const auto dir = out_dir(s);
  const auto d = design_setup(s);
  const auto init = run_init(s, d);
  log(s, "initial cost " + csv::number(init.Jtrue));
  SynthesisOptions so;
  so.epsilon = s.number("epsilon");
  so.gamma_reg = s.number("gamma");
  so.max_iters = static_cast<int>(s.integer("max_iters"));
  so.feas_tol = s.number("feas_tol");
  so.W1 = d.W.W1;
  so.W2 = d.W.W2;
  try {
    so.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto res = run_algorithm1(d.t, init.state(), so);
  const auto ctrl = unpack_k(res.final_state.K, d.t.m, d.nc);

  csv::Writer w;
  w.comment(config_line(s));
  w.row({"iteration", "Jprime", "Jtrue", "lyapunov_residual", "conic_residual"});
  for (const auto& h : res.history)
    w.row({csv::number(h.iter), csv::number(h.Jprime), csv::number(h.Jtrue), csv::number(h.lyap_residual),
           csv::number(h.conic_residual)});

  const auto cert = csl_check(ctrl.as_state_space(), d.cone_c, 1);
  std::vector<std::string> warnings = init.warnings;
  warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
  const Json out{{"config", s.json()},
                 {"controller_cone", cone_json(d.cone_c)},
                 {"status", to_string(res.status)},
                 {"message", res.message},
                 {"iterations", res.iterations},
                 {"initial_cost", init.Jtrue},
                 {"Jprime", res.final_state.Jprime},
                 {"Jtrue", res.final_state.Jtrue},
                 {"cone_certified", cert.feasible},
                 {"cone_margin", cert.margin},
                 {"warnings", warnings},
                 {"controller", io::to_json(ctrl)}};
  io::write_atomic(dir / "history.csv", w.str());
  io::write_json(dir / "controller.json", out);
  log(s, std::string(to_string(res.status)) + " after " + std::to_string(res.iterations) + " iterations, cost " +
             csv::number(res.final_state.Jtrue));
  if (!res.ok()) throw RunFailure("synthesis " + std::string(to_string(res.status)) + ": " + res.message);
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Settings& s) {
  StateSpace sys;
  try {
    sys = io::state_space_from_json(io::load_json(require_path(s, "sys")));
  } catch (const io::IoError& e) {
    throw UsageError(e.what());
  }
  const auto cone = s.cone("cone", s.flag("strict"));
  if (!cone) throw UsageError("missing required setting \"cone\"");
  const auto form = s.integer("form");
  if (form < 1 || form > 3) throw UsageError("form must be 1, 2 or 3");
  if (sys.states() > 0 && !is_hurwitz(sys.A)) throw RunFailure("system is not stable, so it lies in no cone");
  const auto r = csl_check(sys, *cone, static_cast<int>(form));
  Json out{{"config", s.json()}, {"in_cone", r.feasible}, {"margin", r.margin}, {"solver_status", sdp::to_string(r.status)}};
  if (r.certificate) {
    out["certificate"] = Json{{"form", r.certificate->form}, {"residual", r.certificate->residual},
                              {"P", io::to_json(r.certificate->P)}};
  } else {
    const auto f = frequency_cone_oracle(sys, cone->closed());
    out["worst_frequency"] = std::isfinite(f.worst_frequency) ? Json(f.worst_frequency) : Json("inf");
    out["worst_eigenvalue"] = f.worst_value;
    out["frequency_check_inside"] = f.inside;
  }
  if (!s.text("out").empty()) io::write_json(out_dir(s) / "cone_analysis.json", out);
  std::cout << out.dump(2) << '\n';
  return r.feasible ? kOk : kFailed;
}

// ---------------------------------------------------------------------------

int cmd_benchmark(const Settings& s) {
  const auto dir = out_dir(s);
  bench::DesignOptions o;
  if (auto pc = s.cone("plant_cone")) o.plant_cone = *pc;
  o.epsilon = s.number("epsilon");
  o.gamma_reg = s.number("gamma");
  o.max_iters = static_cast<int>(s.integer("max_iters"));
  o.ico_delta = s.number("delta");
  o.ico_gamma = s.number("ico_gamma");
  o.ico_max_iters = static_cast<int>(s.integer("ico_max_iters"));
  o.optimize_w = s.one_of("w_mode", {"identity", "optimize"}) == "optimize";

  const auto& list = s.raw("controllers");
  if (!list.is_array() || list.empty()) throw UsageError("\"controllers\" must be a non-empty list");
  std::set<std::string> wanted;
  for (const auto& c : list) {
    if (!c.is_string()) throw UsageError("\"controllers\" entries must be strings");
    const auto n = c.get<std::string>();
    if (!std::set<std::string>{"h2", "conicc", "cnew", "inew"}.count(n))
      throw UsageError("unknown controller \"" + n + "\" (h2, conicc, cnew, inew)");
    wanted.insert(n);
  }
  o.with_cnew = wanted.count("cnew") > 0;
  o.with_inew = wanted.count("inew") > 0;

  bench::SampleMode mode;
  mode.full = s.one_of("mode", {"sample", "full"}) == "full";
  const auto n = s.integer("samples");
  if (n < 1) throw UsageError("samples must be at least 1");
  if (n > bench::ParamGrid::kCombinations) throw UsageError("samples exceeds the grid size");
  mode.count = static_cast<int>(n);
  mode.seed = static_cast<std::uint64_t>(s.integer("seed"));
  const auto points = s.integer("histogram_points");
  if (points < 2) throw UsageError("histogram_points must be at least 2");

  auto suite = bench::design_controllers(o, [&](const std::string& m) { log(s, m); });
  std::vector<bench::NamedController> chosen;
  const std::map<std::string, std::string> keys{
      {"H2-optimal (G1)", "h2"}, {"ConicC", "conicc"}, {"Cnew", "cnew"}, {"Inew", "inew"}};
  for (const auto& c : bench::named(suite))
    if (wanted.count(keys.at(c.name))) chosen.push_back(c);

  const auto sets = bench::enumerate_parameter_sets(bench::ParamGrid{}, mode);
  log(s, "evaluating " + std::to_string(chosen.size()) + " controllers on " + std::to_string(sets.size()) +
             " parameter sets with " + std::to_string(bench::thread_count()) + " threads");
  const auto rep = bench::run_comparison(chosen, sets, o.plant_cone);
  for (const auto& e : rep.errors) log(s, "warning: " + e);

  const std::vector<std::string> pre{config_line(s)};
  io::write_atomic(dir / "table1.csv", bench::table1_csv(rep, pre));
  io::write_atomic(dir / "histogram_cost.csv", bench::histogram_cost_csv(rep, static_cast<int>(points), pre));
  io::write_atomic(dir / "histogram_regret.csv", bench::histogram_regret_csv(rep, static_cast<int>(points), pre));
  io::write_atomic(dir / "design_curves.csv", bench::design_curves_csv(suite, pre));

  csv::Writer costs;
  costs.comment(config_line(s));
  std::vector<std::string> head{"set", "m1", "m2", "m3", "k1", "k2", "k3", "c1", "c2", "c3", "plant_in_cone", "optimum"};
  for (const auto& c : rep.controllers) head.push_back(c.name);
  costs.row(head);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<std::string> row{csv::number(static_cast<long long>(i))};
    for (double v : sets[i].m) row.push_back(csv::number(v));
    for (double v : sets[i].k) row.push_back(csv::number(v));
    for (double v : sets[i].c) row.push_back(csv::number(v));
    row.push_back(rep.plant_in_cone[i] ? "yes" : "no");
    row.push_back(csv::number(rep.optimum(static_cast<Eigen::Index>(i))));
    for (Eigen::Index j = 0; j < rep.num_controllers(); ++j) row.push_back(csv::number(rep.cost(static_cast<Eigen::Index>(i), j)));
    costs.row(row);
  }
  io::write_atomic(dir / "costs.csv", costs.str());

  Json ctrls = Json::array();
  for (std::size_t j = 0; j < rep.controllers.size(); ++j) {
    const auto& c = rep.controllers[j];
    ctrls.push_back(Json{{"name", c.name},
                         {"conic", c.conic},
                         {"iterations", c.iterations},
                         {"cone_certified", static_cast<bool>(rep.controller_in_cone[j])},
                         {"nominal_cost", rep.nominal_cost(static_cast<Eigen::Index>(j))},
                         {"stable_fraction", rep.stable_fraction(static_cast<Eigen::Index>(j))},
                         {"controller", io::to_json(c.controller)}});
  }
  Json warnings = Json::array();
  for (const auto& d : suite.controllers)
    for (const auto& w : d.warnings) warnings.push_back(d.name + ": " + w);
  io::write_json(dir / "controllers.json", Json{{"config", s.json()},
                                                {"controller_cone", cone_json(suite.cone_c)},
                                                {"nominal_optimum", rep.nominal_optimum},
                                                {"plant_cone_fraction", rep.plant_cone_fraction()},
                                                {"errors", rep.errors},
                                                {"warnings", warnings},
                                                {"controllers", ctrls}});
  log(s, "wrote table1.csv, histogram_cost.csv, histogram_regret.csv, design_curves.csv, costs.csv, controllers.json");
  return kOk;
}

void report_error(const std::string& kind, const std::string& message, const Json& detail, const std::optional<fs::path>& dir) {
  Json e{{"error", kind}, {"message", message}};
  if (!detail.empty()) e["detail"] = detail;
  std::cerr << e.dump() << '\n';
  if (dir) {
    try {
      io::write_json(*dir / "error.json", e);
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-order H2 controller synthesis with conic sector constraints"};
  app.require_subcommand(1);
  std::vector<Command> cmds;
  cmds.reserve(4);

  auto add = [&](const std::string& name, const std::string& help, Json defaults, std::set<std::string> paths) -> Command& {
    auto& c = cmds.emplace_back();
    c.app = app.add_subcommand(name, help);
    c.app->add_option("--config", c.config, "TOML or JSON settings file; flags override it");
    c.binder = Binder(c.app);
    c.defaults = std::move(defaults);
    c.path_keys = std::move(paths);
    return c;
  };

  auto& analyze = add("analyze-cone", "certify that a state-space system lies in a cone",
                      Json{{"sys", ""}, {"cone", nullptr}, {"form", 1}, {"strict", false}, {"out", ""}, {"quiet", false}},
                      {"sys", "out"});
  analyze.binder.value<std::string>("--sys", "sys", "state-space JSON file (A, B, C, optional D)");
  analyze.binder.pair("--cone", "cone", "cone bounds a b");
  analyze.binder.value<long long>("--form", "form", "inequality form 1, 2 or 3");
  analyze.binder.toggle("--strict", "strict", "test the strict cone");
  analyze.binder.value<std::string>("--out", "out", "optional output directory");
  analyze.binder.toggle("--quiet", "quiet", "suppress progress messages");

  auto& init = add("init", "compute a feasible starting point", design_defaults(), {"plant", "controller", "out"});
  bind_design(init.binder);

  Json sdef = design_defaults();
  sdef["epsilon"] = 5e-3;
  sdef["gamma"] = 0.1;
  sdef["max_iters"] = 2000;
  sdef["feas_tol"] = 1e-7;
  auto& synth = add("synthesize", "run the iterative synthesis from an initialization", sdef, {"plant", "controller", "out"});
  bind_design(synth.binder);
  synth.binder.value<double>("--epsilon", "epsilon", "convergence threshold on the cost bound");
  synth.binder.value<double>("--gamma", "gamma", "step regularization weight");
  synth.binder.value<long long>("--max-iters", "max_iters", "iteration limit");
  synth.binder.value<double>("--feas-tol", "feas_tol", "constraint tolerance");

  auto& bench = add("benchmark", "design controllers for the mass chain and compare them over parameter sets",
                    Json{{"plant_cone", Json::array({-24.84, 62200.0})},
                         {"controllers", Json::array({"h2", "conicc", "inew", "cnew"})},
                         {"mode", "sample"},
                         {"samples", 500},
                         {"seed", 20190101},
                         {"epsilon", 5e-3},
                         {"gamma", 0.1},
                         {"max_iters", 2000},
                         {"delta", 0.1},
                         {"ico_gamma", 1e-3},
                         {"ico_max_iters", 200},
                         {"w_mode", "optimize"},
                         {"histogram_points", 200},
                         {"out", ""},
                         {"quiet", false}},
                    {"out"});
  bench.binder.pair("--plant-cone", "plant_cone", "plant sector a b");
  bench.binder.list("--controllers", "controllers", "comma-separated subset of h2, conicc, cnew, inew");
  bench.binder.value<std::string>("--mode", "mode", "sample or full");
  bench.binder.value<long long>("--samples", "samples", "parameter sets in sample mode");
  bench.binder.value<long long>("--seed", "seed", "sampling seed");
  bench.binder.value<double>("--epsilon", "epsilon", "convergence threshold");
  bench.binder.value<double>("--gamma", "gamma", "step regularization weight");
  bench.binder.value<long long>("--max-iters", "max_iters", "iteration limit");
  bench.binder.value<double>("--delta", "delta", "ICO cost increment");
  bench.binder.value<double>("--ico-gamma", "ico_gamma", "ICO regularization weight");
  bench.binder.value<long long>("--ico-max-iters", "ico_max_iters", "ICO relaxation iteration limit");
  bench.binder.value<std::string>("--w-mode", "w_mode", "weights: identity or optimize");
  bench.binder.value<long long>("--histogram-points", "histogram_points", "thresholds per histogram");
  bench.binder.value<std::string>("--out", "out", "output directory");
  bench.binder.toggle("--quiet", "quiet", "suppress progress messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const Command* cmd = nullptr;
  for (const auto& c : cmds)
    if (c.app->parsed()) cmd = &c;
  Settings s(cmd->defaults);
  std::optional<fs::path> dir;
  try {
    if (!cmd->config.empty()) s.merge_file(cmd->config, cmd->path_keys);
    cmd->binder.apply(s);
    if (!s.text("out").empty()) dir = s.text("out");
    const auto name = cmd->app->get_name();
    if (name == "analyze-cone") return cmd_analyze(s);
    if (name == "init") return cmd_init(s);
    if (name == "synthesize") return cmd_synthesize(s);
    return cmd_benchmark(s);
  } catch (const UsageError& e) {
    report_error("usage", e.what(), {}, std::nullopt);
    std::cerr << cmd->app->help() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    report_error("invalid-argument", e.what(), {}, std::nullopt);
    return kUsage;
  } catch (const RunFailure& e) {
    report_error("failed", e.what(), e.detail, dir);
    return kFailed;
  } catch (const std::exception& e) {
    report_error("failed", e.what(), {}, dir);
    return kFailed;
  }
}
