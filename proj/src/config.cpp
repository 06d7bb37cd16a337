// Copyright 2026 The holodyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "holodyn/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "holodyn/errors.hpp"
#include "holodyn/experiment.hpp"
#include "holodyn/holonomy.hpp"
#include "holodyn/lindblad_engine.hpp"

namespace holodyn {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

[[noreturn]] void schema(const std::string& msg) { throw SchemaError("schema: " + msg); }

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) schema(where + " is missing required field '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) schema(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema(where + " must be finite");
  return x;
}

double positive(const json& v, const std::string& where) {
  const double x = number(v, where);
  if (!(x > 0.0)) schema(where + " must be positive");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) schema(where + " must be an integer");
  const long long x = v.get<long long>();
  if (x < 1 || x > 100000000) schema(where + " must lie in [1, 1e8]");
  return static_cast<int>(x);
}

Complex complex_entry(const json& v, const std::string& where) {
  if (v.is_number()) return number(v, where);
  if (v.is_array() && v.size() == 2) return {number(v[0], where + "[0]"), number(v[1], where + "[1]")};
  schema(where + " must be a number or an [re, im] pair");
}

Matrix matrix_entry(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) schema(where + " must be a non-empty list of rows");
  const std::size_t n = v.size();
  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = where + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != n) schema(row + " must have " + std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = complex_entry(v[i][j], row + "[" + std::to_string(j) + "]");
    }
  }
  return m;
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) schema(where + " has unknown field '" + it.key() + "'");
  }
}

double optional_number(const json& obj, const std::string& key, double def, const std::string& where) {
  return obj.contains(key) ? number(obj.at(key), where + "." + key) : def;
}

TripodLoop parse_loop(const json& v, const std::string& where) {
  if (v.is_array()) {
    std::vector<LoopPoint> pts;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string w = where + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() < 2 || v[i].size() > 3) schema(w + " must be [theta, phi] or [theta, phi, chi]");
      LoopPoint p{number(v[i][0], w + "[0]"), number(v[i][1], w + "[1]"), 0.0};
      if (v[i].size() == 3) p.chi = number(v[i][2], w + "[2]");
      pts.push_back(p);
    }
    for (const LoopPoint& p : pts) {
      if (std::sin(p.theta) < 1e-3) throw DfsError(where + ": theta must stay away from 0 and pi (DFS dimension jump)");
    }
    return tabulated_loop(std::move(pts));
  }
  if (!v.is_object()) schema(where + " must be a loop object or a list of samples");
  const json& type = require(v, "type", where);
  if (!type.is_string()) schema(where + ".type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "phi_circle") {
    only_keys(v, {"type", "theta", "chi"}, where);
    return phi_circle(number(require(v, "theta", where), where + ".theta"), optional_number(v, "chi", 0.0, where));
  }
  if (t == "ellipse") {
    only_keys(v, {"type", "theta0", "dtheta", "dphi", "chi"}, where);
    return ellipse_loop(number(require(v, "theta0", where), where + ".theta0"),
                        number(require(v, "dtheta", where), where + ".dtheta"),
                        number(require(v, "dphi", where), where + ".dphi"), optional_number(v, "chi", 0.0, where));
  }
  if (t == "constant") {
    only_keys(v, {"type", "theta", "phi"}, where);
    return constant_loop(number(require(v, "theta", where), where + ".theta"),
                         number(require(v, "phi", where), where + ".phi"));
  }
  schema(where + ".type must be phi_circle, ellipse or constant, got '" + t + "'");
}

std::vector<double> positive_list(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) schema(where + " must be a non-empty list");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(positive(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string file_tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

json criterion_json(const Criterion& c) {
  return json{{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", c.hi}, {"pass", c.pass}};
}

void log_criterion(std::ostream& log, const std::string& experiment, const Criterion& c) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%s %s/%s = %.6g (threshold [%.6g, %.6g])\n", c.pass ? "PASS" : "FAIL",
                experiment.c_str(), c.name.c_str(), c.value, c.lo, c.hi);
  log << buf;
}

json report_json(const ExperimentReport& r, double wall) {
  json j;
  j["name"] = r.name;
  j["scenario"] = r.scenario;
  j["gammaT"] = r.sweep;
  j["eta"] = r.etas;
  if (!r.runs.empty()) {
    json series;
    std::vector<double> inf, binf, leak, pred, secs;
    for (const RunRecord& run : r.runs) {
      inf.push_back(run.infidelity);
      binf.push_back(run.block_infidelity);
      leak.push_back(run.leakage);
      pred.push_back(run.predicted_leakage);
      secs.push_back(run.wall_seconds);
    }
    series["infidelity"] = inf;
    series["block_infidelity"] = binf;
    series["leakage"] = leak;
    series["predicted_leakage"] = pred;
    j["series"] = series;
    j["wall_seconds_per_run"] = secs;
  }
  if (r.fit) j["fit"] = json{{"slope", r.fit->slope}, {"stderr", r.fit->slope_stderr}, {"intercept", r.fit->intercept}};
  json crit = json::array();
  for (const Criterion& c : r.criteria) crit.push_back(criterion_json(c));
  j["criteria"] = crit;
  j["notes"] = r.notes;
  j["wall_seconds"] = wall;
  return j;
}

void write_sweep_csv(const std::string& file, const std::vector<RunRecord>& runs) {
  std::ofstream os(file);
  if (!os) throw PreconditionError("cannot open " + file + " for writing");
  os << "gammaT,eta,infidelity,block_infidelity,leakage,predicted_leakage\n";
  char buf[256];
  for (const RunRecord& r : runs) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6e,%.15e,%.15e,%.15e,%.15e\n", r.gammaT, r.eta, r.infidelity,
                  r.block_infidelity, r.leakage, r.predicted_leakage);
    os << buf;
  }
}

ExperimentReport holonomy_report(const RunConfig& cfg, const Scenario& sc, std::vector<HolonomyResult>& out) {
  ExperimentReport rep;
  rep.name = "holonomy";
  rep.scenario = sc.name;
  WilsonOptions w;
  if (sc.dark_frame) w.reference_basis = sc.dark_frame(0.0);
  HolonomyResult a = wilson_loop(sc.path, cfg.steps.wilson, w);
  a.loop_id = cfg.loop_b ? "A" : sc.name;
  rep.criteria.push_back(make_criterion("unitarity_defect_" + a.loop_id, a.unitarity_defect, 0.0, cfg.tol.unitarity));
  if (sc.expected.abelian_phase) {
    const double err = ops::phase_distance(a.phases.front(), *sc.expected.abelian_phase);
    rep.notes.push_back("phase " + fmt(a.phases.front()) + ", expected " + fmt(*sc.expected.abelian_phase));
    rep.criteria.push_back(make_criterion("abelian_phase_error", err, 0.0, cfg.tol.phase));
  }
  if (sc.expected.trivial) {
    rep.criteria.push_back(
        make_criterion("trivial_holonomy", (a.U - ops::identity(a.U.rows())).norm(), 0.0, cfg.tol.phase));
  }
  if (sc.dark_frame) {
    const HolonomyResult c = holonomy_from_connection(basis_chain(sc.dark_frame, 10000));
    rep.criteria.push_back(make_criterion("wilson_vs_connection", (a.U - c.U).norm(), 0.0, cfg.tol.phase));
  }
  out.push_back(a);
  if (cfg.loop_b) {
    const Scenario sb = make_scenario_b(cfg);
    WilsonOptions wb;
    wb.reference_basis = a.basis0;
    HolonomyResult b = wilson_loop(sb.path, cfg.steps.wilson, wb);
    b.loop_id = "B";
    rep.criteria.push_back(make_criterion("unitarity_defect_B", b.unitarity_defect, 0.0, cfg.tol.unitarity));
    if (sb.dark_frame) {
      BasisChain chain = basis_chain(sb.dark_frame, 10000);
      const HolonomyResult c = holonomy_from_connection(chain);
      // Express the connection result in A's basis.
      const Matrix change = c.basis0.adjoint() * a.basis0;
      const Matrix uc = change.adjoint() * c.U * change;
      rep.criteria.push_back(make_criterion("wilson_vs_connection_B", (b.U - uc).norm(), 0.0, cfg.tol.phase));
    }
    out.push_back(b);
  }
  return rep;
}

Matrix random_hermitian(Index n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  }
  return ops::hermitian_part(g);
}

int exit_for(const std::exception& e, std::ostream& log) {
  if (dynamic_cast<const SchemaError*>(&e)) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  if (dynamic_cast<const PreconditionError*>(&e)) {
    log << "precondition error: " << e.what() << "\n";
    return 2;
  }
  if (dynamic_cast<const InvariantError*>(&e)) {
    log << "invariant breach: " << e.what() << "\n";
    return 3;
  }
  log << "invariant breach (unexpected failure): " << e.what() << "\n";
  return 3;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("top level must be an object");
  only_keys(doc, {"scenario", "params", "experiments", "gammaT", "etas", "steps", "tolerances", "description"},
            "config");

  RunConfig cfg;
  const json& sc = require(doc, "scenario", "config");
  if (!sc.is_string()) schema("scenario must be a string");
  cfg.scenario = sc.get<std::string>();
  const json params = doc.contains("params") ? doc.at("params") : json::object();
  if (!params.is_object()) schema("params must be an object");

  if (cfg.scenario == "dark_state") {
    only_keys(params, {"theta", "kappa"}, "params");
    cfg.theta = number(require(params, "theta", "params"), "params.theta");
    cfg.kappa = params.contains("kappa") ? positive(params.at("kappa"), "params.kappa") : 1.0;
  } else if (cfg.scenario == "tripod") {
    only_keys(params, {"kappa", "loop", "loop_b"}, "params");
    cfg.kappa = params.contains("kappa") ? positive(params.at("kappa"), "params.kappa") : 1.0;
    cfg.loop = parse_loop(require(params, "loop", "params"), "params.loop");
    if (params.contains("loop_b")) cfg.loop_b = parse_loop(params.at("loop_b"), "params.loop_b");
  } else if (cfg.scenario == "static") {
    only_keys(params, {"gammas", "cs"}, "params");
    const json& g = require(params, "gammas", "params");
    if (!g.is_array() || g.empty()) schema("params.gammas must be a non-empty list of matrices");
    for (std::size_t i = 0; i < g.size(); ++i) cfg.gammas.push_back(matrix_entry(g[i], "params.gammas[" + std::to_string(i) + "]"));
    if (params.contains("cs")) {
      const json& c = params.at("cs");
      if (!c.is_array()) schema("params.cs must be a list");
      for (std::size_t i = 0; i < c.size(); ++i) cfg.cs.push_back(complex_entry(c[i], "params.cs[" + std::to_string(i) + "]"));
    }
  } else {
    schema("scenario must be dark_state, tripod or static, got '" + cfg.scenario + "'");
  }

  const json& ex = require(doc, "experiments", "config");
  if (!ex.is_array() || ex.empty()) schema("experiments must be a non-empty list");
  for (const json& e : ex) {
    if (!e.is_string()) schema("experiments entries must be strings");
    const std::string name = e.get<std::string>();
    if (std::find(kExperimentNames.begin(), kExperimentNames.end(), name) == kExperimentNames.end()) {
      schema("unknown experiment '" + name + "'");
    }
    cfg.experiments.push_back(name);
  }
  if (doc.contains("gammaT")) cfg.gammaT = positive_list(doc.at("gammaT"), "gammaT");
  cfg.etas = doc.contains("etas") ? positive_list(doc.at("etas"), "etas") : std::vector<double>{2.5e-3, 1.25e-3};
  for (const std::string& name : cfg.experiments) {
    const bool needs_sweep = name == "adiabatic_limit" || name == "leakage_scaling" || name == "holonomy_fidelity";
    if (needs_sweep && cfg.gammaT.empty()) schema("experiment '" + name + "' needs a gammaT list");
    if (name == "noncommutativity" && !cfg.loop_b) schema("experiment 'noncommutativity' needs params.loop_b");
  }

  if (doc.contains("steps")) {
    const json& st = doc.at("steps");
    if (st.is_number()) {
      cfg.steps.integrate = integer(st, "steps");
    } else if (st.is_object()) {
      only_keys(st, {"integrate", "transport", "wilson"}, "steps");
      if (st.contains("integrate")) cfg.steps.integrate = integer(st.at("integrate"), "steps.integrate");
      if (st.contains("transport")) cfg.steps.transport = integer(st.at("transport"), "steps.transport");
      if (st.contains("wilson")) cfg.steps.wilson = integer(st.at("wilson"), "steps.wilson");
    } else {
      schema("steps must be an integer or an object");
    }
  }
  if (cfg.steps.integrate % 1000 != 0) schema("steps.integrate must be a multiple of 1000");
  if (cfg.steps.transport % 1000 != 0) schema("steps.transport must be a multiple of 1000");
  if (cfg.steps.wilson < 500) schema("steps.wilson must be at least 500");

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) schema("tolerances must be an object");
    only_keys(t, {"slope", "leakage_slope", "prediction_factor", "doubling", "block_fidelity", "phase", "commutator",
                  "unitarity", "gauge", "ratio_lo", "ratio_hi"},
              "tolerances");
    Tolerances& o = cfg.tol;
    o.slope = optional_number(t, "slope", o.slope, "tolerances");
    o.leakage_slope = optional_number(t, "leakage_slope", o.leakage_slope, "tolerances");
    o.prediction_factor = optional_number(t, "prediction_factor", o.prediction_factor, "tolerances");
    o.doubling = optional_number(t, "doubling", o.doubling, "tolerances");
    o.block_fidelity = optional_number(t, "block_fidelity", o.block_fidelity, "tolerances");
    o.phase = optional_number(t, "phase", o.phase, "tolerances");
    o.commutator = optional_number(t, "commutator", o.commutator, "tolerances");
    o.unitarity = optional_number(t, "unitarity", o.unitarity, "tolerances");
    o.gauge = optional_number(t, "gauge", o.gauge, "tolerances");
    o.ratio_lo = optional_number(t, "ratio_lo", o.ratio_lo, "tolerances");
    o.ratio_hi = optional_number(t, "ratio_hi", o.ratio_hi, "tolerances");
  }
  return cfg;
}

RunConfig load_config(const std::string& file) {
  std::ifstream is(file);
  if (!is) schema("cannot read config file '" + file + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

Scenario make_scenario(const RunConfig& cfg) {
  if (cfg.scenario == "dark_state") return scenario_dark_state(cfg.theta, cfg.kappa);
  if (cfg.scenario == "tripod") return scenario_tripod(*cfg.loop, cfg.kappa);
  return scenario_static(cfg.gammas, cfg.cs);
}

Scenario make_scenario_b(const RunConfig& cfg) {
  if (!cfg.loop_b) schema("params.loop_b is required");
  Scenario s = scenario_tripod(*cfg.loop_b, cfg.kappa);
  return s;
}

std::function<Scenario(double)> scenario_family(const RunConfig& cfg) {
  if (cfg.scenario == "dark_state") {
    const double theta = cfg.theta;
    return [theta](double kappa) { return scenario_dark_state(theta, kappa); };
  }
  if (cfg.scenario == "tripod") {
    const TripodLoop loop = *cfg.loop;
    return [loop](double kappa) { return scenario_tripod(loop, kappa); };
  }
  return {};
}

int run_config(const std::string& file, const RunOptions& options, std::ostream& log) {
  try {
    const RunConfig cfg = load_config(file);
    const Scenario sc = make_scenario(cfg);
    const fs::path out(options.out_dir);
    fs::create_directories(out);

    const auto has = [&](const std::string& n) {
      return std::find(cfg.experiments.begin(), cfg.experiments.end(), n) != cfg.experiments.end();
    };
    SweepSettings settings;
    settings.integrate_steps = cfg.steps.integrate;
    settings.transport_steps = cfg.steps.transport;
    settings.jobs = options.jobs;

    std::optional<FrameChain> chain;
    if (has("adiabatic_limit") || has("leakage_scaling") || has("holonomy_fidelity")) {
      TransportOptions topts;
      topts.steps = cfg.steps.transport;
      chain = transport_frame(sc.path, topts);
      // Fail fast on the stability guard before any long integration.
      const double rate = rate_scale(sc.path);
      for (double g : cfg.gammaT) {
        const double ratio = rate * (g / chain->min_gap) / cfg.steps.integrate;
        if (ratio > 0.1) {
          throw PreconditionError("stability guard: rate*T/steps = " + fmt(ratio) + " exceeds 0.1 at gammaT = " +
                                  fmt(g) + "; raise steps.integrate");
        }
      }
    }

    json report;
    report["scenario"] = sc.name;
    report["config"] = fs::path(file).filename().string();
    report["seed"] = options.seed;
    json experiments = json::array();
    json slope_table = json::array();
    bool all_pass = true;
    std::vector<HolonomyResult> holonomies;
    std::optional<std::vector<RunRecord>> shared_runs;

    auto record = [&](const ExperimentReport& rep, double wall) {
      for (const Criterion& c : rep.criteria) log_criterion(log, rep.name, c);
      for (const std::string& n : rep.notes) log << "  " << rep.name << ": " << n << "\n";
      all_pass = all_pass && rep.passed();
      experiments.push_back(report_json(rep, wall));
      if (rep.fit) {
        slope_table.push_back(json{{"experiment", rep.name}, {"slope", rep.fit->slope},
                                   {"stderr", rep.fit->slope_stderr}});
      }
    };
    auto write_runs = [&](const std::vector<RunRecord>& runs) {
      for (const RunRecord& r : runs) {
        write_trajectory_csv((out / ("trajectory_gammaT_" + file_tag(r.gammaT) + ".csv")).string(), r.trajectory,
                             r.overlap);
      }
    };
    auto sweep_runs = [&]() -> const std::vector<RunRecord>& {
      if (!shared_runs) {
        if (cfg.gammaT.size() < 3) throw PreconditionError("sweep needs at least 3 gammaT values");
        const auto [lo, hi] = std::minmax_element(cfg.gammaT.begin(), cfg.gammaT.end());
        if (std::log10(*hi / *lo) < 1.5 - 1e-12) throw PreconditionError("gammaT sweep must span 1.5 decades");
        shared_runs = sweep(sc, *chain, cfg.gammaT, settings, true);
        write_runs(*shared_runs);
        write_sweep_csv((out / "sweep.csv").string(), *shared_runs);
      }
      return *shared_runs;
    };

    for (const std::string& name : cfg.experiments) {
      const auto start = std::chrono::steady_clock::now();
      const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      };
      if (name == "holonomy") {
        const ExperimentReport rep = holonomy_report(cfg, sc, holonomies);
        record(rep, elapsed());
      } else if (name == "adiabatic_limit") {
        AdiabaticLimitOptions o;
        o.slope_tol = cfg.tol.slope;
        record(analyze_adiabatic_limit(sc, *chain, sweep_runs(), o), elapsed());
      } else if (name == "leakage_scaling") {
        LeakageOptions o;
        o.slope_tol = cfg.tol.leakage_slope;
        o.prediction_factor = cfg.tol.prediction_factor;
        o.doubling_tol = cfg.tol.doubling;
        record(analyze_leakage_scaling(sc, *chain, sweep_runs(), settings, o, scenario_family(cfg)), elapsed());
      } else if (name == "holonomy_fidelity") {
        const double g = *std::max_element(cfg.gammaT.begin(), cfg.gammaT.end());
        ExperimentReport rep = exp_holonomy_fidelity(sc, g, settings, cfg.tol.block_fidelity);
        write_trajectory_csv((out / ("trajectory_gammaT_" + file_tag(g) + ".csv")).string(),
                             rep.runs.front().trajectory, rep.runs.front().overlap);
        record(rep, elapsed());
      } else if (name == "noncommutativity") {
        const Scenario sb = make_scenario_b(cfg);
        const Commutator c = noncommutativity(sc.path, sb.path, cfg.steps.wilson);
        ExperimentReport rep;
        rep.name = name;
        rep.scenario = sc.name;
        rep.criteria.push_back(make_criterion("commutator_norm", c.norm, cfg.tol.commutator, 1e300));
        rep.criteria.push_back(make_criterion("unitarity_defect_A", c.a.unitarity_defect, 0.0, cfg.tol.unitarity));
        rep.criteria.push_back(make_criterion("unitarity_defect_B", c.b.unitarity_defect, 0.0, cfg.tol.unitarity));
        record(rep, elapsed());
      } else if (name == "gauge_invariance") {
        const GaugeCheck g = gauge_invariance_check(sc.path, zero_gauge(),
                                                    block_gauge(random_hermitian(sc.path.dim(), options.seed)),
                                                    cfg.steps.wilson);
        const ReservoirPath warped = reparameterized(
            sc.path, [](double s) { return s + 0.1 * std::sin(2.0 * std::numbers::pi * s) / (2.0 * std::numbers::pi); },
            sc.path.name() + "_warped");
        const HolonomyResult u = wilson_loop(sc.path, cfg.steps.wilson);
        WilsonOptions wo;
        wo.reference_basis = u.basis0;
        const HolonomyResult uw = wilson_loop(warped, cfg.steps.wilson, wo);
        ExperimentReport rep;
        rep.name = name;
        rep.scenario = sc.name;
        rep.criteria.push_back(make_criterion("gauge_discrepancy", g.max_discrepancy, 0.0, cfg.tol.gauge));
        rep.criteria.push_back(make_criterion("reparameterization_discrepancy", (u.U - uw.U).norm(), 0.0, cfg.tol.gauge));
        record(rep, elapsed());
      } else if (name == "expansion_consistency") {
        ConsistencyOptions o;
        o.ratio_lo = cfg.tol.ratio_lo;
        o.ratio_hi = cfg.tol.ratio_hi;
        record(exp_expansion_consistency(sc, cfg.etas, o), elapsed());
      }
    }
    if (!holonomies.empty()) write_holonomy_csv((out / "holonomy.csv").string(), holonomies);

    report["experiments"] = experiments;
    report["slope_table"] = slope_table;
    report["passed"] = all_pass;
    std::ofstream os(out / "report.json");
    if (!os) throw PreconditionError("cannot write report.json in " + out.string());
    os << report.dump(2) << "\n";
    log << (all_pass ? "all criteria passed" : "some criteria failed") << "; report in " << out.string() << "\n";
    return all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    return exit_for(e, log);
  }
}

int run_holonomy(const std::string& file, const RunOptions& options, std::ostream& log) {
  try {
    const RunConfig cfg = load_config(file);
    const Scenario sc = make_scenario(cfg);
    std::vector<HolonomyResult> results;
    const ExperimentReport rep = holonomy_report(cfg, sc, results);
    for (const HolonomyResult& r : results) {
      log << r.loop_id << ": dim " << r.dim_dfs() << ", phases";
      for (double p : r.phases) log << " " << fmt(p);
      log << ", unitarity defect " << fmt(r.unitarity_defect) << "\n";
    }
    for (const Criterion& c : rep.criteria) log_criterion(log, rep.name, c);
    fs::create_directories(options.out_dir);
    write_holonomy_csv((fs::path(options.out_dir) / "holonomy.csv").string(), results);
    return rep.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    return exit_for(e, log);
  }
}

int run_verify(const RunOptions& options, std::ostream& log) {
  try {
    const std::vector<Criterion> suite = structural_suite(options.seed);
    bool ok = true;
    for (const Criterion& c : suite) {
      log_criterion(log, "structural", c);
      ok = ok && c.pass;
    }
    return ok ? 0 : 3;
  } catch (const std::exception& e) {
    return exit_for(e, log);
  }
}

}  // namespace holodyn
