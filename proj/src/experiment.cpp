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

#include "holodyn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <thread>

#include "holodyn/adiabatic_expansion.hpp"
#include "holodyn/errors.hpp"

namespace holodyn {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void require_sweep(const std::vector<double>& gammaT, std::size_t min_points, double min_decades) {
  if (gammaT.size() < min_points) {
    throw PreconditionError("sweep needs at least " + std::to_string(min_points) + " gammaT values");
  }
  for (double g : gammaT) {
    if (!(g > 0.0) || !std::isfinite(g)) throw PreconditionError("gammaT values must be positive");
  }
  const auto [lo, hi] = std::minmax_element(gammaT.begin(), gammaT.end());
  if (std::log10(*hi / *lo) < min_decades - 1e-12) {
    throw PreconditionError("gammaT sweep must span at least " + fmt(min_decades) + " decades");
  }
}

Matrix random_density(Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_loglog: need at least two points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw PreconditionError("fit_loglog: non-positive value " + fmt(x[i] > 0.0 ? y[i] : x[i]));
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw PreconditionError("fit_loglog: x values are all equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ly[i] - fit.intercept - fit.slope * lx[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

Criterion make_criterion(std::string name, double value, double lo, double hi) {
  return Criterion{std::move(name), value, lo, hi, std::isfinite(value) && value >= lo && value <= hi};
}

bool ExperimentReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

bool is_static_chain(const FrameChain& chain) {
  return std::all_of(chain.frames.begin(), chain.frames.end(), [](const DFSFrame& f) { return f.G.norm() < 1e-12; });
}

RunRecord run_point(const Scenario& scenario, const FrameChain& chain, double gammaT, int steps, bool predict) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord r;
  r.gammaT = gammaT;
  r.eta = 1.0 / gammaT;
  r.T = gammaT / chain.min_gap;
  r.steps = steps;
  r.trajectory = integrate(scenario.path, scenario.rho0, r.T, steps);
  const TrajectoryCheck check = check_trajectory(r.trajectory);
  if (!check.ok) {
    throw InvariantError("trajectory invariants broken at gammaT = " + fmt(gammaT) + ": trace defect " +
                         fmt(check.max_trace_defect) + ", min eigenvalue " + fmt(check.min_eigenvalue) +
                         ", max purity " + fmt(check.max_purity));
  }
  r.overlap = dfs_overlap(r.trajectory, chain, scenario.rho0);
  const OverlapPoint& last = r.overlap.back();
  r.infidelity = 1.0 - last.fidelity;
  r.block_infidelity = 1.0 - last.block_fidelity;
  r.leakage = 1.0 - last.population;
  if (predict) r.predicted_leakage = predict_leakage(scenario.path, chain, scenario.rho0, r.eta).leakage;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<RunRecord> sweep(const Scenario& scenario, const FrameChain& chain, const std::vector<double>& gammaT,
                             const SweepSettings& settings, bool predict) {
  std::vector<RunRecord> out(gammaT.size());
  std::vector<std::exception_ptr> errors(gammaT.size());
  const std::size_t jobs = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, settings.jobs)), 1,
                                                   std::max<std::size_t>(1, gammaT.size()));
  auto work = [&](std::size_t i) {
    try {
      out[i] = run_point(scenario, chain, gammaT[i], settings.integrate_steps, predict);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (jobs == 1) {
    for (std::size_t i = 0; i < gammaT.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < gammaT.size(); i += jobs) work(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ExperimentReport analyze_adiabatic_limit(const Scenario& scenario, const FrameChain& chain,
                                         std::vector<RunRecord> runs, const AdiabaticLimitOptions& options) {
  ExperimentReport rep;
  rep.name = "adiabatic_limit";
  rep.scenario = scenario.name;
  for (const RunRecord& r : runs) {
    rep.sweep.push_back(r.gammaT);
    rep.etas.push_back(r.eta);
  }
  if (is_static_chain(chain)) {
    double worst = 0.0;
    for (const RunRecord& r : runs) worst = std::max(worst, std::abs(r.infidelity));
    rep.criteria.push_back(make_criterion("static_infidelity", worst, 0.0, options.static_tol));
  } else {
    std::vector<double> y;
    for (const RunRecord& r : runs) y.push_back(r.infidelity);
    rep.fit = fit_loglog(rep.sweep, y);
    rep.notes.push_back("slope of (1 - fidelity) vs eta = " + fmt(-rep.fit->slope));
    rep.criteria.push_back(
        make_criterion("infidelity_slope_vs_gammaT", rep.fit->slope, -1.0 - options.slope_tol, -1.0 + options.slope_tol));
  }
  rep.runs = std::move(runs);
  return rep;
}

ExperimentReport exp_adiabatic_limit(const Scenario& scenario, const std::vector<double>& gammaT,
                                     const SweepSettings& settings, const AdiabaticLimitOptions& options) {
  require_sweep(gammaT, 3, 1.5);
  TransportOptions topts;
  topts.steps = settings.transport_steps;
  const FrameChain chain = transport_frame(scenario.path, topts);
  return analyze_adiabatic_limit(scenario, chain, sweep(scenario, chain, gammaT, settings, false), options);
}

ExperimentReport analyze_leakage_scaling(const Scenario& scenario, const FrameChain& chain,
                                         std::vector<RunRecord> runs, const SweepSettings& settings,
                                         const LeakageOptions& options,
                                         const std::function<Scenario(double)>& family) {
  ExperimentReport rep;
  rep.name = "leakage_scaling";
  rep.scenario = scenario.name;
  for (const RunRecord& r : runs) {
    rep.sweep.push_back(r.gammaT);
    rep.etas.push_back(r.eta);
  }
  if (is_static_chain(chain)) {
    double worst = 0.0;
    for (const RunRecord& r : runs) worst = std::max(worst, std::abs(r.leakage));
    rep.criteria.push_back(make_criterion("static_leakage", worst, 0.0, options.static_tol));
    rep.runs = std::move(runs);
    return rep;
  }
  std::vector<double> y;
  for (const RunRecord& r : runs) y.push_back(r.leakage);
  rep.fit = fit_loglog(rep.etas, y);
  rep.criteria.push_back(
      make_criterion("leakage_slope_vs_eta", rep.fit->slope, 1.0 - options.slope_tol, 1.0 + options.slope_tol));
  double worst = 1.0;
  for (const RunRecord& r : runs) {
    const double ratio = r.leakage / r.predicted_leakage;
    worst = std::max({worst, ratio, 1.0 / ratio});
  }
  rep.criteria.push_back(make_criterion("leakage_vs_L1_prediction_factor", worst, 1.0, options.prediction_factor));

  if (family && scenario.kappa) {
    const std::size_t mid = runs.size() / 2;
    const RunRecord& base = runs[mid];
    const Scenario doubled = family(2.0 * *scenario.kappa);
    TransportOptions topts;
    topts.steps = settings.transport_steps;
    const FrameChain chain2 = transport_frame(doubled.path, topts);
    // Same physical time T, twice the gap.
    const double gammaT2 = base.T * chain2.min_gap;
    const RunRecord r2 = run_point(doubled, chain2, gammaT2, settings.integrate_steps, false);
    const double ratio = base.leakage / r2.leakage;
    rep.notes.push_back("kappa doubling at T = " + fmt(base.T) + ": leakage " + fmt(base.leakage) + " -> " +
                        fmt(r2.leakage));
    rep.criteria.push_back(
        make_criterion("kappa_doubling_leakage_ratio", ratio, 2.0 * (1.0 - options.doubling_tol),
                       2.0 * (1.0 + options.doubling_tol)));
  }
  rep.runs = std::move(runs);
  return rep;
}

ExperimentReport exp_leakage_scaling(const Scenario& scenario, const std::vector<double>& gammaT,
                                     const SweepSettings& settings, const LeakageOptions& options,
                                     const std::function<Scenario(double)>& family) {
  require_sweep(gammaT, 3, 1.5);
  TransportOptions topts;
  topts.steps = settings.transport_steps;
  const FrameChain chain = transport_frame(scenario.path, topts);
  return analyze_leakage_scaling(scenario, chain, sweep(scenario, chain, gammaT, settings, true), settings, options,
                                 family);
}

ExperimentReport exp_holonomy_fidelity(const Scenario& scenario, double gammaT, const SweepSettings& settings,
                                       double min_block_fidelity) {
  TransportOptions topts;
  topts.steps = settings.transport_steps;
  const FrameChain chain = transport_frame(scenario.path, topts);
  ExperimentReport rep;
  rep.name = "holonomy_fidelity";
  rep.scenario = scenario.name;
  rep.sweep = {gammaT};
  rep.etas = {1.0 / gammaT};
  rep.runs.push_back(run_point(scenario, chain, gammaT, settings.integrate_steps, false));
  const RunRecord& r = rep.runs.back();
  rep.criteria.push_back(make_criterion("dfs_block_fidelity", 1.0 - r.block_infidelity, min_block_fidelity, 1.0 + 1e-9));
  rep.notes.push_back("unnormalized fidelity " + fmt(1.0 - r.infidelity) + ", population " + fmt(1.0 - r.leakage));
  return rep;
}

ExperimentReport exp_expansion_consistency(const Scenario& scenario, const std::vector<double>& etas,
                                           const ConsistencyOptions& options) {
  if (etas.size() < 2) throw PreconditionError("expansion_consistency needs at least two eta values");
  ExperimentReport rep;
  rep.name = "expansion_consistency";
  rep.scenario = scenario.name;
  rep.etas = etas;
  std::vector<double> d;
  for (double eta : etas) {
    rep.sweep.push_back(1.0 / eta);
    const ExpansionComparison c = compare_expansion(scenario.path, scenario.rho0, eta);
    d.push_back(c.discrepancy);
    rep.notes.push_back("eta = " + fmt(eta) + ": discrepancy " + fmt(c.discrepancy) + ", leakage full " +
                        fmt(c.leakage_full) + ", truncated " + fmt(c.leakage_truncated) + ", max dS1/ds " +
                        fmt(c.max_s1_drift));
  }
  for (std::size_t i = 0; i + 1 < etas.size(); ++i) {
    const double ratio = d[i] / d[i + 1];
    const double expected = (etas[i] / etas[i + 1]) * (etas[i] / etas[i + 1]) / 4.0;
    rep.criteria.push_back(make_criterion("discrepancy_ratio_" + fmt(etas[i]) + "_to_" + fmt(etas[i + 1]), ratio,
                                          options.ratio_lo * expected, options.ratio_hi * expected));
  }
  if (etas.size() > 2) rep.fit = fit_loglog(etas, d);
  return rep;
}

std::vector<Criterion> structural_suite(unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::vector<Criterion> out;
  const double pi = std::numbers::pi;
  const std::vector<Scenario> scenarios = {scenario_dark_state(pi / 4.0, 1.0),
                                           scenario_tripod(phi_circle(pi / 4.0, pi / 2.0), 1.0)};
  double l_minus1 = 0.0, gammabar = 0.0, d_pi = 0.0, h1 = 0.0, h2 = 0.0, z = 0.0, rigidity = 0.0;
  double trace = 0.0, min_eig = 0.0;
  for (const Scenario& sc : scenarios) {
    TransportOptions topts;
    topts.steps = 4000;
    const FrameChain chain = transport_frame(sc.path, topts);
    rigidity = std::max(rigidity, chain.max_rigidity_defect);
    const Index k = chain.dfs0.dim();
    for (std::size_t j = 0; j < chain.frames.size(); j += 20) {
      const DFSFrame& f = chain.frames[j];
      const LindbladSample sample = sc.path.eval(f.s);
      const DOperator d = build_D(sample);
      d_pi = std::max(d_pi, (d.D * f.Pi()).norm());
      const AdiabaticOrders o = build_orders(f, sample, chain.min_gap, 1e-3);
      const StructuralDefects sd = structural_defects(o);
      gammabar = std::max(gammabar, sd.gammabar_pibar);
      h1 = std::max(h1, sd.h1_off_diagonal);
      h2 = std::max(h2, sd.h2_off_diagonal);
      z = std::max(z, sd.z_hermiticity);
      if (j % 400 == 0) {
        const SuperOperator lm1 = l_minus1_superop(o);
        const Matrix bbar = f.O.adjoint() * f.dfs.basis();
        for (int r = 0; r < 20; ++r) {
          const Matrix rho = bbar * random_density(k, rng) * bbar.adjoint();
          l_minus1 = std::max(l_minus1, lm1.apply(rho).norm());
        }
      }
    }
    const Trajectory traj = integrate(sc.path, sc.rho0, 200.0, 20000);
    const TrajectoryCheck tc = check_trajectory(traj);
    trace = std::max(trace, tc.max_trace_defect);
    min_eig = std::min(min_eig, tc.min_eigenvalue);
  }
  out.push_back(make_criterion("L_minus1_on_dfs_states", l_minus1, 0.0, 1e-10));
  out.push_back(make_criterion("gammabar_pibar", gammabar, 0.0, 1e-10));
  out.push_back(make_criterion("D_pi", d_pi, 0.0, 1e-10));
  out.push_back(make_criterion("htilde1_off_diagonal", h1, 0.0, 1e-12));
  out.push_back(make_criterion("htilde2_off_diagonal", h2, 0.0, 1e-12));
  out.push_back(make_criterion("z_hermiticity", z, 0.0, 1e-12));
  out.push_back(make_criterion("frame_rigidity", rigidity, 0.0, 1e-6));
  out.push_back(make_criterion("trajectory_trace_defect", trace, 0.0, 1e-9));
  out.push_back(make_criterion("trajectory_min_eigenvalue", min_eig, -1e-8, 1.0));
  return out;
}

}  // namespace holodyn
