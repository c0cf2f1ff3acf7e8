// SPDX-License-Identifier: Apache-2.0
//
// dsopt: Doppler-spread aware antenna weighting for uniform linear arrays
// Copyright (C) 2026 The dsopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "moments.hpp"
#include "simulator.hpp"
#include "solvers.hpp"

namespace dsopt {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool trace = false;
};

namespace detail {

// Runs fn(0..n-1) on up to `threads` workers; results land in index order and
// the first failing index's exception is rethrown.
template <class R>
std::vector<R> ordered_map(int n, unsigned threads, const std::function<R(int)>& fn) {
  std::vector<std::optional<R>> slots(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto work = [&](int i) {
    try {
      slots[i] = fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int i = static_cast<int>(t); i < n; i += static_cast<int>(threads)) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<R> out;
  out.reserve(slots.size());
  for (int i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string header(const std::string& command, const ExperimentConfig& cfg) {
  std::string h = "# dsopt " + command + "\n# seed = " + std::to_string(cfg.seed) + "\n";
  for (const auto& line : cfg.describe()) h += "# " + line + "\n";
  return h;
}

inline std::filesystem::path write_file(const RunOptions& run, const std::string& name, const std::string& body) {
  std::error_code ec;
  std::filesystem::create_directories(run.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + run.out_dir.string() + "': " + ec.message());
  const auto path = run.out_dir / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << body;
  os.flush();
  if (!os) throw IoError("write failed for '" + path.string() + "'");
  return path;
}

inline std::string trace_text(const SolverReport& rep) {
  std::ostringstream os;
  write_trace(os, rep);
  return os.str();
}

inline std::string eps_tag(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", e);
  return buf;
}

inline MomentMatrices moments_for(const ExperimentConfig& cfg, const AngleRegion& region) {
  return build_moments(region, cfg.array(), cfg.quadrature());
}

}  // namespace detail

/// Radiation patterns and scalar metrics for AW-Mini-DS and the
/// efficiency-constrained design at every configured epsilon.
///   pattern.csv: angle_deg, aw_mini_ds_db, proposed_eps<e>_db ...
///   metrics.csv: method, epsilon, normalized_ds, normalized_efficiency
inline std::vector<std::filesystem::path> cmd_weights(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  const auto region = cfg.region();
  const auto array = cfg.array();
  const auto mm = detail::moments_for(cfg, region);
  const auto full_bank = equicos_directions(region, cfg.n_beams);
  const auto bank = cfg.pattern_branch < 0
                        ? full_bank
                        : DirectionBank(region, {full_bank.directions()[static_cast<std::size_t>(cfg.pattern_branch)]});

  const auto base = min_ds_weights(mm);
  std::vector<SolverReport> reports = detail::ordered_map<SolverReport>(
      static_cast<int>(cfg.epsilons.size()), cfg.threads,
      [&](int i) { return spca_minimize_ds(mm, EfficiencyConstraint(cfg.epsilons[i])); });

  std::vector<WeightVector> all{base.weights.normalized()};
  for (const auto& r : reports) all.push_back(r.final_weights.normalized());
  const auto grid = default_theta_grid(cfg.pattern_step_deg);
  std::vector<std::vector<PatternPoint>> patterns;
  for (const auto& w : all) patterns.push_back(radiation_pattern(w, bank, grid, array));

  std::string pat = detail::header("weights", cfg) + "angle_deg,aw_mini_ds_db";
  for (double e : cfg.epsilons) pat += ",proposed_eps" + detail::eps_tag(e) + "_db";
  pat += "\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    pat += detail::num(rad_to_deg(grid[k]));
    for (const auto& p : patterns) pat += "," + detail::num(p[k].gain_db);
    pat += "\n";
  }

  std::string met = detail::header("weights", cfg) + "method,epsilon,normalized_ds,normalized_efficiency\n";
  met += "aw_mini_ds,," + detail::num(base.normalized_ds) + "," +
         detail::num(radiation_efficiency(base.weights, mm.pencil).normalized) + "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& w = reports[i].final_weights;
    met += "proposed," + detail::num(cfg.epsilons[i]) + "," + detail::num(normalized_doppler_spread(w, mm.pencil)) +
           "," + detail::num(radiation_efficiency(w, mm.pencil).normalized) + "\n";
  }

  std::vector<std::filesystem::path> files{detail::write_file(run, "pattern.csv", pat),
                                           detail::write_file(run, "metrics.csv", met)};
  if (run.trace) {
    const SolverReport base_rep{{base.eigenvalue}, {0.0}, Termination::converged, base.weights};
    files.push_back(detail::write_file(run, "trace_aw_mini_ds.txt",
                                       detail::header("weights", cfg) + detail::trace_text(base_rep)));
    for (std::size_t i = 0; i < reports.size(); ++i) {
      files.push_back(detail::write_file(run, "trace_proposed_eps" + detail::eps_tag(cfg.epsilons[i]) + ".txt",
                                         detail::header("weights", cfg) + detail::trace_text(reports[i])));
    }
  }
  return files;
}

/// Metrics against angle spread at a fixed centre angle.
///   sweep_spread.csv: spread_deg, method, epsilon, normalized_ds, normalized_efficiency
inline std::vector<std::filesystem::path> cmd_sweep_spread(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  if (cfg.spreads_deg.empty()) throw ConfigError("spreads_deg", "sweep list is empty");
  struct Point {
    MinDsResult base;
    double base_eff;
    std::vector<SolverReport> reports;
    HermitianPencil pencil;
  };
  const auto points = detail::ordered_map<Point>(
      static_cast<int>(cfg.spreads_deg.size()), cfg.threads, [&](int i) {
        const auto region = AngleRegion::centered(deg_to_rad(cfg.center_deg), deg_to_rad(cfg.spreads_deg[i]));
        const auto mm = detail::moments_for(cfg, region);
        auto base = min_ds_weights(mm);
        const double eff = radiation_efficiency(base.weights, mm.pencil).normalized;
        std::vector<SolverReport> reps;
        for (double e : cfg.epsilons) reps.push_back(spca_minimize_ds(mm, EfficiencyConstraint(e)));
        return Point{std::move(base), eff, std::move(reps), mm.pencil};
      });

  std::string csv = detail::header("sweep-spread", cfg) +
                    "spread_deg,method,epsilon,normalized_ds,normalized_efficiency\n";
  std::vector<std::filesystem::path> files;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    const std::string s = detail::num(cfg.spreads_deg[i]);
    csv += s + ",aw_mini_ds,," + detail::num(pt.base.normalized_ds) + "," + detail::num(pt.base_eff) + "\n";
    for (std::size_t k = 0; k < pt.reports.size(); ++k) {
      const auto& w = pt.reports[k].final_weights;
      csv += s + ",proposed," + detail::num(cfg.epsilons[k]) + "," +
             detail::num(normalized_doppler_spread(w, pt.pencil)) + "," +
             detail::num(radiation_efficiency(w, pt.pencil).normalized) + "\n";
      if (run.trace) {
        files.push_back(detail::write_file(
            run, "trace_spread" + s + "_eps" + detail::eps_tag(cfg.epsilons[k]) + ".txt",
            detail::header("sweep-spread", cfg) + detail::trace_text(pt.reports[k])));
      }
    }
  }
  files.insert(files.begin(), detail::write_file(run, "sweep_spread.csv", csv));
  return files;
}

/// Antenna selection against the RF-chain budget.
///   select.csv: n_rf, proposed_ds, baseline_n_element_ds, baseline_m_element_ds,
///   support (space separated), sqrt_sigma_final, then per epsilon
///   proposed_eps<e>_ds and proposed_eps<e>_efficiency (refit with the
///   efficiency constraint on the same support).
inline std::vector<std::filesystem::path> cmd_select(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  if (cfg.budgets.empty()) throw ConfigError("budgets", "budget list is empty");
  for (int n : cfg.budgets) {
    if (n > cfg.m_antennas) throw ConfigError("budgets", "every budget must lie in [1, m_antennas]");
  }
  const auto mm = detail::moments_for(cfg, cfg.region());
  const double base_m = min_ds_weights(mm).normalized_ds;
  SelectionOptions sel;
  sel.zero_tol = cfg.zero_tol;
  sel.baseline = cfg.baseline;

  struct Row {
    TwoStepResult unconstrained;
    std::vector<TwoStepResult> constrained;
    double base_n;
  };
  const auto rows = detail::ordered_map<Row>(static_cast<int>(cfg.budgets.size()), cfg.threads, [&](int i) {
    const int n = cfg.budgets[i];
    const auto stage = select_antennas(mm, n, sel);
    auto un = refit_on_support(mm.pencil, stage, std::nullopt, sel.floors);
    std::vector<TwoStepResult> con;
    for (double e : cfg.epsilons) con.push_back(refit_on_support(mm.pencil, stage, EfficiencyConstraint(e), sel.floors));
    const auto idx = contiguous_subarray(cfg.m_antennas, n, cfg.baseline);
    const double bn = min_ds_weights(mm.pencil.principal(idx)).normalized_ds;
    return Row{std::move(un), std::move(con), bn};
  });

  std::string csv = detail::header("select", cfg) +
                    "n_rf,proposed_ds,baseline_n_element_ds,baseline_m_element_ds,support,sqrt_sigma_final";
  for (double e : cfg.epsilons) {
    csv += ",proposed_eps" + detail::eps_tag(e) + "_ds,proposed_eps" + detail::eps_tag(e) + "_efficiency";
  }
  csv += "\n";
  std::vector<std::filesystem::path> files;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string supp;
    for (int k : r.unconstrained.selection.support) supp += (supp.empty() ? "" : " ") + std::to_string(k);
    csv += std::to_string(cfg.budgets[i]) + "," + detail::num(r.unconstrained.normalized_ds) + "," +
           detail::num(r.base_n) + "," + detail::num(base_m) + "," + supp + "," +
           detail::num(std::sqrt(r.unconstrained.selection.sigma_final));
    for (const auto& c : r.constrained) csv += "," + detail::num(c.normalized_ds) + "," + detail::num(c.normalized_efficiency);
    csv += "\n";
    if (run.trace) {
      std::string t = detail::header("select", cfg) + "# bisection probes: sigma support_size\n";
      for (const auto& p : r.unconstrained.selection.probes) {
        t += "# probe " + detail::num(p.sigma) + " " + std::to_string(p.support_size) + "\n";
      }
      t += detail::trace_text(r.unconstrained.selection.report);
      files.push_back(detail::write_file(run, "trace_select_n" + std::to_string(cfg.budgets[i]) + ".txt", t));
    }
  }
  files.insert(files.begin(), detail::write_file(run, "select.csv", csv));
  return files;
}

inline ChannelConfig channel_config(const ExperimentConfig& cfg) {
  const auto region = cfg.region();
  return ChannelConfig{region,         cfg.array(),        equicos_directions(region, cfg.n_beams),
                       cfg.f_d,        cfg.t_s,            cfg.block_len,
                       cfg.n_paths,    cfg.n_realizations, cfg.seed,
                       cfg.path_grid};
}

/// Monte-Carlo channel PSD against the analytic formula.
///   empirical_psd.csv / analytic_psd.csv: omega_tilde, psd (unit total power)
///   summary.csv: weights, n_realizations, l1_distance, empirical_ds,
///   analytic_ds, ds_ratio, mean_power, expected_power
inline std::vector<std::filesystem::path> cmd_simulate(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  const auto ch = channel_config(cfg);
  const auto mm = detail::moments_for(cfg, ch.region);
  std::optional<WeightVector> w;
  switch (cfg.sim_weights) {
    case SimWeights::min_ds: w = min_ds_weights(mm).weights; break;
    case SimWeights::proposed:
      w = spca_minimize_ds(mm, EfficiencyConstraint(cfg.epsilons.front())).final_weights;
      break;
    case SimWeights::uniform: w = WeightVector::uniform(cfg.m_antennas); break;
  }
  SimulationOptions sim;
  sim.threads = cfg.threads;
  const auto res = simulate_psd(ch, *w, sim);
  const auto an = analytic_psd_grid(*w, ch);

  auto dump = [&](const std::vector<SpectrumSample>& s) {
    std::string body = detail::header("simulate", cfg) + "omega_tilde,psd\n";
    for (const auto& v : s) body += detail::num(v.omega_tilde) + "," + detail::num(v.value) + "\n";
    return body;
  };
  const double emp_ds = empirical_doppler_spread(res.psd, cfg.f_d) / ch.omega_d();
  const double an_ds = normalized_doppler_spread(*w, mm.pencil);
  const double power = 0.5 * (res.mean_power_first_half + res.mean_power_second_half);
  std::string summary = detail::header("simulate", cfg) +
                        "weights,n_realizations,l1_distance,empirical_ds,analytic_ds,ds_ratio,mean_power,"
                        "expected_power\n";
  summary += std::string(detail::to_string(cfg.sim_weights)) + "," + std::to_string(res.realizations) + "," +
             detail::num(l1_distance(res.psd, an)) + "," + detail::num(emp_ds) + "," + detail::num(an_ds) + "," +
             detail::num(emp_ds / an_ds) + "," + detail::num(power) + "," + detail::num(res.expected_power) + "\n";
  return {detail::write_file(run, "empirical_psd.csv", dump(res.psd)),
          detail::write_file(run, "analytic_psd.csv", dump(an)),
          detail::write_file(run, "summary.csv", summary)};
}

/// C0 and C2 as text matrices (one row per line, entries "re,im").
inline std::vector<std::filesystem::path> cmd_moments_dump(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  const auto mm = detail::moments_for(cfg, cfg.region());
  auto dump = [&](const Eigen::MatrixXcd& m) {
    std::ostringstream os;
    os << detail::header("moments-dump", cfg) << "# lambda_max_c0 = " << detail::num(mm.lambda_max_c0()) << "\n";
    write_matrix(os, m);
    return os.str();
  };
  return {detail::write_file(run, "c0.txt", dump(mm.c0())), detail::write_file(run, "c2.txt", dump(mm.c2()))};
}

}  // namespace dsopt
