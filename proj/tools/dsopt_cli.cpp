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

// dsopt command-line runner. Every subcommand reads an INI-style config
// ([scenario] plus an optional section named after the subcommand, whose
// keys override the scenario), writes CSV files into --out, and prefixes
// each file with '#' lines recording the effective configuration and seed.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dsopt/dsopt.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

const char* kFooter = R"(Output files (columns are stable within a major version):
  weights       pattern.csv   angle_deg [deg], aw_mini_ds_db, proposed_eps<e>_db [dB, incoherent sum over beams]
                metrics.csv   method, epsilon, normalized_ds [sigma_D/omega_d], normalized_efficiency
  sweep-spread  sweep_spread.csv  spread_deg [deg], method, epsilon, normalized_ds, normalized_efficiency
  select        select.csv    n_rf, proposed_ds, baseline_n_element_ds, baseline_m_element_ds,
                              support [space-separated 0-based indices], sqrt_sigma_final,
                              proposed_eps<e>_ds, proposed_eps<e>_efficiency
  simulate      empirical_psd.csv, analytic_psd.csv  omega_tilde [omega/omega_d], psd [unit total power]
                summary.csv   weights, n_realizations, l1_distance, empirical_ds, analytic_ds, ds_ratio,
                              mean_power, expected_power
  moments-dump  c0.txt, c2.txt  one matrix row per line, entries "re,im"
  --trace adds per-solver trace files: iteration, objective, residual.
Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doppler-spread aware antenna weighting and selection for uniform linear arrays", "dsopt"};
  app.footer(kFooter);
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool trace = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> quad_nodes;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_flag("--trace", trace, "write per-solver iteration traces");
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--quad-nodes", quad_nodes, "initial Gauss nodes per half of the Doppler support")
      ->check(CLI::PositiveNumber);

  const std::pair<const char*, const char*> commands[] = {
      {"weights", "radiation patterns and metrics: AW-Mini-DS vs efficiency-constrained weights"},
      {"sweep-spread", "metrics against angle spread at a fixed centre angle"},
      {"select", "antenna selection against the RF-chain budget"},
      {"simulate", "Monte-Carlo channel PSD against the analytic formula"},
      {"moments-dump", "write the C0 and C2 matrices"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    dsopt::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = dsopt::load_config(config_path, command);
    if (seed) cfg.seed = *seed;
    if (quad_nodes) cfg.quad_nodes = *quad_nodes;
    const dsopt::RunOptions run{out_dir, trace};

    std::vector<std::filesystem::path> files;
    if (command == "weights") files = dsopt::cmd_weights(cfg, run);
    else if (command == "sweep-spread") files = dsopt::cmd_sweep_spread(cfg, run);
    else if (command == "select") files = dsopt::cmd_select(cfg, run);
    else if (command == "simulate") files = dsopt::cmd_simulate(cfg, run);
    else files = dsopt::cmd_moments_dump(cfg, run);
    for (const auto& f : files) std::cout << f.string() << '\n';
    return 0;
  } catch (const dsopt::IoError& e) {
    std::cerr << "dsopt: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const dsopt::InvalidArgument& e) {
    std::cerr << "dsopt: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dsopt::NumericalFailure& e) {
    std::cerr << "dsopt: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const dsopt::Infeasible& e) {
    std::cerr << "dsopt: infeasible problem: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const dsopt::DegenerateBeam& e) {
    std::cerr << "dsopt: degenerate beam: " << e.what() << '\n';
    return kExitNumerical;
  }
}
