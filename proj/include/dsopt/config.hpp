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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "errors.hpp"
#include "simulator.hpp"
#include "solvers.hpp"

namespace dsopt {

/// Invalid configuration; field() names the offending key.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string field, const std::string& what)
      : InvalidArgument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Which weights the simulate command feeds to the channel.
enum class SimWeights { min_ds, proposed, uniform };

struct ExperimentConfig {
  // scenario
  int m_antennas = 64;
  double spacing = 0.45;
  double theta_l_deg = 85.0;
  double theta_r_deg = 95.0;
  double f_d = 5000.0;
  std::vector<double> epsilons{0.5};
  int n_beams = 64;
  std::uint64_t seed = 1;
  int quad_nodes = 0;  // 0: library default
  unsigned threads = 0;
  // weights
  double pattern_step_deg = 0.1;
  /// -1: incoherent sum over all beams; q >= 0: beam q alone.
  int pattern_branch = -1;
  // sweep-spread
  double center_deg = 90.0;
  std::vector<double> spreads_deg{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  // select
  std::vector<int> budgets{4, 6, 8, 12, 16};
  double zero_tol = 1e-6;
  SubarrayPlacement baseline = SubarrayPlacement::leading;
  // simulate
  double t_s = 5e-4;
  int block_len = 1024;
  int n_paths = 512;
  int n_realizations = 10000;
  PathGrid path_grid = PathGrid::uniform_cos;
  SimWeights sim_weights = SimWeights::min_ds;

  AngleRegion region() const { return AngleRegion::from_degrees(theta_l_deg, theta_r_deg); }
  ArrayConfig array() const { return ArrayConfig(m_antennas, spacing); }
  QuadratureOptions quadrature() const {
    QuadratureOptions q;
    if (quad_nodes > 0) q.min_nodes = quad_nodes;
    return q;
  }

  void validate() const;
  /// Every effective setting as "key = value", in a fixed order.
  std::vector<std::string> describe() const;
};

namespace detail {

template <class T>
T parse_scalar(const std::string& key, const std::string& raw) {
  const std::string s = boost::algorithm::trim_copy(raw);
  try {
    if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!s.empty() && s[0] == '-') throw boost::bad_lexical_cast();
    }
    return boost::lexical_cast<T>(s);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError(key, "cannot parse '" + s + "'");
  }
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<T> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_scalar<T>(key, item));
  if (out.empty()) throw ConfigError(key, "list is empty");
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const std::string& k, auto member) {
      t[k] = [k, member](ExperimentConfig& c, const std::string& v) {
        using M = std::remove_reference_t<decltype(c.*member)>;
        c.*member = parse_scalar<M>(k, v);
      };
    };
    num("m_antennas", &ExperimentConfig::m_antennas);
    num("spacing", &ExperimentConfig::spacing);
    num("theta_l_deg", &ExperimentConfig::theta_l_deg);
    num("theta_r_deg", &ExperimentConfig::theta_r_deg);
    num("f_d", &ExperimentConfig::f_d);
    num("n_beams", &ExperimentConfig::n_beams);
    num("seed", &ExperimentConfig::seed);
    num("quad_nodes", &ExperimentConfig::quad_nodes);
    num("threads", &ExperimentConfig::threads);
    num("pattern_step_deg", &ExperimentConfig::pattern_step_deg);
    num("pattern_branch", &ExperimentConfig::pattern_branch);
    num("center_deg", &ExperimentConfig::center_deg);
    num("zero_tol", &ExperimentConfig::zero_tol);
    num("t_s", &ExperimentConfig::t_s);
    num("block_len", &ExperimentConfig::block_len);
    num("n_paths", &ExperimentConfig::n_paths);
    num("n_realizations", &ExperimentConfig::n_realizations);
    t["epsilon"] = [](ExperimentConfig& c, const std::string& v) { c.epsilons = parse_list<double>("epsilon", v); };
    t["spreads_deg"] = [](ExperimentConfig& c, const std::string& v) {
      c.spreads_deg = parse_list<double>("spreads_deg", v);
    };
    t["budgets"] = [](ExperimentConfig& c, const std::string& v) { c.budgets = parse_list<int>("budgets", v); };
    t["baseline"] = [](ExperimentConfig& c, const std::string& v) {
      const auto s = boost::algorithm::trim_copy(v);
      if (s == "leading") c.baseline = SubarrayPlacement::leading;
      else if (s == "centered") c.baseline = SubarrayPlacement::centered;
      else throw ConfigError("baseline", "expected 'leading' or 'centered', got '" + s + "'");
    };
    t["path_grid"] = [](ExperimentConfig& c, const std::string& v) {
      const auto s = boost::algorithm::trim_copy(v);
      if (s == "uniform_cos") c.path_grid = PathGrid::uniform_cos;
      else if (s == "uniform_theta") c.path_grid = PathGrid::uniform_theta;
      else if (s == "random_theta") c.path_grid = PathGrid::random_theta;
      else throw ConfigError("path_grid", "expected uniform_cos, uniform_theta or random_theta, got '" + s + "'");
    };
    t["weights"] = [](ExperimentConfig& c, const std::string& v) {
      const auto s = boost::algorithm::trim_copy(v);
      if (s == "min_ds") c.sim_weights = SimWeights::min_ds;
      else if (s == "proposed") c.sim_weights = SimWeights::proposed;
      else if (s == "uniform") c.sim_weights = SimWeights::uniform;
      else throw ConfigError("weights", "expected min_ds, proposed or uniform, got '" + s + "'");
    };
    return t;
  }();
  return table;
}

inline const char* to_string(SubarrayPlacement p) { return p == SubarrayPlacement::leading ? "leading" : "centered"; }
inline const char* to_string(SimWeights w) {
  switch (w) {
    case SimWeights::min_ds: return "min_ds";
    case SimWeights::proposed: return "proposed";
    case SimWeights::uniform: return "uniform";
  }
  return "unknown";
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  auto need = [](bool ok, const char* field, const std::string& msg) {
    if (!ok) throw ConfigError(field, msg);
  };
  need(m_antennas >= 1, "m_antennas", "must be >= 1");
  need(spacing > 0.0 && std::isfinite(spacing), "spacing", "must be positive");
  need(theta_l_deg > 0.0 && theta_l_deg < 180.0, "theta_l_deg", "must lie in (0, 180)");
  need(theta_r_deg > theta_l_deg && theta_r_deg < 180.0, "theta_r_deg", "must lie in (theta_l_deg, 180)");
  need(f_d > 0.0 && std::isfinite(f_d), "f_d", "must be positive");
  for (double e : epsilons) need(e > 0.0 && e < 1.0, "epsilon", "every value must lie in (0, 1)");
  need(n_beams >= 1, "n_beams", "must be >= 1");
  need(quad_nodes >= 0, "quad_nodes", "must be >= 0");
  need(pattern_step_deg > 0.0 && pattern_step_deg < 180.0, "pattern_step_deg", "must lie in (0, 180)");
  need(pattern_branch >= -1 && pattern_branch < n_beams, "pattern_branch", "must be -1 or a beam index below n_beams");
  need(center_deg > 0.0 && center_deg < 180.0, "center_deg", "must lie in (0, 180)");
  for (double s : spreads_deg) {
    need(s > 0.0 && center_deg - 0.5 * s > 0.0 && center_deg + 0.5 * s < 180.0, "spreads_deg",
         "every spread must be positive and keep the region inside (0, 180)");
  }
  for (int n : budgets) need(n >= 1, "budgets", "every budget must be >= 1");
  need(zero_tol > 0.0 && zero_tol < 1.0, "zero_tol", "must lie in (0, 1)");
  need(t_s > 0.0 && std::isfinite(t_s), "t_s", "must be positive");
  need(block_len >= 2, "block_len", "must be >= 2");
  need(n_paths >= 1, "n_paths", "must be >= 1");
  need(n_realizations >= 1, "n_realizations", "must be >= 1");
}

inline std::vector<std::string> ExperimentConfig::describe() const {
  using detail::fmt;
  return {
      "m_antennas = " + std::to_string(m_antennas),
      "spacing = " + fmt(spacing),
      "theta_l_deg = " + fmt(theta_l_deg),
      "theta_r_deg = " + fmt(theta_r_deg),
      "f_d = " + fmt(f_d),
      "epsilon = " + detail::join(epsilons),
      "n_beams = " + std::to_string(n_beams),
      "seed = " + std::to_string(seed),
      "quad_nodes = " + std::to_string(quad_nodes),
      "pattern_step_deg = " + fmt(pattern_step_deg),
      "pattern_branch = " + std::to_string(pattern_branch),
      "center_deg = " + fmt(center_deg),
      "spreads_deg = " + detail::join(spreads_deg),
      "budgets = " + detail::join(budgets),
      "zero_tol = " + fmt(zero_tol),
      std::string("baseline = ") + detail::to_string(baseline),
      "t_s = " + fmt(t_s),
      "block_len = " + std::to_string(block_len),
      "n_paths = " + std::to_string(n_paths),
      "n_realizations = " + std::to_string(n_realizations),
      std::string("path_grid = ") + to_string(path_grid),
      std::string("weights = ") + detail::to_string(sim_weights),
  };
}

/// Applies [scenario] and then the section named `command` (its keys
/// override the scenario). Unknown sections and keys are errors.
inline ExperimentConfig parse_config(std::istream& in, const std::string& command) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  static const char* const known[] = {"scenario", "weights", "sweep-spread", "select", "simulate", "moments-dump"};
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
      throw ConfigError(section, "unknown section");
    }
    if (body.empty() && !body.data().empty()) throw ConfigError(section, "key outside of a section");
    for (const auto& [key, value] : body) {
      if (!detail::setters().count(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }
  auto apply = [&](const char* section) {
    const auto node = tree.get_child_optional(section);
    if (!node) return;
    for (const auto& [key, value] : *node) detail::setters().at(key)(cfg, value.data());
  };
  apply("scenario");
  if (command != "scenario") apply(command.c_str());
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, command);
}

}  // namespace dsopt
