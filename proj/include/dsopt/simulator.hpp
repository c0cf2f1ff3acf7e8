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
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <unsupported/Eigen/FFT>

#include "errors.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "moments.hpp"

namespace dsopt {

/// Discretization of the angle-of-departure integral.
///  - uniform_cos: cell midpoints evenly spaced in cos(theta), each gain
///    weighted by its cell's angular width. When n_paths is a multiple of the
///    bank size the residual Doppler frequencies fall on a common lattice and
///    synthesis reduces to one matrix product per batch of trials.
///  - uniform_theta: midpoints evenly spaced in theta.
///  - random_theta: angles drawn uniformly per trial.
enum class PathGrid { uniform_cos, uniform_theta, random_theta };

inline const char* to_string(PathGrid g) {
  switch (g) {
    case PathGrid::uniform_cos: return "uniform_cos";
    case PathGrid::uniform_theta: return "uniform_theta";
    case PathGrid::random_theta: return "random_theta";
  }
  return "unknown";
}

struct ChannelConfig {
  AngleRegion region;
  ArrayConfig array;
  DirectionBank bank;
  double f_d;
  double t_s;
  int block_len;
  int n_paths;
  int n_realizations;
  std::uint64_t seed;
  PathGrid grid = PathGrid::uniform_cos;

  void validate() const {
    if (!(f_d > 0.0) || !std::isfinite(f_d)) throw InvalidArgument("f_d must be positive");
    if (!(t_s > 0.0) || !std::isfinite(t_s)) throw InvalidArgument("t_s must be positive");
    if (block_len < 2) throw InvalidArgument("block_len must be at least 2");
    if (n_paths < 1) throw InvalidArgument("n_paths must be at least 1");
    if (n_realizations < 1) throw InvalidArgument("n_realizations must be at least 1");
  }

  double omega_d() const { return kTwoPi * f_d; }
  /// Bin width of the periodogram in normalized Doppler units.
  double bin_width() const { return 1.0 / (block_len * t_s * f_d); }
};

struct ChannelDraw {
  std::vector<double> path_angles;
  std::vector<std::complex<double>> path_gains;
  std::vector<double> branch_phases;
};

struct ChannelRealization {
  std::vector<std::complex<double>> samples;
  ChannelDraw draw;
};

/// Synthesizes g(n T_s) = zeta sum_q e^{j phi_q} sum_p alpha_p G(x_pq) e^{j omega_d x_pq n T_s}
/// with x_pq = cos(theta_p) - cos(vartheta_q) the residual after per-branch
/// Doppler pre-compensation and G(x) = (1/M) sum_m w_m e^{j 2 pi d m x}.
class ChannelSynthesizer {
 public:
  ChannelSynthesizer(ChannelConfig cfg, const WeightVector& w) : cfg_(std::move(cfg)), w_(w) {
    cfg_.validate();
    if (w.size() != cfg_.array.m_antennas()) throw InvalidArgument("weight length differs from M");
    const int p_count = cfg_.n_paths;
    const auto& region = cfg_.region;
    zeta_ = 1.0 / (std::sqrt(w.norm_sq()) * std::sqrt(static_cast<double>(cfg_.bank.size())));

    if (cfg_.grid != PathGrid::random_theta) {
      angles_.resize(p_count);
      variance_.resize(p_count);
      for (int p = 0; p < p_count; ++p) {
        if (cfg_.grid == PathGrid::uniform_theta) {
          angles_[p] = region.theta_l() + (p + 0.5) * region.width() / p_count;
          variance_[p] = region.width() / p_count;
        } else {
          // Increasing angle = decreasing cosine.
          const double hi = region.cos_l() - p * region.mu() / p_count;
          const double lo = region.cos_l() - (p + 1) * region.mu() / p_count;
          angles_[p] = std::acos(0.5 * (hi + lo));
          variance_[p] = detail::clamped_acos(lo) - detail::clamped_acos(hi);
        }
      }
      build_lattice();
    }
  }

  const ChannelConfig& config() const noexcept { return cfg_; }
  bool uses_lattice() const noexcept { return lattice_; }
  double zeta() const noexcept { return zeta_; }

  ChannelDraw draw(std::uint64_t trial) const {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    const int p_count = cfg_.n_paths;
    ChannelDraw d;
    if (cfg_.grid == PathGrid::random_theta) {
      boost::random::uniform_real_distribution<double> ang(cfg_.region.theta_l(), cfg_.region.theta_r());
      d.path_angles.resize(p_count);
      for (auto& a : d.path_angles) a = ang(rng);
    } else {
      d.path_angles = angles_;
    }
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    d.path_gains.resize(p_count);
    for (int p = 0; p < p_count; ++p) {
      const double var = cfg_.grid == PathGrid::random_theta ? cfg_.region.width() / p_count : variance_[p];
      const double s = std::sqrt(0.5 * var);
      const double re = normal(rng);
      const double im = normal(rng);
      d.path_gains[p] = {s * re, s * im};
    }
    boost::random::uniform_real_distribution<double> phase(0.0, kTwoPi);
    d.branch_phases.resize(cfg_.bank.size());
    for (auto& ph : d.branch_phases) ph = phase(rng);
    return d;
  }

  ChannelRealization realize(std::uint64_t trial) const {
    ChannelRealization r;
    r.draw = draw(trial);
    const Eigen::MatrixXcd g = synthesize({&r.draw, 1});
    r.samples.assign(g.data(), g.data() + g.rows());
    return r;
  }

  /// Samples of consecutive trials [first, first + count) as matrix columns.
  Eigen::MatrixXcd samples(std::uint64_t first, int count) const {
    std::vector<ChannelDraw> draws;
    draws.reserve(count);
    for (int i = 0; i < count; ++i) draws.push_back(draw(first + i));
    return synthesize(draws);
  }

  /// Expected |g|^2 of the discretized model.
  double expected_power() const {
    const auto cq = cfg_.bank.cosines();
    double acc = 0.0;
    if (cfg_.grid == PathGrid::random_theta) {
      // Average over a fine angular grid in place of the random draw.
      const int fine = 4096;
      for (int i = 0; i < fine; ++i) {
        const double c = std::cos(cfg_.region.theta_l() + (i + 0.5) * cfg_.region.width() / fine);
        for (double b : cq) acc += cfg_.region.width() / fine * std::norm(transfer(c - b));
      }
    } else {
      for (std::size_t p = 0; p < angles_.size(); ++p) {
        for (double b : cq) acc += variance_[p] * std::norm(transfer(std::cos(angles_[p]) - b));
      }
    }
    return zeta_ * zeta_ * acc;
  }

  std::complex<double> transfer(double x) const {
    const double step = kTwoPi * cfg_.array.spacing() * x;
    std::complex<double> acc{0.0, 0.0};
    for (int m = 0; m < w_.size(); ++m) acc += std::polar(1.0, step * m) * w_[m];
    return acc / static_cast<double>(w_.size());
  }

 private:
  // Lattice mode: all residuals x_pq equal (mu / P) (j + offset) for integer j.
  void build_lattice() {
    const auto cq = cfg_.bank.cosines();
    const int p_count = cfg_.n_paths;
    const int q_count = static_cast<int>(cq.size());
    lattice_ = false;
    if (cfg_.grid != PathGrid::uniform_cos || p_count % q_count != 0) return;
    const double h = cfg_.region.mu() / p_count;
    const int k = p_count / q_count;
    const double offset = 0.5 * (1 - k);
    std::vector<int> idx(static_cast<std::size_t>(p_count) * q_count);
    int j_min = 0, j_max = 0;
    for (int p = 0; p < p_count; ++p) {
      const double c = std::cos(angles_[p]);
      for (int q = 0; q < q_count; ++q) {
        const double t = (c - cq[q]) / h - offset;
        const double j = std::round(t);
        if (std::abs(t - j) > 1e-6) return;
        const int ji = static_cast<int>(j);
        idx[static_cast<std::size_t>(p) * q_count + q] = ji;
        if (p == 0 && q == 0) j_min = j_max = ji;
        j_min = std::min(j_min, ji);
        j_max = std::max(j_max, ji);
      }
    }
    const int n_tones = j_max - j_min + 1;
    tone_index_.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) tone_index_[i] = idx[i] - j_min;
    tone_gain_.resize(n_tones);
    tones_.resize(cfg_.block_len, n_tones);
    for (int j = 0; j < n_tones; ++j) {
      const double x = h * (j + j_min + offset);
      tone_gain_[j] = transfer(x);
      const double step = cfg_.omega_d() * x * cfg_.t_s;
      for (int n = 0; n < cfg_.block_len; ++n) tones_(n, j) = std::polar(1.0, step * n);
    }
    lattice_ = true;
  }

  Eigen::MatrixXcd synthesize(std::span<const ChannelDraw> draws) const {
    const int count = static_cast<int>(draws.size());
    const int n_len = cfg_.block_len;
    const auto cq = cfg_.bank.cosines();
    const int q_count = static_cast<int>(cq.size());
    if (lattice_) {
      Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(tones_.cols(), count);
      for (int t = 0; t < count; ++t) {
        const auto& d = draws[t];
        std::vector<std::complex<double>> branch(q_count);
        for (int q = 0; q < q_count; ++q) branch[q] = std::polar(1.0, d.branch_phases[q]);
        for (int p = 0; p < cfg_.n_paths; ++p) {
          for (int q = 0; q < q_count; ++q) {
            amp(tone_index_[static_cast<std::size_t>(p) * q_count + q], t) += branch[q] * d.path_gains[p];
          }
        }
        amp.col(t) = amp.col(t).cwiseProduct(tone_gain_) * zeta_;
      }
      return tones_ * amp;
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_len, count);
    for (int t = 0; t < count; ++t) {
      const auto& d = draws[t];
      for (int p = 0; p < cfg_.n_paths; ++p) {
        const double c = std::cos(d.path_angles[p]);
        for (int q = 0; q < q_count; ++q) {
          const double x = c - cq[q];
          const std::complex<double> coef =
              zeta_ * std::polar(1.0, d.branch_phases[q]) * d.path_gains[p] * transfer(x);
          const double step = cfg_.omega_d() * x * cfg_.t_s;
          for (int n = 0; n < n_len; ++n) out(n, t) += coef * std::polar(1.0, step * n);
        }
      }
    }
    return out;
  }

  ChannelConfig cfg_;
  WeightVector w_;
  double zeta_ = 1.0;
  std::vector<double> angles_;
  std::vector<double> variance_;
  bool lattice_ = false;
  std::vector<int> tone_index_;
  Eigen::VectorXcd tone_gain_;
  Eigen::MatrixXcd tones_;
};

inline ChannelRealization generate_channel(const ChannelConfig& cfg, const WeightVector& w,
                                           std::uint64_t trial) {
  return ChannelSynthesizer(cfg, w).realize(trial);
}

/// Running sum of rectangular-window periodograms |FFT(g)|^2 T_s / N.
class PeriodogramAccumulator {
 public:
  explicit PeriodogramAccumulator(int block_len, double t_s)
      : n_(block_len), t_s_(t_s), sum_(static_cast<std::size_t>(block_len), 0.0) {}

  void add(std::span<const std::complex<double>> g) {
    if (static_cast<int>(g.size()) != n_) throw InvalidArgument("block length mismatch");
    std::vector<std::complex<double>> in(g.begin(), g.end()), out;
    fft_.fwd(out, in);
    for (int k = 0; k < n_; ++k) sum_[k] += std::norm(out[k]) * t_s_ / n_;
    for (const auto& v : g) power_ += std::norm(v);
    ++count_;
  }

  /// Adds another accumulator's totals; callers merge in a fixed order.
  void merge(const PeriodogramAccumulator& other) {
    if (other.n_ != n_) throw InvalidArgument("block length mismatch");
    for (int k = 0; k < n_; ++k) sum_[k] += other.sum_[k];
    power_ += other.power_;
    count_ += other.count_;
  }

  int block_len() const noexcept { return n_; }
  long long count() const noexcept { return count_; }
  /// Average of |g(n T_s)|^2 over all samples seen.
  double mean_power() const { return count_ ? power_ / (static_cast<double>(count_) * n_) : 0.0; }
  /// Raw bin sums in FFT order (bin k at frequency k / (N T_s), wrapped).
  const std::vector<double>& bins() const noexcept { return sum_; }

 private:
  int n_;
  double t_s_;
  std::vector<double> sum_;
  double power_ = 0.0;
  long long count_ = 0;
  Eigen::FFT<double> fft_;
};

namespace detail {

// Normalized-Doppler value of the bin at sorted position i (ascending).
inline double bin_omega_tilde(int i, const ChannelConfig& cfg) {
  return (i - cfg.block_len / 2) * cfg.bin_width();
}

inline void normalize_unit_mass(std::vector<SpectrumSample>& s, double bin) {
  double mass = 0.0;
  for (const auto& v : s) mass += v.value * bin;
  if (!(mass > 0.0)) throw DegenerateBeam("spectrum has zero total power");
  for (auto& v : s) v.value /= mass;
}

}  // namespace detail

/// Averaged periodogram on ascending normalized-Doppler bins, scaled to unit
/// total power (sum of value * bin width = 1).
inline std::vector<SpectrumSample> empirical_psd(const PeriodogramAccumulator& acc, const ChannelConfig& cfg) {
  if (acc.count() == 0) throw InvalidArgument("no realizations accumulated");
  if (acc.block_len() != cfg.block_len) throw InvalidArgument("block length mismatch");
  const int n = cfg.block_len;
  std::vector<SpectrumSample> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int k = ((i - n / 2) % n + n) % n;
    out[i] = {detail::bin_omega_tilde(i, cfg), acc.bins()[k]};
  }
  detail::normalize_unit_mass(out, cfg.bin_width());
  return out;
}

inline std::vector<SpectrumSample> empirical_psd(std::span<const ChannelRealization> realizations,
                                                 const ChannelConfig& cfg) {
  if (realizations.empty()) throw InvalidArgument("empirical_psd needs at least one realization");
  PeriodogramAccumulator acc(cfg.block_len, cfg.t_s);
  for (const auto& r : realizations) acc.add(r.samples);
  return empirical_psd(acc, cfg);
}

/// Analytic PSD on the periodogram grid, unit total power. The synthesized
/// tone at residual x carries |G(x)|^2 = beam(-x), so the simulated spectrum
/// is the analytic PSD reflected about zero Doppler.
inline std::vector<SpectrumSample> analytic_psd_grid(const WeightVector& w, const ChannelConfig& cfg) {
  const int n = cfg.block_len;
  std::vector<SpectrumSample> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = detail::bin_omega_tilde(i, cfg);
    out[i] = {x, psd(w, -x * cfg.omega_d(), cfg.region, cfg.array, cfg.f_d)};
  }
  detail::normalize_unit_mass(out, cfg.bin_width());
  return out;
}

/// sum |a - b| / sum |b| over a shared grid.
inline double l1_distance(std::span<const SpectrumSample> a, std::span<const SpectrumSample> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("spectra must share a nonempty grid");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::abs(a[i].value - b[i].value);
    den += std::abs(b[i].value);
  }
  if (!(den > 0.0)) throw DegenerateBeam("reference spectrum is zero");
  return num / den;
}

/// omega_d * sqrt(sum x^2 P / sum P): uncentered RMS Doppler in rad/s.
inline double empirical_doppler_spread(std::span<const SpectrumSample> s, double f_d) {
  if (s.empty()) throw InvalidArgument("empty spectrum");
  double m0 = 0.0, m2 = 0.0;
  for (const auto& v : s) {
    if (!(v.value >= 0.0)) throw InvalidArgument("spectrum has negative or NaN samples");
    m0 += v.value;
    m2 += v.omega_tilde * v.omega_tilde * v.value;
  }
  if (!(m0 > 0.0)) throw DegenerateBeam("all-zero spectrum has no Doppler spread");
  return kTwoPi * f_d * std::sqrt(m2 / m0);
}

struct SimulationResult {
  std::vector<SpectrumSample> psd;
  /// Mean |g|^2 over the first and second halves of the trials.
  double mean_power_first_half;
  double mean_power_second_half;
  double expected_power;
  long long realizations;
};

struct SimulationOptions {
  int batch = 64;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Streams cfg.n_realizations trials through the periodogram in fixed
/// batches. Batches may run on several threads; their totals are merged in
/// trial order so the result does not depend on scheduling.
inline SimulationResult simulate_psd(const ChannelConfig& cfg, const WeightVector& w,
                                     const SimulationOptions& opts = {}) {
  const ChannelSynthesizer syn(cfg, w);
  const int batch = std::max(1, opts.batch);
  const long long total = cfg.n_realizations;
  const long long half = (total + 1) / 2;
  // Batches never straddle the half boundary.
  std::vector<std::pair<long long, int>> jobs;
  for (long long start : {0LL, half}) {
    const long long end = start == 0 ? half : total;
    for (long long s = start; s < end; s += batch) jobs.push_back({s, static_cast<int>(std::min<long long>(batch, end - s))});
  }
  std::vector<std::optional<PeriodogramAccumulator>> parts(jobs.size());
  auto run = [&](std::size_t i) {
    PeriodogramAccumulator acc(cfg.block_len, cfg.t_s);
    const Eigen::MatrixXcd g = syn.samples(static_cast<std::uint64_t>(jobs[i].first), jobs[i].second);
    for (Eigen::Index c = 0; c < g.cols(); ++c) acc.add({g.col(c).data(), static_cast<std::size_t>(g.rows())});
    parts[i] = std::move(acc);
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < jobs.size(); i += threads) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  PeriodogramAccumulator first(cfg.block_len, cfg.t_s), second(cfg.block_len, cfg.t_s);
  for (std::size_t i = 0; i < jobs.size(); ++i) (jobs[i].first < half ? first : second).merge(*parts[i]);
  SimulationResult res{{}, first.mean_power(), second.mean_power(), syn.expected_power(), total};
  first.merge(second);
  res.psd = empirical_psd(first, cfg);
  return res;
}

/// Expected |g|^2 in the limit of many branches and paths:
/// (theta_R - theta_L) / (2 pi M^2) * w^H C0 w / w^H w.
inline double analytic_channel_power(const WeightVector& w, const MomentMatrices& mm) {
  const double m = mm.size();
  return mm.region.width() / (kTwoPi * m * m) * quadratic_form(mm.c0(), w.values()) / w.norm_sq();
}

}  // namespace dsopt
