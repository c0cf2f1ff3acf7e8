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

#include <cmath>

#include <gtest/gtest.h>

#include "dsopt/simulator.hpp"
#include "dsopt/solvers.hpp"

using namespace dsopt;

namespace {

ChannelConfig make_config(int m, double tl, double tr, int q, int paths, int block, int trials,
                          PathGrid grid = PathGrid::uniform_cos) {
  const auto region = AngleRegion::from_degrees(tl, tr);
  return ChannelConfig{region, ArrayConfig(m, 0.45), equicos_directions(region, q), 5000.0, 5e-4,
                       block, paths, trials, 7, grid};
}

WeightVector ramp(int m) {
  Eigen::VectorXcd v(m);
  for (int i = 0; i < m; ++i) v[i] = std::polar(1.0 + 0.1 * i, 0.3 * i);
  return WeightVector(v);
}

}  // namespace

TEST(ChannelConfig, Validation) {
  auto cfg = make_config(4, 80, 100, 2, 8, 64, 1);
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.f_d = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.t_s = -1.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.block_len = 1;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.n_paths = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  EXPECT_THROW(ChannelSynthesizer(cfg, WeightVector::uniform(5)), InvalidArgument);
}

TEST(Channel, SinglePathOnBeamDirectionIsConstant) {
  const auto cfg = make_config(8, 70, 110, 1, 1, 256, 1);
  const auto r = generate_channel(cfg, ramp(8), 3);
  ASSERT_EQ(r.samples.size(), 256u);
  for (const auto& g : r.samples) EXPECT_LT(std::abs(g - r.samples.front()), 1e-14 * std::abs(r.samples.front()));
}

TEST(Channel, DeterministicPerTrial) {
  const auto cfg = make_config(6, 60, 90, 3, 24, 64, 1);
  const ChannelSynthesizer syn(cfg, ramp(6));
  const auto a = syn.realize(5), b = syn.realize(5), c = syn.realize(6);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  const Eigen::MatrixXcd block = syn.samples(4, 3);
  for (int n = 0; n < 64; ++n) EXPECT_LT(std::abs(block(n, 1) - a.samples[n]), 1e-13);
}

TEST(Channel, SynthesisMatchesDirectSum) {
  for (auto grid : {PathGrid::uniform_cos, PathGrid::uniform_theta, PathGrid::random_theta}) {
    const auto cfg = make_config(5, 40, 75, 4, 16, 32, 1, grid);
    const ChannelSynthesizer syn(cfg, ramp(5));
    const auto r = syn.realize(11);
    const auto cq = cfg.bank.cosines();
    for (int n = 0; n < 32; n += 5) {
      std::complex<double> g{0.0, 0.0};
      for (std::size_t q = 0; q < cq.size(); ++q) {
        std::complex<double> branch{0.0, 0.0};
        for (int p = 0; p < cfg.n_paths; ++p) {
          const double x = std::cos(r.draw.path_angles[p]) - cq[q];
          branch += r.draw.path_gains[p] * syn.transfer(x) * std::polar(1.0, cfg.omega_d() * x * n * cfg.t_s);
        }
        g += std::polar(1.0, r.draw.branch_phases[q]) * branch;
      }
      g *= syn.zeta();
      EXPECT_LT(std::abs(g - r.samples[n]), 1e-12 * (1 + std::abs(g))) << to_string(grid) << " n=" << n;
    }
  }
}

TEST(Channel, LatticeUsedWhenPathsAreMultipleOfBeams) {
  EXPECT_TRUE(ChannelSynthesizer(make_config(4, 80, 100, 4, 32, 64, 1), ramp(4)).uses_lattice());
  EXPECT_FALSE(ChannelSynthesizer(make_config(4, 80, 100, 4, 32, 64, 1, PathGrid::random_theta), ramp(4))
                   .uses_lattice());
}

TEST(Channel, ExpectedPowerApproachesAnalytic) {
  const auto cfg = make_config(16, 80, 100, 16, 1024, 64, 1);
  const auto mm = build_moments(cfg.region, cfg.array);
  for (const auto& w : {WeightVector::uniform(16), ramp(16), min_ds_weights(mm).weights}) {
    const double e = ChannelSynthesizer(cfg, w).expected_power();
    const double a = analytic_channel_power(w, mm);
    EXPECT_NEAR(e, a, 0.02 * a);
  }
}

TEST(Periodogram, ParsevalAndSingleTone) {
  const int n = 128;
  const double ts = 1e-3;
  PeriodogramAccumulator acc(n, ts);
  std::vector<std::complex<double>> g(n);
  for (int k = 0; k < n; ++k) g[k] = std::polar(2.0, kTwoPi * 5 * k / n);
  acc.add(g);
  double mass = 0.0;
  for (double b : acc.bins()) mass += b / (n * ts);
  EXPECT_NEAR(mass, 4.0, 1e-12);
  EXPECT_NEAR(acc.mean_power(), 4.0, 1e-12);
  EXPECT_NEAR(acc.bins()[5] / (n * ts), 4.0, 1e-12);
  EXPECT_THROW(acc.add(std::vector<std::complex<double>>(n + 1)), InvalidArgument);

  PeriodogramAccumulator other(n, ts);
  other.add(g);
  acc.merge(other);
  EXPECT_EQ(acc.count(), 2);
  EXPECT_NEAR(acc.mean_power(), 4.0, 1e-12);
}

TEST(Spectrum, UnitMassAndDistances) {
  const auto cfg = make_config(8, 80, 100, 8, 64, 256, 1);
  const auto an = analytic_psd_grid(ramp(8), cfg);
  double mass = 0.0;
  for (const auto& s : an) mass += s.value * cfg.bin_width();
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(l1_distance(an, an), 0.0);
  EXPECT_THROW(l1_distance(an, std::vector<SpectrumSample>(3)), InvalidArgument);

  const std::vector<SpectrumSample> two{{-0.1, 1.0}, {0.0, 0.0}, {0.1, 1.0}};
  EXPECT_NEAR(empirical_doppler_spread(two, 10.0), kTwoPi * 10.0 * 0.1, 1e-12);
  EXPECT_THROW(empirical_doppler_spread(std::vector<SpectrumSample>{{0.0, -1.0}}, 1.0), InvalidArgument);
}

TEST(Simulation, IndependentOfThreadCount) {
  const auto cfg = make_config(8, 80, 100, 8, 64, 128, 40);
  SimulationOptions one, three;
  one.threads = 1;
  three.threads = 3;
  three.batch = 7;
  one.batch = 7;
  const auto a = simulate_psd(cfg, ramp(8), one);
  const auto b = simulate_psd(cfg, ramp(8), three);
  ASSERT_EQ(a.psd.size(), b.psd.size());
  for (std::size_t i = 0; i < a.psd.size(); ++i) EXPECT_EQ(a.psd[i].value, b.psd[i].value);
  EXPECT_EQ(a.mean_power_first_half, b.mean_power_first_half);
  EXPECT_EQ(a.realizations, 40);
}

TEST(Simulation, ShortRunTracksAnalyticSpectrum) {
  auto cfg = make_config(16, 80, 100, 16, 512, 512, 800);
  cfg.t_s = 5e-4;
  const auto w = ramp(16);
  const auto res = simulate_psd(cfg, w);
  const auto an = analytic_psd_grid(w, cfg);
  EXPECT_LT(l1_distance(res.psd, an), 0.15);
  const auto mm = build_moments(cfg.region, cfg.array);
  const double ratio = empirical_doppler_spread(res.psd, cfg.f_d) / doppler_spread(w, mm, cfg.f_d);
  EXPECT_NEAR(ratio, 1.0, 0.1);
  const double power = 0.5 * (res.mean_power_first_half + res.mean_power_second_half);
  EXPECT_NEAR(power, res.expected_power, 0.1 * res.expected_power);
}
