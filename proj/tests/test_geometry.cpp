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
#include <random>

#include <gtest/gtest.h>

#include "dsopt/geometry.hpp"
#include "oracles.hpp"

using namespace dsopt;

TEST(SteeringVector, BroadsideIsAllOnes) {
  const auto a = steering_vector(0.0, ArrayConfig(4, 0.45));
  for (int m = 0; m < 4; ++m) EXPECT_EQ(a[m], std::complex<double>(1.0, 0.0));
}

TEST(SteeringVector, HalfWavelengthEndfire) {
  const auto a = steering_vector(1.0, ArrayConfig(2, 0.5));
  EXPECT_EQ(a[0], std::complex<double>(1.0, 0.0));
  EXPECT_NEAR(a[1].real(), -1.0, 1e-15);
  EXPECT_NEAR(a[1].imag(), 0.0, 1e-15);
}

TEST(SteeringVector, PhaseProgression) {
  const auto a = steering_vector(std::cos(deg_to_rad(60.0)), ArrayConfig(3, 0.45));
  const double expect[] = {0.0, 0.45 * kPi, 0.9 * kPi};
  for (int m = 0; m < 3; ++m) {
    EXPECT_NEAR(std::abs(a[m]), 1.0, 1e-15);
    EXPECT_NEAR(std::arg(a[m]), expect[m], 1e-12);
  }
}

TEST(SteeringVector, NegatedArgumentIsConjugate) {
  const ArrayConfig arr(7, 0.37);
  const auto p = steering_vector(0.31, arr), n = steering_vector(-0.31, arr);
  for (int m = 0; m < 7; ++m) EXPECT_NEAR(std::abs(p[m] - std::conj(n[m])), 0.0, 1e-14);
}

TEST(AngleRegion, RejectsInvalidBounds) {
  EXPECT_THROW(AngleRegion(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(AngleRegion(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(AngleRegion(1.2, 1.0), InvalidArgument);
  EXPECT_THROW(AngleRegion(1.0, kPi), InvalidArgument);
  EXPECT_NO_THROW(AngleRegion::from_degrees(85, 95));
}

TEST(AngleRegion, DerivedQuantities) {
  const auto r = AngleRegion::from_degrees(85, 95);
  EXPECT_NEAR(r.mu(), 0.17431, 1e-5);
  EXPECT_NEAR(r.width(), deg_to_rad(10), 1e-15);
  const auto c = AngleRegion::centered(deg_to_rad(90), deg_to_rad(10));
  EXPECT_NEAR(c.theta_l(), r.theta_l(), 1e-15);
  EXPECT_NEAR(c.theta_r(), r.theta_r(), 1e-15);
}

TEST(ArrayConfig, RejectsInvalid) {
  EXPECT_THROW(ArrayConfig(0, 0.5), InvalidArgument);
  EXPECT_THROW(ArrayConfig(4, 0.0), InvalidArgument);
  EXPECT_THROW(ArrayConfig(4, -1.0), InvalidArgument);
}

TEST(EquiCos, SingleBeamAtSymmetricCenter) {
  const auto b = equicos_directions(AngleRegion::from_degrees(85, 95), 1);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NEAR(b.cosines()[0], 0.0, 1e-15);
  EXPECT_NEAR(b.directions()[0], deg_to_rad(90), 1e-14);
}

TEST(EquiCos, TwoBeamMidpoints) {
  const auto b = equicos_directions(AngleRegion::from_degrees(60, 90), 2);
  auto c = b.cosines();
  std::sort(c.begin(), c.end());
  EXPECT_NEAR(c[0], 0.125, 1e-14);
  EXPECT_NEAR(c[1], 0.375, 1e-14);
}

TEST(EquiCos, EqualCosineSpacingInsideRegion) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    double a = u(rng), b = u(rng);
    if (std::abs(a - b) < 1e-3) continue;
    const AngleRegion r(std::min(a, b), std::max(a, b));
    const int q = 1 + trial % 70;
    const auto bank = equicos_directions(r, q);
    ASSERT_EQ(bank.size(), static_cast<std::size_t>(q));
    const auto c = bank.cosines();
    for (int i = 0; i < q; ++i) {
      EXPECT_TRUE(r.contains(bank.directions()[i]));
      if (i > 0) {
        EXPECT_GT(bank.directions()[i], bank.directions()[i - 1]);
        EXPECT_NEAR(c[i - 1] - c[i], r.mu() / q, 1e-12);
      }
    }
  }
  EXPECT_THROW(equicos_directions(AngleRegion::from_degrees(85, 95), 0), InvalidArgument);
}

TEST(DirectionBank, RejectsUnorderedOrOutside) {
  const auto r = AngleRegion::from_degrees(80, 100);
  EXPECT_THROW(DirectionBank(r, {deg_to_rad(90), deg_to_rad(85)}), InvalidArgument);
  EXPECT_THROW(DirectionBank(r, {deg_to_rad(79)}), InvalidArgument);
  EXPECT_THROW(DirectionBank(r, {}), InvalidArgument);
}

TEST(Window, PointValues) {
  const auto r = AngleRegion::from_degrees(30, 70);
  EXPECT_NEAR(window(0.0, r), kTwoPi / r.mu(), 1e-12);
  EXPECT_NEAR(window(r.mu(), r), 0.0, 1e-6);
  EXPECT_NEAR(window(-r.mu(), r), 0.0, 1e-6);
  EXPECT_EQ(window(1.01 * r.mu(), r), 0.0);
  EXPECT_EQ(window(-1.01 * r.mu(), r), 0.0);
  EXPECT_NEAR(window(-1e-12, r), window(1e-12, r), 1e-6);
}

TEST(Window, SymmetricRegionGivesEvenWindow) {
  const auto r = AngleRegion::centered(deg_to_rad(90), deg_to_rad(24));
  for (int i = 0; i <= 100; ++i) {
    const double x = r.mu() * i / 100.0;
    EXPECT_NEAR(window(x, r), window(-x, r), 1e-10);
  }
}

TEST(Window, NonNegativeAndMatchesDirectFormula) {
  const auto r = AngleRegion::from_degrees(20, 110);
  for (int i = -120; i <= 120; ++i) {
    const double x = r.mu() * i / 100.0;
    EXPECT_GE(window(x, r), 0.0);
    EXPECT_NEAR(window(x, r), oracle::window(x, r.theta_l(), r.theta_r()), 1e-12);
  }
}

TEST(Window, IntegratesToTwoPi) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 3.05);
  for (int trial = 0; trial < 20; ++trial) {
    double a = u(rng), b = u(rng);
    if (std::abs(a - b) < 1e-2) continue;
    const AngleRegion r(std::min(a, b), std::max(a, b));
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double x) { return window(x, r); };
    EXPECT_NEAR(ts.integrate(f, -r.mu(), 0.0) + ts.integrate(f, 0.0, r.mu()), kTwoPi, 1e-9);
  }
}
