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
#include <sstream>

#include <gtest/gtest.h>

#include "dsopt/moments.hpp"
#include "oracles.hpp"

using namespace dsopt;

namespace {

AngleRegion random_region(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 3.09);
  while (true) {
    const double a = u(rng), b = u(rng);
    if (std::abs(a - b) > 0.02) return AngleRegion(std::min(a, b), std::max(a, b));
  }
}

}  // namespace

TEST(LagIntegral, ZeroLagZeroPowerIsTwoPi) {
  for (auto r : {AngleRegion::from_degrees(85, 95), AngleRegion::from_degrees(30, 60),
                 AngleRegion::from_degrees(1, 179)}) {
    EXPECT_NEAR(lag_integral(0, 0, r, ArrayConfig(8, 0.45)).real(), kTwoPi, 1e-10);
  }
}

TEST(LagIntegral, SymmetricRegionGivesRealValues) {
  const auto r = AngleRegion::centered(deg_to_rad(90), deg_to_rad(30));
  const ArrayConfig arr(16, 0.45);
  for (int k = -15; k <= 15; ++k) {
    EXPECT_NEAR(lag_integral(k, 0, r, arr).imag(), 0.0, 1e-12);
    EXPECT_NEAR(lag_integral(k, 2, r, arr).imag(), 0.0, 1e-12);
  }
}

TEST(LagIntegral, SecondMomentAtZeroLagMatchesOracle) {
  const auto r = AngleRegion::from_degrees(85, 95);
  const auto v = lag_integral(0, 2, r, ArrayConfig(4, 0.45));
  const auto ref = oracle::lag_integral(0, 2, r.theta_l(), r.theta_r(), 0.45);
  EXPECT_GT(v.real(), 0.0);
  EXPECT_LT(v.real(), r.mu() * r.mu() * kTwoPi);
  EXPECT_NEAR(v.real(), ref.real(), 1e-12 * ref.real() + 1e-15);
}

TEST(LagIntegral, MatchesIndependentQuadratureAcrossLags) {
  const auto r = AngleRegion::from_degrees(32, 77);
  const ArrayConfig arr(12, 0.45);
  for (int k = -11; k <= 11; k += 2) {
    for (int p : {0, 2}) {
      const auto v = lag_integral(k, p, r, arr);
      const auto ref = oracle::lag_integral(k, p, r.theta_l(), r.theta_r(), 0.45);
      EXPECT_NEAR(std::abs(v - ref), 0.0, 1e-10) << "lag " << k << " p " << p;
    }
  }
}

TEST(LagIntegral, ConjugateSymmetryAndArgumentChecks) {
  const auto r = AngleRegion::from_degrees(40, 65);
  const ArrayConfig arr(6, 0.45);
  for (int k = 1; k < 6; ++k) {
    EXPECT_EQ(lag_integral(-k, 2, r, arr), std::conj(lag_integral(k, 2, r, arr)));
  }
  EXPECT_THROW(lag_integral(0, 1, r, arr), InvalidArgument);
  EXPECT_THROW(lag_integral(6, 0, r, arr), InvalidArgument);
  EXPECT_THROW(lag_integral(-6, 0, r, arr), InvalidArgument);
}

TEST(LagIntegral, NonConvergenceReportsBothEstimates) {
  QuadratureOptions opts;
  opts.min_nodes = 20;
  opts.max_nodes = 40;
  opts.tol = 1e-16;
  try {
    lag_integral(63, 2, AngleRegion::from_degrees(10, 170), ArrayConfig(64, 3.0), opts);
    FAIL() << "expected QuadratureFailure";
  } catch (const QuadratureFailure& e) {
    EXPECT_TRUE(std::isfinite(e.coarse()));
    EXPECT_TRUE(std::isfinite(e.fine()));
  }
}

TEST(BuildMoments, ScalarArray) {
  const auto r = AngleRegion::from_degrees(85, 95);
  const auto mm = build_moments(r, ArrayConfig(1, 0.45));
  ASSERT_EQ(mm.size(), 1);
  EXPECT_NEAR(mm.c0()(0, 0).real(), kTwoPi, 1e-10);
  EXPECT_NEAR(mm.c2()(0, 0).real(), lag_integral(0, 2, r, ArrayConfig(1, 0.45)).real(), 1e-16);
  EXPECT_NEAR(mm.lambda_max_c0(), kTwoPi, 1e-10);
}

TEST(BuildMoments, HermitianToeplitzStructureIsExact) {
  const auto mm = build_moments(AngleRegion::from_degrees(85, 95), ArrayConfig(64, 0.45));
  ASSERT_EQ(mm.size(), 64);
  for (const auto* c : {&mm.c0(), &mm.c2()}) {
    for (int i = 0; i < 64; ++i) {
      EXPECT_EQ((*c)(i, i).imag(), 0.0);
      for (int j = 0; j < 64; ++j) {
        EXPECT_EQ((*c)(i, j), std::conj((*c)(j, i)));
        if (i + 1 < 64 && j + 1 < 64) {
          EXPECT_EQ((*c)(i, j), (*c)(i + 1, j + 1));
        }
      }
    }
  }
}

TEST(BuildMoments, QuotientBoundedBySupportSquared) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 5; ++t) {
    const auto r = random_region(rng);
    const auto mm = build_moments(r, ArrayConfig(10, 0.45));
    for (int k = 0; k < 200; ++k) {
      Eigen::VectorXcd v(10);
      for (auto& x : v) x = {g(rng), g(rng)};
      const double q0 = v.dot(mm.c0() * v).real(), q2 = v.dot(mm.c2() * v).real();
      EXPECT_GE(q2, -1e-12 * q0);
      EXPECT_LE(q2, r.mu() * r.mu() * q0 * (1 + 1e-10));
    }
  }
}

TEST(BuildMoments, LambdaMaxBoundedByTrace) {
  const auto mm = build_moments(AngleRegion::from_degrees(60, 120), ArrayConfig(20, 0.45));
  EXPECT_LE(mm.lambda_max_c0(), kTwoPi * 20 * (1 + 1e-12));
  EXPECT_NEAR(mm.lambda_max_c0(), largest_eigenvalue(mm.c0()), 1e-10 * mm.lambda_max_c0());
}

TEST(BuildMoments, PrincipalSubmatrixRecomputesLambda) {
  const auto mm = build_moments(AngleRegion::from_degrees(30, 60), ArrayConfig(8, 0.45));
  const std::vector<int> idx{0, 3, 5};
  const auto sub = mm.pencil.principal(idx);
  ASSERT_EQ(sub.size(), 3);
  EXPECT_EQ(sub.c0(1, 2), mm.c0()(3, 5));
  EXPECT_EQ(sub.c2(2, 0), mm.c2()(5, 0));
  EXPECT_NEAR(sub.lambda_max_c0, largest_eigenvalue(sub.c0), 1e-12 * sub.lambda_max_c0);
  EXPECT_THROW(mm.pencil.principal(std::vector<int>{}), InvalidArgument);
}

TEST(MatrixIo, RoundTripIsExact) {
  const auto mm = build_moments(AngleRegion::from_degrees(30, 60), ArrayConfig(5, 0.45));
  std::stringstream ss;
  ss << "# comment line\n";
  write_matrix(ss, mm.c2());
  const auto back = read_matrix(ss);
  ASSERT_EQ(back.rows(), 5);
  EXPECT_EQ((back - mm.c2()).cwiseAbs().maxCoeff(), 0.0);
}
