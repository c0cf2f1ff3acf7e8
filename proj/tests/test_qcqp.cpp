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

#include "dsopt/qcqp.hpp"
#include "oracles.hpp"

using namespace dsopt;

namespace {

Eigen::MatrixXcd random_psd(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd b(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = {g(rng), g(rng)};
  return b * b.adjoint();
}

Eigen::VectorXcd random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

}  // namespace

TEST(Qcqp, NonPositiveOffsetGivesZero) {
  std::mt19937_64 rng(1);
  const auto c = random_psd(4, 4, rng);
  const auto sol = qcqp_subproblem(c, 1.0, random_vec(4, rng), -0.5);
  EXPECT_EQ(sol.w.norm(), 0.0);
  EXPECT_EQ(sol.objective, 0.0);
}

TEST(Qcqp, InfeasibleWhenHalfspaceMissesBall) {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::VectorXcd a(2);
  a << 1.0, 0.0;
  // Closest halfspace point has norm r / (2 |a|) = 2 > 1.
  EXPECT_THROW(qcqp_subproblem(c, 1.0, a, 4.0), Infeasible);
  EXPECT_THROW(qcqp_subproblem(c, 1.0, Eigen::VectorXcd::Zero(2), 1.0), Infeasible);
  EXPECT_THROW(qcqp_subproblem(c, 0.0, a, 1.0), InvalidArgument);
  EXPECT_THROW(qcqp_subproblem(c, 1.0, Eigen::VectorXcd::Ones(3), 1.0), InvalidArgument);
}

TEST(Qcqp, ScalarClosedForm) {
  Eigen::MatrixXcd c(1, 1);
  c << 3.0;
  Eigen::VectorXcd a(1);
  a << std::complex<double>(0.0, 2.0);
  // Minimum-norm halfspace point w = r a / (2 |a|^2) fits the ball.
  const auto sol = qcqp_subproblem(c, 1.0, a, 1.0);
  EXPECT_NEAR(std::abs(sol.w[0] - std::complex<double>(0.0, 0.25)), 0.0, 1e-14);
  EXPECT_NEAR(sol.objective, 3.0 / 16.0, 1e-14);
}

TEST(Qcqp, SlackBallHasZeroMultiplier) {
  std::mt19937_64 rng(2);
  const auto c = random_psd(5, 5, rng);
  const auto a = random_vec(5, rng);
  const auto sol = qcqp_subproblem(c, 1e6, a, 1.0);
  EXPECT_EQ(sol.ball_multiplier, 0.0);
  EXPECT_LT(sol.w.squaredNorm(), 1e6);
  EXPECT_LT(sol.kkt.stationarity, 1e-10 * (1 + sol.halfspace_multiplier * a.norm()));
  EXPECT_NEAR(2.0 * a.dot(sol.w).real(), 1.0, 1e-12);
}

TEST(Qcqp, KktCertificateOnRandomInstances) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 7;
    const auto c = random_psd(n, 1 + t % n, rng);
    const auto a = random_vec(n, rng);
    const double r = 0.1 + u(rng);
    const double min_sq = r * r / (4 * a.squaredNorm());
    const double radius_sq = min_sq * (1.0 + 10.0 * u(rng));
    const auto sol = qcqp_subproblem(c, radius_sq, a, r);
    const double scale = c.norm() * sol.w.norm() + sol.halfspace_multiplier * a.norm();
    EXPECT_LE(sol.kkt.stationarity, 1e-8 * scale) << t;
    EXPECT_LE(sol.kkt.ball_violation, 1e-10 * radius_sq) << t;
    EXPECT_LE(sol.kkt.halfspace_violation, 1e-10 * r) << t;
    EXPECT_LE(sol.kkt.ball_complementarity, 1e-8 * sol.ball_multiplier * radius_sq + 1e-14) << t;
    EXPECT_LE(sol.kkt.halfspace_complementarity, 1e-8 * sol.halfspace_multiplier * r + 1e-14) << t;
    EXPECT_GE(sol.kkt.min_multiplier, 0.0) << t;
  }
}

TEST(Qcqp, MatchesProjectedGradientOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 12; ++t) {
    const int n = 2 + t % 4;
    const Eigen::MatrixXcd c = random_psd(n, n, rng) + 0.05 * Eigen::MatrixXcd::Identity(n, n);
    const auto a = random_vec(n, rng);
    const double r = 1.0;
    const double radius_sq = r * r / (4 * a.squaredNorm()) * (1.2 + 3.0 * u(rng));
    const auto sol = BallHalfspaceQcqp(c).solve(radius_sq, a, r);
    const double ref = oracle::qcqp_fista(c, radius_sq, a, r, 40000);
    EXPECT_LE(sol.objective, ref * (1 + 1e-9) + 1e-14) << t;
    EXPECT_NEAR(sol.objective, ref, 1e-6 * ref) << t;
  }
}

TEST(Qcqp, TangentBallReturnsMinimumNormPoint) {
  std::mt19937_64 rng(5);
  const auto c = random_psd(4, 4, rng);
  const auto a = random_vec(4, rng);
  const double r = 2.0;
  const double radius_sq = r * r / (4 * a.squaredNorm());
  const auto sol = qcqp_subproblem(c, radius_sq, a, r);
  const Eigen::VectorXcd expect = a * (r / (2 * a.squaredNorm()));
  EXPECT_LT((sol.w - expect).norm(), 1e-6 * expect.norm());
}
