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
#include <cstdint>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "errors.hpp"

namespace dsopt {

/// KKT residuals of min w^H C w s.t. w^H w <= R^2, 2 Re(a^H w) >= r with
/// Lagrangian w^H C w + l1 (w^H w - R^2) - l2 (2 Re(a^H w) - r).
struct KktResiduals {
  double stationarity = 0.0;               // ||C w + l1 w - l2 a||
  double ball_violation = 0.0;             // max(0, w^H w - R^2)
  double halfspace_violation = 0.0;        // max(0, r - 2 Re(a^H w))
  double ball_complementarity = 0.0;       // |l1 (R^2 - w^H w)|
  double halfspace_complementarity = 0.0;  // |l2 (2 Re(a^H w) - r)|
  double min_multiplier = 0.0;             // min(l1, l2), must be >= 0
};

struct QcqpSolution {
  Eigen::VectorXcd w;
  double ball_multiplier = 0.0;
  double halfspace_multiplier = 0.0;
  double objective = 0.0;
  KktResiduals kkt;
};

inline KktResiduals kkt_residuals(const Eigen::MatrixXcd& c, double ball_radius_sq,
                                  const Eigen::VectorXcd& a, double r, const Eigen::VectorXcd& w,
                                  double l1, double l2) {
  KktResiduals k;
  k.stationarity = (c * w + l1 * w - l2 * a).norm();
  const double nsq = w.squaredNorm();
  const double lin = 2.0 * a.dot(w).real();
  k.ball_violation = std::max(0.0, nsq - ball_radius_sq);
  k.halfspace_violation = std::max(0.0, r - lin);
  k.ball_complementarity = std::abs(l1 * (ball_radius_sq - nsq));
  k.halfspace_complementarity = std::abs(l2 * (lin - r));
  k.min_multiplier = std::min(l1, l2);
  return k;
}

/// Minimizes w^H C w over the intersection of the ball w^H w <= R^2 and the
/// halfspace 2 Re(a^H w) >= r, for Hermitian PSD C. The eigendecomposition of
/// C is computed once, so repeated solves with new (R, a, r) are cheap.
///
/// At the optimum w = l2 (C + l1 I)^{-1} a. The halfspace is active whenever
/// r > 0; l2 then follows from it in closed form and l1 solves the monotone
/// secular equation ||w(l1)||^2 = R^2 (or is zero when the ball is slack).
class BallHalfspaceQcqp {
 public:
  explicit BallHalfspaceQcqp(Eigen::MatrixXcd c) : c_(std::move(c)) {
    if (c_.rows() != c_.cols() || c_.rows() == 0) throw InvalidArgument("QCQP matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c_);
    if (es.info() != Eigen::Success) throw NumericalFailure("QCQP eigendecomposition failed");
    basis_ = es.eigenvectors();
    gamma_ = es.eigenvalues().cwiseMax(0.0);
  }

  const Eigen::MatrixXcd& matrix() const noexcept { return c_; }

  QcqpSolution solve(double ball_radius_sq, const Eigen::VectorXcd& a, double r) const {
    if (a.size() != c_.rows()) throw InvalidArgument("QCQP anchor has the wrong length");
    if (!(ball_radius_sq > 0.0)) throw InvalidArgument("QCQP ball radius must be positive");

    QcqpSolution sol;
    if (r <= 0.0) {
      // w = 0 is feasible and minimizes a PSD form.
      sol.w = Eigen::VectorXcd::Zero(a.size());
      sol.kkt = kkt_residuals(c_, ball_radius_sq, a, r, sol.w, 0.0, 0.0);
      return sol;
    }
    const double a_sq = a.squaredNorm();
    if (!(a_sq > 0.0)) throw Infeasible("halfspace 0 >= r > 0 is empty");
    const double min_norm_sq = r * r / (4.0 * a_sq);
    if (min_norm_sq > ball_radius_sq * (1.0 + 1e-12)) {
      throw Infeasible("distance to the halfspace exceeds the ball radius");
    }

    const Eigen::VectorXcd beta = basis_.adjoint() * a;
    const Eigen::VectorXd b = beta.cwiseAbs2();

    // ||w(l)||^2 = (r^2/4) S2 / S1^2 with Sk = sum b_i / (gamma_i + l)^k;
    // decreasing in l by Cauchy-Schwarz.
    auto norm_sq = [&](double l) {
      double s1 = 0.0, s2 = 0.0;
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (b[i] == 0.0) continue;
        const double d = gamma_[i] + l;
        if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
        s1 += b[i] / d;
        s2 += b[i] / (d * d);
      }
      return 0.25 * r * r * s2 / (s1 * s1);
    };

    double lambda = 0.0;
    if (norm_sq(0.0) > ball_radius_sq) {
      const double gmax = std::max(gamma_.maxCoeff(), std::numeric_limits<double>::min());
      auto g = [&](double t) { return std::log(norm_sq(std::exp(t))) - std::log(ball_radius_sq); };
      double t_lo = std::log(gmax) - 80.0;
      double t_hi = std::log(gmax);
      while (g(t_hi) > 0.0 && t_hi < 690.0) t_hi += 2.0;
      if (g(t_lo) <= 0.0) {
        lambda = std::exp(t_lo);
      } else if (g(t_hi) > 0.0) {
        lambda = std::exp(t_hi);  // tangent case: optimum is the min-norm point
      } else {
        std::uintmax_t iters = 300;
        const auto bracket = boost::math::tools::toms748_solve(
            g, t_lo, t_hi, boost::math::tools::eps_tolerance<double>(50), iters);
        lambda = std::exp(bracket.second);  // feasible side of the root
      }
    }

    Eigen::VectorXcd scaled(beta.size());
    double s1 = 0.0;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      const double d = gamma_[i] + lambda;
      scaled[i] = b[i] == 0.0 ? std::complex<double>(0.0) : beta[i] / d;
      if (b[i] != 0.0) s1 += b[i] / d;
    }
    const Eigen::VectorXcd u = basis_ * scaled;
    const double l2 = r / (2.0 * s1);
    sol.w = l2 * u;
    sol.ball_multiplier = lambda;
    sol.halfspace_multiplier = l2;
    sol.objective = std::max(0.0, sol.w.dot(c_ * sol.w).real());
    sol.kkt = kkt_residuals(c_, ball_radius_sq, a, r, sol.w, lambda, l2);
    return sol;
  }

 private:
  Eigen::MatrixXcd c_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXd gamma_;
};

/// One-shot form of BallHalfspaceQcqp::solve.
inline QcqpSolution qcqp_subproblem(const Eigen::MatrixXcd& c2, double ball_radius_sq,
                                    const Eigen::VectorXcd& anchor, double offset) {
  return BallHalfspaceQcqp(c2).solve(ball_radius_sq, anchor, offset);
}

}  // namespace dsopt
