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
#include <limits>

#include <Eigen/Dense>

#include "errors.hpp"

namespace dsopt {

struct L1BarrierOptions {
  /// Stop when the barrier duality gap is below gap_tol * ||w||_1.
  double gap_tol = 1e-10;
  double tau_growth = 8.0;
  int max_newton = 80;
  int max_outer = 80;
};

struct L1BarrierResult {
  Eigen::VectorXcd w;
  double l1_norm = 0.0;
  double gap = 0.0;
  int newton_steps = 0;
};

/// Log-barrier interior-point solver for
///
///     min  sum_i |w_i|   s.t.  w^H C w <= sigma,  2 Re(a^H w) >= r,
///
/// posed over the real embedding w = u + jv with epigraph variables
/// t_i >= |w_i| (second-order cones). A phase-I problem on (w, s) with the
/// two hard constraints relaxed by s finds a strictly feasible start when the
/// supplied one is not.
class L1BarrierSolver {
 public:
  L1BarrierSolver(const Eigen::MatrixXcd& c, double sigma, const Eigen::VectorXcd& a, double r,
                  L1BarrierOptions opts = {})
      : n_(static_cast<int>(c.rows())), sigma_(sigma), r_(r), opts_(opts) {
    if (c.rows() != c.cols() || a.size() != c.rows()) throw InvalidArgument("l1 problem size mismatch");
    if (!(sigma > 0.0)) throw Infeasible("sigma must be positive");
    const int n = n_;
    q_.resize(2 * n, 2 * n);
    q_.topLeftCorner(n, n) = c.real();
    q_.bottomRightCorner(n, n) = c.real();
    q_.topRightCorner(n, n) = -c.imag();
    q_.bottomLeftCorner(n, n) = c.imag();
    q_ = 0.5 * (q_ + q_.transpose()).eval();
    b_.resize(2 * n);
    b_ << a.real(), a.imag();
  }

  L1BarrierResult solve(const Eigen::VectorXcd& start) const {
    const int n = n_;
    Eigen::VectorXd x(2 * n);
    x << start.real(), start.imag();
    if (!(quad_slack(x) > 0.0 && lin_slack(x) > 0.0)) x = phase_one(x);

    Eigen::VectorXd z(3 * n);
    z.head(2 * n) = x;
    double mean_abs = 0.0;
    for (int i = 0; i < n; ++i) mean_abs += std::hypot(x[i], x[n + i]);
    mean_abs = mean_abs / n + std::numeric_limits<double>::min();
    for (int i = 0; i < n; ++i) z[2 * n + i] = 1.5 * std::hypot(x[i], x[n + i]) + 0.1 * mean_abs;

    const double m = 2.0 * n + 2.0;
    double tau = m / std::max(z.tail(n).sum(), std::numeric_limits<double>::min());
    int steps = 0;
    for (int outer = 0; outer < opts_.max_outer; ++outer) {
      steps += center(z, tau, false);
      const double obj = z.tail(n).sum();
      if (m / tau <= opts_.gap_tol * obj) break;
      tau *= opts_.tau_growth;
    }

    L1BarrierResult res;
    res.w.resize(n);
    for (int i = 0; i < n; ++i) res.w[i] = {z[i], z[n + i]};
    res.l1_norm = res.w.cwiseAbs().sum();
    res.gap = m / tau;
    res.newton_steps = steps;
    return res;
  }

 private:
  double quad_slack(const Eigen::Ref<const Eigen::VectorXd>& x) const { return sigma_ - x.dot(q_ * x); }
  double lin_slack(const Eigen::Ref<const Eigen::VectorXd>& x) const { return 2.0 * b_.dot(x) - r_; }

  // Variables: phase two z = [u; v; t]; phase one z = [u; v; s].
  double merit(const Eigen::VectorXd& z, double tau, bool phase_one) const {
    const int n = n_;
    const auto x = z.head(2 * n);
    const double s = phase_one ? z[2 * n] : 0.0;
    const double qv = quad_slack(x) + s;
    const double lv = lin_slack(x) + s;
    if (!(qv > 0.0) || !(lv > 0.0)) return std::numeric_limits<double>::infinity();
    double f = -std::log(qv) - std::log(lv);
    if (phase_one) return f + tau * s;
    for (int i = 0; i < n; ++i) {
      const double t = z[2 * n + i];
      const double d = t * t - x[i] * x[i] - x[n + i] * x[n + i];
      if (!(t > 0.0) || !(d > 0.0)) return std::numeric_limits<double>::infinity();
      f += tau * t - std::log(d);
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& z, double tau, bool phase_one, Eigen::VectorXd& g,
                   Eigen::MatrixXd& h) const {
    const int n = n_;
    const int dim = static_cast<int>(z.size());
    g.setZero(dim);
    h.setZero(dim, dim);
    const auto x = z.head(2 * n);
    const double s = phase_one ? z[2 * n] : 0.0;

    Eigen::VectorXd gq = Eigen::VectorXd::Zero(dim);
    gq.head(2 * n) = -2.0 * (q_ * x);
    Eigen::VectorXd gl = Eigen::VectorXd::Zero(dim);
    gl.head(2 * n) = 2.0 * b_;
    if (phase_one) {
      gq[2 * n] = 1.0;
      gl[2 * n] = 1.0;
    }
    const double qv = quad_slack(x) + s;
    const double lv = lin_slack(x) + s;
    g -= gq / qv + gl / lv;
    h.noalias() += gq * gq.transpose() / (qv * qv) + gl * gl.transpose() / (lv * lv);
    h.topLeftCorner(2 * n, 2 * n) += (2.0 / qv) * q_;

    if (phase_one) {
      g[2 * n] += tau;
      return;
    }
    for (int i = 0; i < n; ++i) {
      const int iu = i, iv = n + i, it = 2 * n + i;
      const double u = z[iu], v = z[iv], t = z[it];
      const double d = t * t - u * u - v * v;
      const double du = -2.0 * u, dv = -2.0 * v, dt = 2.0 * t;
      g[iu] -= du / d;
      g[iv] -= dv / d;
      g[it] -= dt / d;
      g[it] += tau;
      const double d2 = d * d;
      const int idx[3] = {iu, iv, it};
      const double gr[3] = {du, dv, dt};
      for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) h(idx[p], idx[q]) += gr[p] * gr[q] / d2;
      }
      h(iu, iu) += 2.0 / d;
      h(iv, iv) += 2.0 / d;
      h(it, it) -= 2.0 / d;
    }
  }

  // The Hessian is positive definite in exact arithmetic but badly scaled
  // near the cone boundaries; shift the diagonal until Cholesky succeeds.
  static Eigen::VectorXd newton_step(const Eigen::MatrixXd& h, const Eigen::VectorXd& g) {
    const double scale = h.diagonal().cwiseAbs().maxCoeff();
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    for (double shift = 1e-14 * scale; llt.info() != Eigen::Success; shift *= 100.0) {
      if (shift > 1e-2 * scale) throw NumericalFailure("barrier Newton system is singular");
      Eigen::MatrixXd hs = h;
      hs.diagonal().array() += shift;
      llt.compute(hs);
    }
    return llt.solve(-g);
  }

  // Damped Newton on the barrier merit; returns the number of steps taken.
  int center(Eigen::VectorXd& z, double tau, bool phase_one) const {
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    double f = merit(z, tau, phase_one);
    int it = 0;
    for (; it < opts_.max_newton; ++it) {
      derivatives(z, tau, phase_one, g, h);
      const Eigen::VectorXd dz = newton_step(h, g);
      const double decrement = -g.dot(dz);
      if (!(decrement > 1e-12)) break;
      double alpha = 1.0;
      double f_new = merit(z + alpha * dz, tau, phase_one);
      while (!(f_new <= f - 0.25 * alpha * decrement) && alpha > 1e-14) {
        alpha *= 0.5;
        f_new = merit(z + alpha * dz, tau, phase_one);
      }
      if (alpha <= 1e-14) break;
      z += alpha * dz;
      f = f_new;
      if (phase_one && z[2 * n_] < 0.0) return it + 1;
    }
    return it;
  }

  Eigen::VectorXd phase_one(const Eigen::VectorXd& x0) const {
    const int n = n_;
    Eigen::VectorXd z(2 * n + 1);
    z.head(2 * n) = x0;
    const double q0 = quad_slack(x0), l0 = lin_slack(x0);
    const double margin = std::max({std::abs(q0), std::abs(l0), sigma_, std::abs(r_)});
    z[2 * n] = std::max(-q0, -l0) + 0.5 * margin;
    double tau = 1.0 / margin;
    for (int outer = 0; outer < 4 * opts_.max_outer; ++outer) {
      center(z, tau, true);
      const double s = z[2 * n];
      if (s < 0.0) return z.head(2 * n);
      if (s - 2.0 / tau > 0.0) throw Infeasible("l1 subproblem: constraint set has empty interior");
      tau *= opts_.tau_growth;
      if (tau * margin > 1e18) break;
    }
    throw Infeasible("l1 subproblem: no strictly feasible point found");
  }

  int n_;
  double sigma_;
  double r_;
  L1BarrierOptions opts_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd b_;
};

}  // namespace dsopt
