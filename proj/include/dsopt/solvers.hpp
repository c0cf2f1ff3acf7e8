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
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "barrier.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "moments.hpp"
#include "qcqp.hpp"

namespace dsopt {

/// Minimal normalized radiation efficiency epsilon, 0 < epsilon < 1.
class EfficiencyConstraint {
 public:
  explicit EfficiencyConstraint(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
      throw InvalidArgument("efficiency constraint epsilon must lie in (0, 1), got " +
                            std::to_string(epsilon));
    }
  }
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

enum class Termination { converged, max_iters, infeasible_start };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::infeasible_start: return "infeasible_start";
  }
  return "unknown";
}

/// Per-iteration trace of an iterative solver. Entry 0 is the starting point.
struct SolverReport {
  std::vector<double> objective;
  std::vector<double> feasibility_residual;
  Termination termination;
  WeightVector final_weights;

  std::size_t iterations() const { return objective.empty() ? 0 : objective.size() - 1; }
};

inline void write_trace(std::ostream& os, const SolverReport& rep) {
  os << "# termination=" << to_string(rep.termination) << '\n';
  os << "# iterations=" << rep.iterations() << '\n';
  os << "iteration,objective,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < rep.objective.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, rep.objective[i],
                  rep.feasibility_residual[i]);
    os << buf;
  }
}

/// Relative floors added to C0 and C2 (times lambda_max(C0)) before any
/// generalized eigenproblem or objective evaluation. Both matrices carry
/// rounding noise near 1e-16 lambda_max, which is far above their smallest
/// true eigenvalues once the region is narrow compared with the array
/// resolution; the floors keep the quotient well-posed there.
struct NumericalFloors {
  double c0 = 1e-12;
  double c2 = 1e-15;
};

inline HermitianPencil condition_pencil(const HermitianPencil& p, NumericalFloors floors = {}) {
  const double lam = p.lambda_max_c0;
  const double d0 = std::max(floors.c0 * lam, -10.0 * std::min(0.0, smallest_eigenvalue(p.c0)));
  const double d2 = std::max(floors.c2 * lam, -10.0 * std::min(0.0, smallest_eigenvalue(p.c2)));
  HermitianPencil out = p;
  out.c0.diagonal().array() += d0;
  out.c2.diagonal().array() += d2;
  return out;
}

namespace detail {

// Entry of largest modulus made real and positive; norm one.
inline Eigen::VectorXcd canonical_phase(Eigen::VectorXcd v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v[k]) > 0.0) v *= std::conj(v[k]) / std::abs(v[k]);
  return v / v.norm();
}

struct GeneralizedMin {
  double value;
  Eigen::VectorXcd vector;
};

// Smallest eigenpair of c2 v = lambda c0 v (c0 positive definite).
inline GeneralizedMin smallest_generalized(const Eigen::MatrixXcd& c2, const Eigen::MatrixXcd& c0) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(c2, c0,
                                                                  Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw NumericalFailure("generalized eigensolver failed");
  const auto& ev = ges.eigenvalues();
  // The solver returns an ascending spectrum; certify it.
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev[i] < ev[0]) throw NumericalFailure("generalized spectrum is not ordered");
  }
  Eigen::VectorXcd v = canonical_phase(ges.eigenvectors().col(0));
  // The Cholesky reduction loses accuracy with the condition number of c0;
  // the Rayleigh quotient of the returned vector is what it actually achieves.
  const double q = quadratic_form(c2, v) / quadratic_form(c0, v);
  if (!(std::abs(q - ev[0]) <= 1e-3 * std::abs(ev[0]) + 1e-12 * std::abs(ev[ev.size() - 1]))) {
    throw NumericalFailure("generalized eigenvector does not reproduce its eigenvalue");
  }
  return {q, std::move(v)};
}

inline Eigen::VectorXcd embed(const Eigen::VectorXcd& sub, const std::vector<int>& support, int m) {
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(m);
  for (std::size_t i = 0; i < support.size(); ++i) w[support[i]] = sub[static_cast<Eigen::Index>(i)];
  return w;
}

}  // namespace detail

struct MinDsResult {
  WeightVector weights;
  /// Smallest generalized eigenvalue of the conditioned (C2, C0) pencil.
  double eigenvalue;
  /// sqrt of the quotient of the returned weights on the given pencil.
  double normalized_ds;
};

/// AW-Mini-DS: the weight vector minimizing the Doppler-spread quotient with
/// no efficiency requirement.
inline MinDsResult min_ds_weights(const HermitianPencil& p, NumericalFloors floors = {}) {
  const HermitianPencil cond = condition_pencil(p, floors);
  auto gm = detail::smallest_generalized(cond.c2, cond.c0);
  WeightVector w(std::move(gm.vector));
  // Report what the vector achieves on the unconditioned forms.
  const double ds = normalized_doppler_spread(w, p);
  return {std::move(w), std::max(0.0, gm.value), ds};
}

inline MinDsResult min_ds_weights(const MomentMatrices& mm) { return min_ds_weights(mm.pencil); }

/// Scaled dominant eigenvector of C0 with w^H w = 1/(sqrt(eps) lambda_max):
/// feasible for both the power ball and the w^H C0 w >= 1 constraint.
inline WeightVector feasible_init(const HermitianPencil& p, const EfficiencyConstraint& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p.c0);
  if (es.info() != Eigen::Success) throw NumericalFailure("Hermitian eigensolver failed");
  const Eigen::VectorXcd v = detail::canonical_phase(es.eigenvectors().col(p.size() - 1));
  const double t_sq = 1.0 / (std::sqrt(c.epsilon()) * p.lambda_max_c0);
  return WeightVector(std::sqrt(t_sq) * v);
}

inline WeightVector feasible_init(const MomentMatrices& mm, const EfficiencyConstraint& c) {
  return feasible_init(mm.pencil, c);
}

struct SpcaOptions {
  double tol = 1e-8;
  int max_iters = 200;
  /// Return the AW-Mini-DS minimizer directly when it already meets the
  /// efficiency constraint (it is then the global optimum).
  bool accept_unconstrained_optimum = true;
  NumericalFloors floors{};
};

/// Max relative violation of w^H w <= R^2 and w^H C0 w >= 1.
inline double spca_residual(const Eigen::VectorXcd& w, const Eigen::MatrixXcd& c0, double ball_radius_sq) {
  return std::max({0.0, w.squaredNorm() / ball_radius_sq - 1.0, 1.0 - quadratic_form(c0, w)});
}

/// Sequential parametric convex approximation for
///
///     min w^H C2 w  s.t.  w^H w <= 1/(eps lambda_max),  w^H C0 w >= 1.
///
/// The non-convex constraint is replaced at every step by its first-order
/// Taylor under-estimator at the current iterate, which keeps all iterates
/// feasible and the objective non-increasing.
inline SolverReport spca_minimize_ds(const HermitianPencil& p, const EfficiencyConstraint& c,
                                     const std::optional<WeightVector>& init = std::nullopt,
                                     const SpcaOptions& opts = {}) {
  const double ball = 1.0 / (c.epsilon() * p.lambda_max_c0);
  const HermitianPencil cond = condition_pencil(p, opts.floors);
  const WeightVector start = init ? *init : feasible_init(p, c);
  if (start.size() != p.size()) throw InvalidArgument("initial weights have the wrong length");

  Eigen::VectorXcd w = start.values();
  std::vector<double> obj{quadratic_form(cond.c2, w)};
  std::vector<double> res{spca_residual(w, p.c0, ball)};
  if (res.back() > 1e-10) {
    return SolverReport{std::move(obj), std::move(res), Termination::infeasible_start, start};
  }

  if (opts.accept_unconstrained_optimum) {
    const auto md = min_ds_weights(p, opts.floors);
    const double den = quadratic_form(p.c0, md.weights.values());
    if (den > 0.0) {
      const Eigen::VectorXcd cand = md.weights.values() / std::sqrt(den);
      const double cand_obj = quadratic_form(cond.c2, cand);
      if (cand.squaredNorm() <= ball && cand_obj <= obj.back()) {
        obj.push_back(cand_obj);
        res.push_back(spca_residual(cand, p.c0, ball));
        return SolverReport{std::move(obj), std::move(res), Termination::converged, WeightVector(cand)};
      }
    }
  }

  const BallHalfspaceQcqp sub(cond.c2);
  Termination term = Termination::max_iters;
  for (int it = 0; it < opts.max_iters; ++it) {
    const Eigen::VectorXcd a = p.c0 * w;
    const double r = 1.0 + quadratic_form(p.c0, w);
    const auto sol = sub.solve(ball, a, r);
    const double f = quadratic_form(cond.c2, sol.w);
    const double prev = obj.back();
    if (f > prev) {
      // The previous iterate is feasible for this subproblem, so an increase
      // is rounding; keep the previous point.
      term = Termination::converged;
      break;
    }
    w = sol.w;
    obj.push_back(f);
    res.push_back(spca_residual(w, p.c0, ball));
    if (prev - f <= opts.tol * prev) {
      term = Termination::converged;
      break;
    }
  }
  return SolverReport{std::move(obj), std::move(res), term, WeightVector(w)};
}

inline SolverReport spca_minimize_ds(const MomentMatrices& mm, const EfficiencyConstraint& c,
                                     const std::optional<WeightVector>& init = std::nullopt,
                                     const SpcaOptions& opts = {}) {
  return spca_minimize_ds(mm.pencil, c, init, opts);
}

struct L1Options {
  double tol = 1e-8;
  int max_relinearizations = 100;
  L1BarrierOptions barrier{};
};

struct L1Result {
  WeightVector weights;
  double l1_norm;
  SolverReport report;
};

/// min ||w||_1 s.t. w^H C2 w <= sigma, w^H C0 w >= 1, with the second
/// constraint linearized at the anchor and re-linearized at each solution
/// until the l1 value settles. The pencil is used as given; pass a
/// conditioned one for ill-posed geometries.
inline L1Result l1_subproblem(const HermitianPencil& p, double sigma, const WeightVector& anchor,
                              const L1Options& opts = {}) {
  if (anchor.size() != p.size()) throw InvalidArgument("anchor has the wrong length");
  {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(p.c2, p.c0, Eigen::EigenvaluesOnly);
    if (ges.info() == Eigen::Success && sigma < ges.eigenvalues()[0] * (1.0 - 1e-12)) {
      throw Infeasible("sigma is below the minimum Doppler-spread quotient");
    }
  }
  auto residual = [&](const Eigen::VectorXcd& w) {
    return std::max({0.0, quadratic_form(p.c2, w) / sigma - 1.0, 1.0 - quadratic_form(p.c0, w)});
  };

  Eigen::VectorXcd w = anchor.values();
  std::vector<double> obj{w.cwiseAbs().sum()};
  std::vector<double> res{residual(w)};
  Termination term = Termination::max_iters;
  for (int k = 0; k < opts.max_relinearizations; ++k) {
    const Eigen::VectorXcd a = p.c0 * w;
    const double r = 1.0 + quadratic_form(p.c0, w);
    const L1BarrierSolver solver(p.c2, sigma, a, r, opts.barrier);
    const auto sol = solver.solve(w);
    const double prev = obj.back();
    w = sol.w;
    obj.push_back(sol.l1_norm);
    res.push_back(residual(w));
    if (k > 0 && std::abs(prev - sol.l1_norm) <= opts.tol * prev) {
      term = Termination::converged;
      break;
    }
  }
  const double l1 = obj.back();
  WeightVector wv(w);
  return L1Result{wv, l1, SolverReport{std::move(obj), std::move(res), term, wv}};
}

inline L1Result l1_subproblem(const MomentMatrices& mm, double sigma, const WeightVector& anchor,
                              const L1Options& opts = {}) {
  return l1_subproblem(condition_pencil(mm.pencil), sigma, anchor, opts);
}

/// Indices counted as nonzero: |w_i| > zero_tol * max_j |w_j|.
inline std::vector<int> support_of(const Eigen::VectorXcd& w, double zero_tol) {
  const double cut = zero_tol * w.cwiseAbs().maxCoeff();
  std::vector<int> s;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) > cut) s.push_back(static_cast<int>(i));
  }
  return s;
}

/// Placement of the reference N-element sub-array.
enum class SubarrayPlacement { leading, centered };

inline std::vector<int> contiguous_subarray(int m, int n, SubarrayPlacement placement) {
  if (n < 1 || n > m) throw InvalidArgument("sub-array size must lie in [1, M]");
  const int first = placement == SubarrayPlacement::leading ? 0 : (m - n) / 2;
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), first);
  return idx;
}

struct SelectionOptions {
  double zero_tol = 1e-6;
  SubarrayPlacement baseline = SubarrayPlacement::leading;
  int max_bisections = 60;
  /// Stop once the sigma bracket is narrower than width_tol * sigma_high.
  double width_tol = 1e-4;
  L1Options l1{};
  NumericalFloors floors{};
};

struct BisectionProbe {
  double sigma;
  int support_size;
};

struct SelectionResult {
  std::vector<int> support;
  /// Squared normalized Doppler-spread bound at the accepted probe.
  double sigma_final;
  WeightVector weights;
  SolverReport report;
  std::vector<BisectionProbe> probes;
};

/// Antenna selection by bisection on the Doppler-spread bound sigma: each
/// probe solves the l1-relaxed sparsest-weights problem and moves the bracket
/// according to the support size; stops when the support equals the budget.
inline SelectionResult select_antennas(const HermitianPencil& p, int n_budget,
                                       const SelectionOptions& opts = {}) {
  const int m = p.size();
  if (n_budget < 1 || n_budget > m) {
    throw InvalidArgument("RF-chain budget must lie in [1, M], got " + std::to_string(n_budget));
  }
  const HermitianPencil cond = condition_pencil(p, opts.floors);
  const auto full = detail::smallest_generalized(cond.c2, cond.c0);
  const double sigma_min = std::max(full.value, 0.0);
  auto single_report = [&](const Eigen::VectorXcd& w, double objective) {
    return SolverReport{{objective}, {0.0}, Termination::converged, WeightVector(w)};
  };

  if (n_budget == m) {
    std::vector<int> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), 0);
    return SelectionResult{all, sigma_min, WeightVector(full.vector),
                           single_report(full.vector, sigma_min), {}};
  }

  const auto base_idx = contiguous_subarray(m, n_budget, opts.baseline);
  const HermitianPencil base = cond.principal(base_idx);
  const auto base_min = detail::smallest_generalized(base.c2, base.c0);
  const double sigma_max = base_min.value;
  auto fallback = [&](std::vector<BisectionProbe> probes) {
    const Eigen::VectorXcd w = detail::embed(base_min.vector, base_idx, m);
    return SelectionResult{base_idx, sigma_max, WeightVector(w), single_report(w, sigma_max),
                           std::move(probes)};
  };
  if (!(sigma_max > sigma_min)) return fallback({});

  // lift() scales a point with w^H C0 w >= 1 and w^H C2 w = q2 < sigma to
  // w^H C2 w = sqrt(sigma q2) < sigma, w^H C0 w > 1: strictly feasible.
  const Eigen::VectorXcd v0 = full.vector / std::sqrt(quadratic_form(cond.c0, full.vector));

  // Any solution found at a smaller sigma is feasible at a larger one, and the
  // l1 loop is local: start each probe from the cheapest such point.
  auto lift = [&](const Eigen::VectorXcd& w, double sigma) {
    const double q2 = quadratic_form(cond.c2, w);
    return Eigen::VectorXcd(w * std::pow(sigma / std::max(q2, 1e-300), 0.25));
  };
  std::vector<std::pair<double, Eigen::VectorXcd>> solved;

  double lo = sigma_min, hi = sigma_max;
  std::vector<BisectionProbe> probes;
  std::optional<SelectionResult> best;
  for (int it = 0; it < opts.max_bisections; ++it) {
    const double sigma = 0.5 * (lo + hi);
    Eigen::VectorXcd start = lift(v0, sigma);
    for (const auto& [s_prev, w_prev] : solved) {
      if (s_prev < sigma && w_prev.cwiseAbs().sum() < start.cwiseAbs().sum()) start = lift(w_prev, sigma);
    }
    const auto l1 = l1_subproblem(cond, sigma, WeightVector(start), opts.l1);
    Eigen::VectorXcd w = l1.weights.values();
    auto supp = support_of(w, opts.zero_tol);
    // Every feasible point bounds S(sigma); keep the sparsest one known.
    for (const auto& [s_prev, w_prev] : solved) {
      if (s_prev >= sigma) continue;
      auto sp = support_of(w_prev, opts.zero_tol);
      if (sp.size() < supp.size()) {
        w = w_prev;
        supp = std::move(sp);
      }
    }
    if (static_cast<int>(supp.size()) > n_budget) {
      // Rounding: the n_budget largest entries may already carry a feasible
      // point. The l1 solutions of these persymmetric pencils are themselves
      // symmetric, so odd budgets are otherwise hard to hit.
      std::vector<int> top(supp);
      std::partial_sort(top.begin(), top.begin() + n_budget, top.end(),
                        [&](int a, int b) { return std::abs(w[a]) > std::abs(w[b]); });
      top.resize(static_cast<std::size_t>(n_budget));
      std::sort(top.begin(), top.end());
      const HermitianPencil sub = cond.principal(top);
      const auto gm = detail::smallest_generalized(sub.c2, sub.c0);
      if (gm.value <= sigma) {
        const Eigen::VectorXcd ws = gm.vector / std::sqrt(quadratic_form(sub.c0, gm.vector));
        w = detail::embed(ws, top, m);
        supp = std::move(top);
      }
    }
    solved.emplace_back(sigma, w);
    const int k = static_cast<int>(supp.size());
    probes.push_back({sigma, k});
    if (k <= n_budget &&
        (!best || k > static_cast<int>(best->support.size()) ||
         (k == static_cast<int>(best->support.size()) && sigma < best->sigma_final))) {
      Eigen::VectorXcd kept = Eigen::VectorXcd::Zero(m);
      for (int i : supp) kept[i] = w[i];
      best = SelectionResult{supp, sigma, WeightVector(kept), l1.report, {}};
    }
    if (k > n_budget) {
      lo = sigma;
    } else if (k < n_budget) {
      hi = sigma;
    } else {
      break;
    }
    if (hi - lo < opts.width_tol * hi) break;
  }
  if (!best) return fallback(std::move(probes));
  best->probes = std::move(probes);
  return *best;
}

inline SelectionResult select_antennas(const MomentMatrices& mm, int n_budget,
                                       const SelectionOptions& opts = {}) {
  return select_antennas(mm.pencil, n_budget, opts);
}

struct TwoStepResult {
  SelectionResult selection;  // refit weights, refit report
  WeightVector stage_one_weights;
  /// Normalized efficiency against lambda_max of the selected submatrix.
  double normalized_efficiency;
  double normalized_ds;
};

/// Stage two on a given selection: weights refit on the selected sub-array,
/// either with the efficiency-constrained SPCA solver (lambda_max taken from
/// the submatrix) or, without a constraint, with AW-Mini-DS restricted to the
/// support.
inline TwoStepResult refit_on_support(const HermitianPencil& p, const SelectionResult& stage,
                                      const std::optional<EfficiencyConstraint>& c,
                                      const NumericalFloors& floors = {}, const SpcaOptions& spca = {}) {
  const HermitianPencil sub = p.principal(stage.support);
  std::optional<SolverReport> rep;
  if (c) {
    rep = spca_minimize_ds(sub, *c, std::nullopt, spca);
  } else {
    const auto md = min_ds_weights(sub, floors);
    rep = SolverReport{{md.eigenvalue}, {0.0}, Termination::converged, md.weights};
  }
  const WeightVector w_sub = rep->final_weights;
  const double eff = radiation_efficiency(w_sub, sub).normalized;
  const double ds = normalized_doppler_spread(w_sub, sub);
  SelectionResult out{stage.support, stage.sigma_final,
                      WeightVector(detail::embed(w_sub.values(), stage.support, p.size())), std::move(*rep),
                      stage.probes};
  return TwoStepResult{std::move(out), stage.weights, eff, ds};
}

/// Stage one selects antennas; stage two refits the weights on the support.
inline TwoStepResult two_step_select_and_weight(const HermitianPencil& p, int n_budget,
                                                const std::optional<EfficiencyConstraint>& c,
                                                const SelectionOptions& sel = {},
                                                const SpcaOptions& spca = {}) {
  return refit_on_support(p, select_antennas(p, n_budget, sel), c, sel.floors, spca);
}

inline TwoStepResult two_step_select_and_weight(const MomentMatrices& mm, int n_budget,
                                                const std::optional<EfficiencyConstraint>& c,
                                                const SelectionOptions& sel = {},
                                                const SpcaOptions& spca = {}) {
  return two_step_select_and_weight(mm.pencil, n_budget, c, sel, spca);
}

}  // namespace dsopt
