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
#include <vector>

#include <Eigen/Core>

#include "errors.hpp"
#include "geometry.hpp"
#include "moments.hpp"

namespace dsopt {

/// Per-antenna complex weights. Never identically zero.
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXcd weights) : w_(std::move(weights)) {
    if (w_.size() == 0) throw InvalidArgument("weight vector is empty");
    if (w_.squaredNorm() == 0.0 || !std::isfinite(w_.squaredNorm())) {
      throw InvalidArgument("weight vector must be finite and not identically zero");
    }
  }

  static WeightVector uniform(int m) { return WeightVector(Eigen::VectorXcd::Ones(m)); }

  const Eigen::VectorXcd& values() const noexcept { return w_; }
  int size() const noexcept { return static_cast<int>(w_.size()); }
  std::complex<double> operator[](int i) const { return w_[i]; }
  double norm_sq() const { return w_.squaredNorm(); }

  /// Scaled to unit Euclidean norm.
  WeightVector normalized() const { return WeightVector(w_ / w_.norm()); }

 private:
  Eigen::VectorXcd w_;
};

/// One point of a Doppler spectrum; omega_tilde = omega / omega_d.
struct SpectrumSample {
  double omega_tilde;
  double value;
};

struct RadiationEfficiency {
  double efficiency;  // w^H C0 w / w^H w
  double normalized;  // efficiency / lambda_max(C0)
};

struct PatternPoint {
  double angle;  // radians
  double gain;
  double gain_db;
};

inline constexpr double kDbFloor = -200.0;

/// Real part of v^H A v for Hermitian A.
inline double quadratic_form(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& v) {
  return v.dot(a * v).real();
}

namespace detail {
inline void check_size(const WeightVector& w, int m) {
  if (w.size() != m) throw InvalidArgument("weight vector length does not match the array");
}
}  // namespace detail

/// (w^H C2 w)/(w^H C0 w), the squared normalized Doppler spread.
inline double ds_quotient(const WeightVector& w, const HermitianPencil& p) {
  detail::check_size(w, p.size());
  const double den = quadratic_form(p.c0, w.values());
  if (!(den > 1e-15 * p.lambda_max_c0 * w.norm_sq())) {
    throw DegenerateBeam("w^H C0 w is numerically zero; the beam radiates nothing into the region");
  }
  return std::max(0.0, quadratic_form(p.c2, w.values())) / den;
}

/// sigma_D / omega_d.
inline double normalized_doppler_spread(const WeightVector& w, const HermitianPencil& p) {
  return std::sqrt(ds_quotient(w, p));
}

/// Doppler spread sigma_D in rad/s for maximum Doppler shift f_d (Hz).
inline double doppler_spread(const WeightVector& w, const MomentMatrices& mm, double f_d) {
  return kTwoPi * f_d * normalized_doppler_spread(w, mm.pencil);
}

inline RadiationEfficiency radiation_efficiency(const WeightVector& w, const HermitianPencil& p) {
  detail::check_size(w, p.size());
  const double eff = quadratic_form(p.c0, w.values()) / w.norm_sq();
  return {eff, eff / p.lambda_max_c0};
}

/// |(1/M) varsigma^T(omega_tilde) w|^2 with varsigma_m = e^{-j 2 pi d m omega_tilde}.
inline double beam_function(const WeightVector& w, double omega_tilde, const ArrayConfig& array) {
  detail::check_size(w, array.m_antennas());
  const double step = -kTwoPi * array.spacing() * omega_tilde;
  std::complex<double> acc{0.0, 0.0};
  for (int m = 0; m < w.size(); ++m) acc += std::polar(1.0, step * m) * w[m];
  return std::norm(acc) / (static_cast<double>(w.size()) * w.size());
}

/// Channel PSD P(omega) = |G(omega/omega_d)|^2 W(omega/omega_d) / omega_d, omega in rad/s.
inline double psd(const WeightVector& w, double omega, const AngleRegion& region,
                  const ArrayConfig& array, double f_d) {
  const double omega_d = kTwoPi * f_d;
  const double x = omega / omega_d;
  if (std::abs(x) > region.mu()) return 0.0;
  return beam_function(w, x, array) * window(x, region) / omega_d;
}

inline double to_db(double gain) {
  return gain > 0.0 ? std::max(kDbFloor, 10.0 * std::log10(gain)) : kDbFloor;
}

/// Composite pattern: incoherent sum over beam directions of the beam
/// function evaluated at cos(vartheta_q) - cos(theta).
inline std::vector<PatternPoint> radiation_pattern(const WeightVector& w, const DirectionBank& bank,
                                                   const std::vector<double>& theta_grid,
                                                   const ArrayConfig& array) {
  if (theta_grid.empty()) throw InvalidArgument("pattern angle grid is empty");
  const auto cq = bank.cosines();
  std::vector<PatternPoint> out;
  out.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    double g = 0.0;
    for (double c : cq) g += beam_function(w, c - std::cos(theta), array);
    out.push_back({theta, g, to_db(g)});
  }
  return out;
}

/// Open grid over (0, 180) degrees in `step_deg` increments, in radians.
inline std::vector<double> default_theta_grid(double step_deg = 0.1) {
  if (!(step_deg > 0.0) || step_deg >= 180.0) throw InvalidArgument("pattern step must be in (0, 180)");
  std::vector<double> g;
  const int n = static_cast<int>(std::ceil(180.0 / step_deg - 1e-9));
  for (int i = 1; i < n; ++i) g.push_back(deg_to_rad(i * step_deg));
  return g;
}

}  // namespace dsopt
