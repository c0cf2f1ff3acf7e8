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
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "errors.hpp"

namespace dsopt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Angle-of-departure interval (theta_l, theta_r) in radians, measured from
/// the array axis.
class AngleRegion {
 public:
  AngleRegion(double theta_l, double theta_r) : theta_l_(theta_l), theta_r_(theta_r) {
    if (!(theta_l > 0.0) || !(theta_r < kPi) || !(theta_l < theta_r)) {
      throw InvalidArgument("angle region must satisfy 0 < theta_l < theta_r < pi (got " +
                            std::to_string(theta_l) + ", " + std::to_string(theta_r) + ")");
    }
    cos_l_ = std::cos(theta_l_);
    cos_r_ = std::cos(theta_r_);
    if (!(cos_l_ - cos_r_ > 0.0)) {
      throw InvalidArgument("angle region has zero Doppler support");
    }
  }

  static AngleRegion from_degrees(double theta_l_deg, double theta_r_deg) {
    return {deg_to_rad(theta_l_deg), deg_to_rad(theta_r_deg)};
  }

  /// Region of total width `spread` centred on `center` (both radians).
  static AngleRegion centered(double center, double spread) {
    return {center - 0.5 * spread, center + 0.5 * spread};
  }

  double theta_l() const noexcept { return theta_l_; }
  double theta_r() const noexcept { return theta_r_; }
  double cos_l() const noexcept { return cos_l_; }
  double cos_r() const noexcept { return cos_r_; }
  /// Angular width theta_r - theta_l.
  double width() const noexcept { return theta_r_ - theta_l_; }
  /// Half-width of the Doppler support, cos(theta_l) - cos(theta_r).
  double mu() const noexcept { return cos_l_ - cos_r_; }
  double center() const noexcept { return 0.5 * (theta_l_ + theta_r_); }

  bool contains(double theta) const noexcept { return theta > theta_l_ && theta < theta_r_; }

 private:
  double theta_l_;
  double theta_r_;
  double cos_l_;
  double cos_r_;
};

/// Uniform linear array: element count and spacing in wavelengths.
class ArrayConfig {
 public:
  ArrayConfig(int m_antennas, double spacing) : m_(m_antennas), spacing_(spacing) {
    if (m_antennas < 1) throw InvalidArgument("m_antennas must be >= 1");
    if (!(spacing > 0.0)) throw InvalidArgument("antenna spacing must be > 0");
  }

  int m_antennas() const noexcept { return m_; }
  double spacing() const noexcept { return spacing_; }

 private:
  int m_;
  double spacing_;
};

/// Transmit beam directions, ordered by increasing angle (so cosines decrease).
class DirectionBank {
 public:
  DirectionBank(AngleRegion region, std::vector<double> directions)
      : region_(region), directions_(std::move(directions)) {
    if (directions_.empty()) throw InvalidArgument("direction bank is empty");
    for (std::size_t i = 0; i < directions_.size(); ++i) {
      if (!region_.contains(directions_[i])) {
        throw InvalidArgument("direction " + std::to_string(directions_[i]) +
                              " lies outside the angle region");
      }
      if (i > 0 && !(directions_[i] > directions_[i - 1])) {
        throw InvalidArgument("directions must be strictly increasing in angle");
      }
    }
  }

  const AngleRegion& region() const noexcept { return region_; }
  const std::vector<double>& directions() const noexcept { return directions_; }
  std::size_t size() const noexcept { return directions_.size(); }

  std::vector<double> cosines() const {
    std::vector<double> c(directions_.size());
    std::transform(directions_.begin(), directions_.end(), c.begin(),
                   [](double a) { return std::cos(a); });
    return c;
  }

 private:
  AngleRegion region_;
  std::vector<double> directions_;
};

/// Array response e^{j 2 pi d m x}, m = 0..M-1. With x = cos(theta) this is
/// the steering vector; with x = -omega_tilde it is the Doppler-domain
/// response used by the beam function.
inline Eigen::VectorXcd steering_vector(double cos_arg, const ArrayConfig& array) {
  const int m = array.m_antennas();
  Eigen::VectorXcd a(m);
  const double step = kTwoPi * array.spacing() * cos_arg;
  for (int i = 0; i < m; ++i) a[i] = std::polar(1.0, step * i);
  return a;
}

/// Equi-cos bank: cosines at the midpoints of q_count equal sub-intervals of
/// [cos(theta_r), cos(theta_l)].
inline DirectionBank equicos_directions(const AngleRegion& region, int q_count) {
  if (q_count < 1) throw InvalidArgument("q_count must be >= 1");
  std::vector<double> dirs(static_cast<std::size_t>(q_count));
  const double step = region.mu() / q_count;
  for (int i = 0; i < q_count; ++i) {
    // Largest cosine first, i.e. smallest angle first.
    const double c = region.cos_r() + (q_count - i - 0.5) * step;
    dirs[static_cast<std::size_t>(i)] = std::acos(c);
  }
  return DirectionBank(region, std::move(dirs));
}

namespace detail {
inline double clamped_acos(double x) {
  constexpr double kSlack = 1e-12;
  if (x > 1.0 && x < 1.0 + kSlack) x = 1.0;
  if (x < -1.0 && x > -1.0 - kSlack) x = -1.0;
  return std::acos(std::clamp(x, -1.0, 1.0));
}
}  // namespace detail

/// Doppler-domain window W(omega_tilde) induced by a uniform AoD density over
/// the region. Supported on [-mu, mu]; integrates to 2 pi.
inline double window(double omega_tilde, const AngleRegion& region) {
  const double mu = region.mu();
  if (omega_tilde < -mu || omega_tilde > mu) return 0.0;
  const double scale = kTwoPi / (region.width() * mu);
  double v;
  if (omega_tilde < 0.0) {
    v = detail::clamped_acos(region.cos_r() - omega_tilde) - region.theta_l();
  } else {
    v = region.theta_r() - detail::clamped_acos(region.cos_l() - omega_tilde);
  }
  return std::max(0.0, scale * v);
}

}  // namespace dsopt
