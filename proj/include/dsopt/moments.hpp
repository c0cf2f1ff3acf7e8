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

#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace dsopt {

struct QuadratureOptions {
  /// Gauss nodes per half of the Doppler support on the first pass.
  int min_nodes = 40;
  /// Refinement gives up beyond this many nodes per half-support.
  int max_nodes = kNodesPerPanel * 8192;
  /// Successive refinements must agree to tol * |lag-0 integral|.
  double tol = 1e-10;
};

/// The two Hermitian forms behind every metric, plus lambda_max(C0).
struct HermitianPencil {
  Eigen::MatrixXcd c0;
  Eigen::MatrixXcd c2;
  double lambda_max_c0 = 0.0;

  int size() const { return static_cast<int>(c0.rows()); }

  /// Principal submatrices on `indices`, with lambda_max recomputed.
  HermitianPencil principal(std::span<const int> indices) const;
};

inline double largest_eigenvalue(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("Hermitian eigensolver failed");
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

inline double smallest_eigenvalue(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("Hermitian eigensolver failed");
  return es.eigenvalues()(0);
}

inline HermitianPencil HermitianPencil::principal(std::span<const int> indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  if (n == 0) throw InvalidArgument("principal submatrix needs at least one index");
  HermitianPencil out;
  out.c0.resize(n, n);
  out.c2.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.c0(i, j) = c0(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
      out.c2(i, j) = c2(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
  }
  out.lambda_max_c0 = largest_eigenvalue(out.c0);
  return out;
}

/// C0 and C2 for one region/array pair. Both are Hermitian Toeplitz.
struct MomentMatrices {
  HermitianPencil pencil;
  AngleRegion region;
  ArrayConfig array;

  const Eigen::MatrixXcd& c0() const noexcept { return pencil.c0; }
  const Eigen::MatrixXcd& c2() const noexcept { return pencil.c2; }
  double lambda_max_c0() const noexcept { return pencil.lambda_max_c0; }
  int size() const { return pencil.size(); }
};

namespace detail {

struct LagMoments {
  std::vector<std::complex<double>> zeroth;  // weight power 0, lags 0..max_lag
  std::vector<std::complex<double>> second;  // weight power 2
};

// Integrals over [-mu, 0] and [0, mu] are carried out in the angle variable u
// (omega = cos(theta_r) - cos(u), resp. cos(theta_l) - cos(u)), where the
// window becomes linear in u and the integrand is entire.
inline LagMoments lag_moments_at(int max_lag, const AngleRegion& region, const ArrayConfig& array,
                                 int panels) {
  LagMoments out{std::vector<std::complex<double>>(static_cast<std::size_t>(max_lag) + 1),
                 std::vector<std::complex<double>>(static_cast<std::size_t>(max_lag) + 1)};
  const double scale = kTwoPi / (region.width() * region.mu());
  const double kappa = kTwoPi * array.spacing();
  const auto nodes = composite_gauss_legendre(region.theta_l(), region.theta_r(), panels);

  auto accumulate = [&](double omega, double weight) {
    for (int k = 0; k <= max_lag; ++k) {
      const std::complex<double> e = std::polar(weight, kappa * k * omega);
      out.zeroth[static_cast<std::size_t>(k)] += e;
      out.second[static_cast<std::size_t>(k)] += omega * omega * e;
    }
  };
  for (const auto& n : nodes) {
    const double s = std::sin(n.x);
    accumulate(region.cos_r() - std::cos(n.x), scale * (n.x - region.theta_l()) * s * n.w);
    accumulate(region.cos_l() - std::cos(n.x), scale * (region.theta_r() - n.x) * s * n.w);
  }
  return out;
}

inline double max_abs_diff(const std::vector<std::complex<double>>& a,
                           const std::vector<std::complex<double>>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline LagMoments lag_moments(int max_lag, const AngleRegion& region, const ArrayConfig& array,
                              const QuadratureOptions& opts) {
  int panels = std::max(1, (opts.min_nodes + kNodesPerPanel - 1) / kNodesPerPanel);
  const int max_panels = std::max(panels, opts.max_nodes / kNodesPerPanel);
  LagMoments coarse = lag_moments_at(max_lag, region, array, panels);
  while (true) {
    panels *= 2;
    LagMoments fine = lag_moments_at(max_lag, region, array, panels);
    const double d0 = max_abs_diff(coarse.zeroth, fine.zeroth);
    const double d2 = max_abs_diff(coarse.second, fine.second);
    const bool ok0 = d0 <= opts.tol * std::abs(fine.zeroth[0]);
    const bool ok2 = d2 <= opts.tol * std::abs(fine.second[0]);
    if (ok0 && ok2) return fine;
    if (panels * 2 > max_panels) {
      const bool bad0 = !ok0;
      const auto& c = bad0 ? coarse.zeroth : coarse.second;
      const auto& f = bad0 ? fine.zeroth : fine.second;
      std::size_t worst = 0;
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (std::abs(c[k] - f[k]) > std::abs(c[worst] - f[worst])) worst = k;
      }
      throw QuadratureFailure("lag integral did not converge at lag " + std::to_string(worst),
                              std::abs(c[worst]), std::abs(f[worst]));
    }
    coarse = std::move(fine);
  }
}

}  // namespace detail

/// Integral of omega^p W(omega) e^{j 2 pi d lag omega} over [-mu, mu].
inline std::complex<double> lag_integral(int lag, int weight_power, const AngleRegion& region,
                                         const ArrayConfig& array, const QuadratureOptions& opts = {}) {
  if (weight_power != 0 && weight_power != 2) {
    throw InvalidArgument("weight_power must be 0 or 2");
  }
  const int m = array.m_antennas();
  if (lag <= -m || lag >= m) throw InvalidArgument("lag out of range for the array size");
  const int k = std::abs(lag);
  // Only lag |k| is needed; lags 0..k-1 come along for the convergence scale.
  const auto mom = detail::lag_moments(k, region, array, opts);
  const auto v = (weight_power == 0 ? mom.zeroth : mom.second)[static_cast<std::size_t>(k)];
  return lag < 0 ? std::conj(v) : v;
}

inline Eigen::MatrixXcd hermitian_toeplitz(const std::vector<std::complex<double>>& first_column) {
  const auto n = static_cast<Eigen::Index>(first_column.size());
  Eigen::MatrixXcd t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(i >= j ? i - j : j - i);
      t(i, j) = i >= j ? first_column[k] : std::conj(first_column[k]);
    }
    t(i, i) = first_column[0].real();
  }
  return t;
}

inline MomentMatrices build_moments(const AngleRegion& region, const ArrayConfig& array,
                                    const QuadratureOptions& opts = {}) {
  const int m = array.m_antennas();
  const auto mom = detail::lag_moments(m - 1, region, array, opts);
  HermitianPencil pencil;
  pencil.c0 = hermitian_toeplitz(mom.zeroth);
  pencil.c2 = hermitian_toeplitz(mom.second);
  pencil.lambda_max_c0 = largest_eigenvalue(pencil.c0);
  return MomentMatrices{std::move(pencil), region, array};
}

/// Row-major text dump: one matrix row per line, entries as "re,im".
inline void write_matrix(std::ostream& os, const Eigen::MatrixXcd& mat) {
  char buf[64];
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", mat(i, j).real(), mat(i, j).imag());
      if (j > 0) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

inline Eigen::MatrixXcd read_matrix(std::istream& is) {
  std::vector<std::vector<std::complex<double>>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::complex<double>> row;
    while (ls >> tok) {
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw InvalidArgument("matrix entry without ',': " + tok);
      row.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument("ragged matrix file");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXcd mat(static_cast<Eigen::Index>(rows.size()),
                       rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return mat;
}

}  // namespace dsopt
