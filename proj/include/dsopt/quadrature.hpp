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

#include <array>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace dsopt {

struct QuadratureNode {
  double x;
  double w;
};

/// Composite Gauss-Legendre rule with `panels` equal panels of a fixed
/// 20-point rule on [a, b].
inline std::vector<QuadratureNode> composite_gauss_legendre(double a, double b, int panels) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& abscissa = rule::abscissa();
  const auto& weights = rule::weights();
  std::vector<QuadratureNode> nodes;
  nodes.reserve(static_cast<std::size_t>(panels) * 20);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      nodes.push_back({mid - half * abscissa[i], half * weights[i]});
      nodes.push_back({mid + half * abscissa[i], half * weights[i]});
    }
  }
  return nodes;
}

inline constexpr int kNodesPerPanel = 20;

}  // namespace dsopt
