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

#include <stdexcept>
#include <string>

namespace dsopt {

// Bad user-supplied arguments (region outside (0, pi), zero budget, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its accuracy target.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Composite quadrature did not settle; carries the last two estimates.
class QuadratureFailure : public NumericalFailure {
 public:
  QuadratureFailure(const std::string& what, double coarse, double fine)
      : NumericalFailure(what), coarse_(coarse), fine_(fine) {}

  double coarse() const noexcept { return coarse_; }
  double fine() const noexcept { return fine_; }

 private:
  double coarse_;
  double fine_;
};

// The feasible set of a (sub)problem is empty.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The weight vector radiates (numerically) nothing into the angle region.
class DegenerateBeam : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Reading or writing a file failed; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dsopt
