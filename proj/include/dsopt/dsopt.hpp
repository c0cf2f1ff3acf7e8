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

#include "errors.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "moments.hpp"
#include "metrics.hpp"
#include "qcqp.hpp"
#include "barrier.hpp"
#include "solvers.hpp"
#include "simulator.hpp"
#include "config.hpp"
#include "experiments.hpp"
