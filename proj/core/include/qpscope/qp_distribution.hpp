// Copyright 2026 The qpscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qpscope/device.hpp"

namespace qpscope {

struct QpState {
  double x_res = 0.0;
  double temp_k = 0.0;
  double zeta = 1.0;
};

QpState qp_state(const DeviceParams& params, double temp_k);

// Total QP density: x_res plus the thermal term. The prefactor of the thermal
// term follows params.thermal_prefactor.
double xqp_total(const DeviceParams& params, double temp_k);

// Only the thermal part of xqp_total.
double xqp_thermal(const DeviceParams& params, double temp_k);

// Fraction of QPs in the low-gap film, 1 / (1 + vol_ratio exp(-dDelta/kT)).
double zeta(const DeviceParams& params, double temp_k);

// Occupation of a QP state at energy eps_ghz >= delta_ghz:
//   zeta x_res sqrt(Delta / 2 pi kT) exp(-(eps - Delta)/kT) + exp(-eps/kT).
// The resident prefactor here is always sqrt(Delta / 2 pi kT).
double occupation_F(double eps_ghz, const DeviceParams& params, double temp_k);

// Same as occupation_F without the lower bound on eps. Used inside the
// structure-factor integrands, which evaluate F only above the gap but may
// round to just below it.
double occupation_unchecked(double eps_ghz, const DeviceParams& params, double temp_k);

// Temperature at which the thermal term equals x_res, found by bisection on
// [lo_k, hi_k]. Throws ParameterError if x_res is zero or not bracketed.
double crossover_temperature(const DeviceParams& params, double lo_k = 0.01, double hi_k = 1.0);

}  // namespace qpscope
