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

#include "qpscope/qp_distribution.hpp"

#include <cmath>
#include <numbers>

#include "qpscope/error.hpp"
#include "qpscope/units.hpp"

namespace qpscope {

double zeta(const DeviceParams& params, double temp_k) {
  const double kt = kelvin_to_ghz(temp_k);
  return 1.0 / (1.0 + params.vol_ratio * safe_exp(-params.ddelta_ghz / kt));
}

QpState qp_state(const DeviceParams& params, double temp_k) {
  return {params.x_res, temp_k, zeta(params, temp_k)};
}

double xqp_thermal(const DeviceParams& params, double temp_k) {
  const double kt = kelvin_to_ghz(temp_k);
  const double d = params.delta_ghz;
  const double two_pi = 2.0 * std::numbers::pi;
  const double pref = params.thermal_prefactor == ThermalPrefactor::gap_over_kt
                          ? std::sqrt(d / (two_pi * kt))
                          : std::sqrt(two_pi * kt / d);
  return pref * safe_exp(-d / kt);
}

double xqp_total(const DeviceParams& params, double temp_k) {
  return params.x_res + xqp_thermal(params, temp_k);
}

double occupation_unchecked(double eps_ghz, const DeviceParams& params, double temp_k) {
  const double kt = kelvin_to_ghz(temp_k);
  const double d = params.delta_ghz;
  const double resident = zeta(params, temp_k) * params.x_res *
                          std::sqrt(d / (2.0 * std::numbers::pi * kt)) *
                          safe_exp(-(eps_ghz - d) / kt);
  return resident + safe_exp(-eps_ghz / kt);
}

double occupation_F(double eps_ghz, const DeviceParams& params, double temp_k) {
  if (!(eps_ghz >= params.delta_ghz)) throw ParameterError("QP energy below the gap");
  return occupation_unchecked(eps_ghz, params, temp_k);
}

double crossover_temperature(const DeviceParams& params, double lo_k, double hi_k) {
  if (!(params.x_res > 0.0)) throw ParameterError("crossover needs x_res > 0");
  auto excess = [&](double t) { return xqp_thermal(params, t) - params.x_res; };
  if (excess(lo_k) > 0.0 || excess(hi_k) < 0.0) {
    throw ParameterError("crossover temperature not bracketed");
  }
  for (int it = 0; it < 200 && hi_k - lo_k > 1e-12; ++it) {
    const double mid = 0.5 * (lo_k + hi_k);
    (excess(mid) < 0.0 ? lo_k : hi_k) = mid;
  }
  return 0.5 * (lo_k + hi_k);
}

}  // namespace qpscope
