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

namespace qpscope {

// Selects the prefactor of the thermal term in the total QP density.
//   gap_over_kt: sqrt(Delta / (2 pi k_B T)) exp(-Delta / k_B T)
//   standard:    sqrt(2 pi k_B T / Delta) exp(-Delta / k_B T)   (BCS result)
// Only the thermal density is affected; the occupation function is not.
enum class ThermalPrefactor { gap_over_kt, standard };

const char* to_string(ThermalPrefactor p);
ThermalPrefactor thermal_prefactor_from_string(const char* name);

/// Junction and device constants. Energies are E/h in GHz.
struct DeviceParams {
  double ej_ghz = 0.0;      // Josephson energy
  double ec_ghz = 0.0;      // charging energy
  double delta_ghz = 0.0;   // low gap
  double ddelta_ghz = 0.0;  // gap difference across the junction
  double x_res = 0.0;       // resident QP density, units of Cooper-pair density
  double vol_ratio = 1.0;   // V(high-gap film) / V(low-gap film)
  double n_cp = 1.0e12;     // Cooper pairs in one low-gap pad film
  ThermalPrefactor thermal_prefactor = ThermalPrefactor::gap_over_kt;

  bool operator==(const DeviceParams&) const = default;
};

/// Bath and environment conditions.
struct EnvConditions {
  double temp_k = 0.0;
  double gamma_offset = 0.0;  // temperature-independent parity rate, s^-1
  double f0_ghz = 10.0;       // photon spectrum cutoff
  double g0 = 0.0;            // photon coupling scale, s^-1

  bool operator==(const EnvConditions&) const = default;
};

// The fitted device of the gap-asymmetric transmon experiment.
DeviceParams reference_device();

// Base-temperature environment with the measured saturation offset.
EnvConditions reference_environment();

// Returns params unchanged when every invariant holds; otherwise throws
// ParameterError naming the first violated invariant.
DeviceParams validate(const DeviceParams& params);
EnvConditions validate(const EnvConditions& env);

// t^2 nu_0^2 = E_J / (pi^2 (Delta + dDelta/2)), dimensionless.
double josephson_coupling(const DeviceParams& params);

}  // namespace qpscope
