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

#include "qpscope/device.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "qpscope/error.hpp"
#include "qpscope/units.hpp"

namespace qpscope {

double kelvin_to_ghz(double temp_k) {
  if (!(temp_k > 0.0)) {
    throw ParameterError("temperature must be positive, got " + std::to_string(temp_k));
  }
  return kBoltzmannGhzPerKelvin * temp_k;
}

const char* to_string(ThermalPrefactor p) {
  return p == ThermalPrefactor::gap_over_kt ? "gap_over_kt" : "standard";
}

ThermalPrefactor thermal_prefactor_from_string(const char* name) {
  if (std::strcmp(name, "gap_over_kt") == 0) return ThermalPrefactor::gap_over_kt;
  if (std::strcmp(name, "standard") == 0) return ThermalPrefactor::standard;
  throw ParameterError(std::string("thermal_prefactor must be 'gap_over_kt' or 'standard', got '") +
                       name + "'");
}

DeviceParams reference_device() {
  DeviceParams p;
  p.ej_ghz = 6.24;
  p.ec_ghz = 0.357;
  p.delta_ghz = 46.0;
  p.ddelta_ghz = 4.52;
  p.x_res = 5.6e-10;
  return p;
}

EnvConditions reference_environment() {
  EnvConditions env;
  env.temp_k = 0.020;
  env.gamma_offset = 0.14;
  return env;
}

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ParameterError(message);
}

}  // namespace

DeviceParams validate(const DeviceParams& p) {
  require(std::isfinite(p.ej_ghz) && p.ej_ghz > 0.0, "ej_ghz must be positive");
  require(std::isfinite(p.ec_ghz) && p.ec_ghz > 0.0, "ec_ghz must be positive");
  require(std::isfinite(p.delta_ghz) && p.delta_ghz > 0.0, "delta_ghz must be positive");
  require(std::isfinite(p.ddelta_ghz) && p.ddelta_ghz > 0.0, "ddelta_ghz must be positive");
  require(p.ddelta_ghz < p.delta_ghz, "gap difference exceeds gap");
  require(std::isfinite(p.x_res) && p.x_res >= 0.0, "x_res must be nonnegative");
  require(std::isfinite(p.vol_ratio) && p.vol_ratio > 0.0, "vol_ratio must be positive");
  require(std::isfinite(p.n_cp) && p.n_cp > 0.0, "n_cp must be positive");
  return p;
}

EnvConditions validate(const EnvConditions& env) {
  require(std::isfinite(env.temp_k) && env.temp_k > 0.0, "temp_k must be positive");
  require(std::isfinite(env.gamma_offset) && env.gamma_offset >= 0.0,
          "gamma_offset must be nonnegative");
  require(std::isfinite(env.f0_ghz) && env.f0_ghz > 0.0, "f0_ghz must be positive");
  require(std::isfinite(env.g0) && env.g0 >= 0.0, "g0 must be nonnegative");
  return env;
}

double josephson_coupling(const DeviceParams& p) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return p.ej_ghz / (pi2 * (p.delta_ghz + 0.5 * p.ddelta_ghz));
}

}  // namespace qpscope
