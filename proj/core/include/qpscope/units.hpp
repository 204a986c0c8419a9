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

#include <cmath>

namespace qpscope {

// Energies are carried as frequencies E/h in GHz throughout the library and
// temperatures in kelvin. This is k_B/h in GHz per kelvin.
inline constexpr double kBoltzmannGhzPerKelvin = 20.836619;

inline constexpr double kHzPerGhz = 1.0e9;

// k_B T / h in GHz. Throws ParameterError for nonpositive temperature.
double kelvin_to_ghz(double temp_k);

// exp(x) with the result flushed to exactly zero below exp(-700), keeping
// products of tiny Boltzmann factors out of the subnormal range.
inline double safe_exp(double x) { return x < -700.0 ? 0.0 : std::exp(x); }

}  // namespace qpscope
