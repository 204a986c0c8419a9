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

#include "qpscope/special_functions.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "qpscope/error.hpp"

namespace qpscope {

namespace {

// Below this argument K_n(z) is comfortably representable.
constexpr double kDirectLimit = 600.0;

// Hankel expansion e^z K_nu(z) ~ sqrt(pi/2z) sum_k a_k(nu) / z^k, truncated at
// the smallest term. At z >= 600 the first few terms reach 1e-16.
double asymptotic_scaled_k(int nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * z);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * z)) * sum;
}

double scaled_k(int nu, double z) {
  if (!(z > 0.0)) throw NumericError("Bessel K argument must be positive");
  if (z < kDirectLimit) return std::exp(z) * boost::math::cyl_bessel_k(nu, z);
  return asymptotic_scaled_k(nu, z);
}

}  // namespace

double scaled_bessel_k0(double z) { return scaled_k(0, z); }
double scaled_bessel_k1(double z) { return scaled_k(1, z); }

}  // namespace qpscope
