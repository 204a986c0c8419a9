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

#include <array>

#include "qpscope/device.hpp"
#include "qpscope/tunneling.hpp"

namespace qpscope {

/// Symmetric-pad generation, trapping and recombination constants.
struct KineticsParams {
  double g = 0.0;    // generation, s^-1 in units of x
  double s = 10.0;   // trapping, s^-1
  double r = 1.0e7;  // recombination, s^-1 per unit x
};

KineticsParams validate(const KineticsParams& kin);

/// Directional QP tunneling totals for the ground and first excited states.
struct DirectionalRates {
  double g0_lr = 0.0;
  double g0_rl = 0.0;
  double g1_lr = 0.0;
  double g1_rl = 0.0;
};

DirectionalRates directional_rates(const TunnelingModel& model, double temp_k, RateMethod method);

// Rate per QP, ((1 - p1) Gamma_0^dir + p1 Gamma_1^dir) / (n_cp x_qp).
double per_qp_rate(Direction dir, double p1, const DirectionalRates& rates,
                   const DeviceParams& params, double temp_k);
double per_qp_rate(Direction dir, double p1, const DeviceParams& params, double ng,
                   double temp_k, RateMethod method = RateMethod::automatic);

struct Densities {
  double x_l = 0.0;
  double x_r = 0.0;
};

// Steady state without recombination:
//   x_R/L = (g/s)(1 +- (gamma_lr - gamma_rl)/(s + gamma_lr + gamma_rl)).
Densities steady_densities(const KineticsParams& kin, double gamma_lr, double gamma_rl);

// Right-hand side of the two-pad rate equations, recombination included.
std::array<double, 2> kinetic_rhs(const KineticsParams& kin, double gamma_lr, double gamma_rl,
                                  const Densities& x);

// Parity rate from QP tunneling with pad densities out of balance, in s^-1:
//   n_cp x_qp (gamma_rl + gamma_lr - (gamma_lr - gamma_rl)^2 / (s + gamma_lr + gamma_rl)).
// The generation rate is set to s x_qp so the total QP number stays at its
// equilibrium value for every p1.
double kinetic_parity_rate(double p1, const KineticsParams& kin, const DirectionalRates& rates,
                           const DeviceParams& params, double temp_k);

// max over p1 in [0, 1] of |Gamma(p1) - chord(p1)| / chord(p1), on `samples`
// evenly spaced points.
double linearity_deviation(const KineticsParams& kin, const DirectionalRates& rates,
                           const DeviceParams& params, double temp_k, int samples = 1001);

// Cooper-pair count that puts the largest per-QP rate over p1 in [0, 1] at
// gamma_max.
double n_cp_for_gamma_bound(const DirectionalRates& rates, const DeviceParams& params,
                            double temp_k, double gamma_max);

}  // namespace qpscope
