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

#include "qpscope/kinetics.hpp"

#include <algorithm>
#include <cmath>

#include "qpscope/error.hpp"
#include "qpscope/qp_distribution.hpp"

namespace qpscope {

namespace {

void check_p1(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ParameterError("p1 must lie in [0, 1]");
}

double mix(double p1, double ground, double excited) { return (1.0 - p1) * ground + p1 * excited; }

}  // namespace

KineticsParams validate(const KineticsParams& kin) {
  if (!(kin.g >= 0.0)) throw ParameterError("g must be nonnegative");
  if (!(kin.s >= 0.0)) throw ParameterError("s must be nonnegative");
  if (!(kin.r >= 0.0)) throw ParameterError("r must be nonnegative");
  return kin;
}

DirectionalRates directional_rates(const TunnelingModel& model, double temp_k, RateMethod method) {
  const auto lr = Direction::left_to_right;
  const auto rl = Direction::right_to_left;
  return {model.state_rate(0, lr, temp_k, method), model.state_rate(0, rl, temp_k, method),
          model.state_rate(1, lr, temp_k, method), model.state_rate(1, rl, temp_k, method)};
}

double per_qp_rate(Direction dir, double p1, const DirectionalRates& rates,
                   const DeviceParams& params, double temp_k) {
  check_p1(p1);
  const double n_qp = params.n_cp * xqp_total(params, temp_k);
  if (!(n_qp > 0.0)) throw ParameterError("per-QP rate undefined without QPs");
  const double total = dir == Direction::left_to_right ? mix(p1, rates.g0_lr, rates.g1_lr)
                                                       : mix(p1, rates.g0_rl, rates.g1_rl);
  return total / n_qp;
}

double per_qp_rate(Direction dir, double p1, const DeviceParams& params, double ng,
                   double temp_k, RateMethod method) {
  const TunnelingModel model(params, ng);
  return per_qp_rate(dir, p1, directional_rates(model, temp_k, method), params, temp_k);
}

Densities steady_densities(const KineticsParams& kin, double gamma_lr, double gamma_rl) {
  validate(kin);
  const double denom = kin.s + gamma_lr + gamma_rl;
  if (!(denom > 0.0)) throw ParameterError("trapping plus tunneling rates must be positive");
  if (!(kin.s > 0.0)) throw ParameterError("steady densities need a positive trapping rate");
  const double base = kin.g / kin.s;
  const double skew = (gamma_lr - gamma_rl) / denom;
  return {base * (1.0 - skew), base * (1.0 + skew)};
}

std::array<double, 2> kinetic_rhs(const KineticsParams& kin, double gamma_lr, double gamma_rl,
                                  const Densities& x) {
  const double transfer = gamma_rl * x.x_r - gamma_lr * x.x_l;
  return {kin.g - kin.s * x.x_l - kin.r * x.x_l * x.x_l + transfer,
          kin.g - kin.s * x.x_r - kin.r * x.x_r * x.x_r - transfer};
}

double kinetic_parity_rate(double p1, const KineticsParams& kin, const DirectionalRates& rates,
                           const DeviceParams& params, double temp_k) {
  validate(kin);
  const double lr = per_qp_rate(Direction::left_to_right, p1, rates, params, temp_k);
  const double rl = per_qp_rate(Direction::right_to_left, p1, rates, params, temp_k);
  const double denom = kin.s + lr + rl;
  if (!(denom > 0.0)) throw ParameterError("trapping plus tunneling rates must be positive");
  const double x = xqp_total(params, temp_k);
  const double diff = lr - rl;
  return params.n_cp * x * (lr + rl - diff * diff / denom);
}

double linearity_deviation(const KineticsParams& kin, const DirectionalRates& rates,
                           const DeviceParams& params, double temp_k, int samples) {
  if (samples < 2) throw ParameterError("linearity_deviation needs at least two samples");
  const double start = kinetic_parity_rate(0.0, kin, rates, params, temp_k);
  const double end = kinetic_parity_rate(1.0, kin, rates, params, temp_k);
  double worst = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double p1 = static_cast<double>(j) / (samples - 1);
    const double chord = start + p1 * (end - start);
    if (chord <= 0.0) continue;
    const double value = kinetic_parity_rate(p1, kin, rates, params, temp_k);
    worst = std::max(worst, std::abs(value - chord) / chord);
  }
  return worst;
}

double n_cp_for_gamma_bound(const DirectionalRates& rates, const DeviceParams& params,
                            double temp_k, double gamma_max) {
  if (!(gamma_max > 0.0)) throw ParameterError("gamma_max must be positive");
  // Per-QP rates are affine in p1, so the maximum sits at an endpoint.
  const double peak = std::max({rates.g0_lr, rates.g0_rl, rates.g1_lr, rates.g1_rl});
  const double x = xqp_total(params, temp_k);
  if (!(x > 0.0)) throw ParameterError("n_cp scale undefined without QPs");
  return peak / (x * gamma_max);
}

}  // namespace qpscope
