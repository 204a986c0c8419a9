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

#include "qpscope/tunneling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpscope/error.hpp"
#include "qpscope/qp_distribution.hpp"
#include "qpscope/quadrature.hpp"
#include "qpscope/special_functions.hpp"
#include "qpscope/units.hpp"

namespace qpscope {

namespace {

constexpr double kQuadRelTol = 1e-8;
constexpr double kCutoffKt = 60.0;

double numeric_structure_factor(Direction dir, int sign, double f, const DeviceParams& p,
                                double temp_k) {
  const double kt = kelvin_to_ghz(temp_k);
  const double d1 = p.delta_ghz;
  const double d2 = p.delta_ghz + p.ddelta_ghz;
  // Write both directions as an integral over the low-gap energy e with the
  // high-gap energy e2 = e - f (L->R) or e2 = e + f (R->L).
  const double shift = dir == Direction::left_to_right ? -f : f;
  const double threshold2 = d2 - shift;  // e at which e2 reaches Delta + dDelta
  const double lo = std::max(d1, threshold2);
  // Offsets of e - Delta and e2 - (Delta + dDelta) at the lower limit. One is
  // exactly zero; forming it as a difference would leave rounding residue.
  const double gap1 = d1 >= threshold2 ? 0.0 : threshold2 - d1;
  const double gap2 = d1 >= threshold2 ? d1 - threshold2 : 0.0;
  if (gap1 == 0.0 && gap2 == 0.0) {
    throw NumericError("structure factor diverges when f_fi equals the gap difference");
  }
  const bool singular_low = gap1 == 0.0;

  auto integrand = [&](double u) {
    const double u2 = u * u;
    const double x1 = gap1 + u2;
    const double x2 = gap2 + u2;
    const double e = lo + u2;
    const double e2 = e + shift;
    const double coherence = e * e2 + sign * d1 * d2;
    // 2u / sqrt(x) collapses to 2 on the singular side.
    double jac;
    if (singular_low) {
      jac = 2.0 / (std::sqrt(x1 + 2.0 * d1) * std::sqrt(x2 * (x2 + 2.0 * d2)));
    } else {
      jac = 2.0 / (std::sqrt(x1 * (x1 + 2.0 * d1)) * std::sqrt(x2 + 2.0 * d2));
    }
    double occupation;
    if (dir == Direction::left_to_right) {
      occupation = occupation_unchecked(e, p, temp_k) * (1.0 - occupation_unchecked(e2, p, temp_k));
    } else {
      occupation = occupation_unchecked(e2, p, temp_k) * (1.0 - occupation_unchecked(e, p, temp_k));
    }
    return coherence * jac * occupation;
  };
  const QuadratureResult r =
      integrate_gk15(integrand, 0.0, std::sqrt(kCutoffKt * kt), kQuadRelTol);
  return r.value / (d1 + 0.5 * p.ddelta_ghz);
}

double bessel_structure_factor(Direction dir, int sign, double f, const DeviceParams& p,
                               double temp_k) {
  if (!bessel_regime(p, f)) {
    throw ParameterError("bessel closed form requires ddelta_ghz > |f_fi|");
  }
  const double kt = kelvin_to_ghz(temp_k);
  const double d = p.delta_ghz;
  const double dd = p.ddelta_ghz;
  const double amplitude = zeta(p, temp_k) * p.x_res * std::sqrt(d / (2.0 * std::numbers::pi * kt)) +
                           safe_exp(-d / kt);
  const double a = dir == Direction::left_to_right ? dd + f : dd - f;
  const double z = a / (2.0 * kt);
  const double boltzmann = safe_exp(-(dd + f) / (2.0 * kt) - z);
  if (sign > 0) return amplitude * boltzmann * scaled_bessel_k0(z);
  return amplitude * 0.5 * (a / d) * boltzmann * scaled_bessel_k1(z);
}

double approx_partial(int i, int f, Direction dir, const DeviceParams& p, double f_fi,
                      double temp_k) {
  const double kt = kelvin_to_ghz(temp_k);
  const double dd = p.ddelta_ghz;
  const double scale = p.ej_ghz * kHzPerGhz * p.x_res;
  if (i == f) {
    return 16.0 * scale * std::sqrt(dd / (8.0 * p.delta_ghz)) * safe_exp(-dd / kt);
  }
  if (std::abs(i - f) != 1) {
    throw ParameterError("approximate rates cover only transitions with |i - f| <= 1");
  }
  if (!(dd > std::abs(f_fi))) {
    throw ParameterError("approximate rates require ddelta_ghz > |f_fi|");
  }
  const int m = std::max(i, f);
  const double pref = 4.0 * m * scale * std::sqrt(2.0 * p.ec_ghz / p.ej_ghz) *
                      std::sqrt(0.5 * p.delta_ghz);
  if (dir == Direction::left_to_right) {
    return pref * safe_exp(-(dd + f_fi) / kt) / std::sqrt(dd + f_fi);
  }
  return pref * safe_exp(-dd / kt) / std::sqrt(dd - f_fi);
}

void check_sign(int sign) {
  if (sign != 1 && sign != -1) throw ParameterError("structure factor sign must be +1 or -1");
}

}  // namespace

const char* to_string(Direction d) {
  return d == Direction::left_to_right ? "L->R" : "R->L";
}

const char* to_string(RateMethod m) {
  switch (m) {
    case RateMethod::numeric: return "numeric";
    case RateMethod::bessel: return "bessel";
    case RateMethod::approx: return "approx";
    case RateMethod::automatic: return "automatic";
  }
  return "?";
}

const char* to_string(MatrixElementSource s) {
  return s == MatrixElementSource::numeric ? "numeric" : "approx";
}

RateMethod rate_method_from_string(const std::string& name) {
  if (name == "numeric") return RateMethod::numeric;
  if (name == "bessel") return RateMethod::bessel;
  if (name == "approx") return RateMethod::approx;
  if (name == "automatic" || name == "auto") return RateMethod::automatic;
  throw ParameterError("method must be numeric, bessel, approx or automatic, got '" + name + "'");
}

MatrixElementSource matrix_element_source_from_string(const std::string& name) {
  if (name == "numeric") return MatrixElementSource::numeric;
  if (name == "approx") return MatrixElementSource::approx;
  throw ParameterError("matrix element source must be numeric or approx, got '" + name + "'");
}

bool bessel_regime(const DeviceParams& params, double f_fi_ghz) {
  return params.ddelta_ghz > std::abs(f_fi_ghz);
}

double structure_factor(Direction dir, int sign, double f_fi_ghz, const DeviceParams& params,
                        double temp_k, RateMethod method) {
  check_sign(sign);
  validate(params);
  if (method == RateMethod::automatic) {
    method = bessel_regime(params, f_fi_ghz) ? RateMethod::bessel : RateMethod::numeric;
  }
  switch (method) {
    case RateMethod::numeric:
      return numeric_structure_factor(dir, sign, f_fi_ghz, params, temp_k);
    case RateMethod::bessel:
      return bessel_structure_factor(dir, sign, f_fi_ghz, params, temp_k);
    default:
      throw ParameterError("structure factors are computed by the numeric or bessel method");
  }
}

TransmonLadder::TransmonLadder(const DeviceParams& params, double ng, MatrixElementSource source)
    : ng_(ng), source_(source) {
  const Spectrum plus = spectrum(params, ng, 1, kLevels);
  const Spectrum minus = spectrum(params, ng, -1, kLevels);
  for (int k = 0; k < kLevels; ++k) {
    levels_[k] = 0.5 * ((plus.levels[k] - plus.levels[0]) + (minus.levels[k] - minus.levels[0]));
  }
  for (int i = 0; i < kLevels; ++i) {
    for (int f = 0; f < kLevels; ++f) {
      if (source == MatrixElementSource::approx) {
        elements_[i][f] = approx_matrix_elements(params.ej_ghz, params.ec_ghz, i, f);
      } else {
        const MatrixElements a = matrix_elements_between(plus, minus, i, f);
        const MatrixElements b = matrix_elements_between(minus, plus, i, f);
        elements_[i][f] = {0.5 * (a.cos2 + b.cos2), 0.5 * (a.sin2 + b.sin2)};
      }
    }
  }
}

MatrixElements TransmonLadder::elements(int i, int f) const {
  if (i < 0 || f < 0 || i >= kLevels || f >= kLevels) {
    throw ParameterError("transition outside the cached transmon ladder");
  }
  return elements_[i][f];
}

std::vector<int> final_levels(int state) {
  switch (state) {
    case 0: return {0, 1};
    case 1: return {0, 1, 2};
    case 2: return {1, 2, 3};
    default: throw ParameterError("state must be 0, 1 or 2");
  }
}

TunnelingModel::TunnelingModel(const DeviceParams& params, double ng, MatrixElementSource source)
    : params_(validate(params)), ladder_(params, ng, source) {}

TunnelingModel::TunnelingModel(const DeviceParams& params, TransmonLadder ladder)
    : params_(validate(params)), ladder_(std::move(ladder)) {}

RateMethod TunnelingModel::resolve(RateMethod method) const {
  if (method != RateMethod::automatic) return method;
  for (int state = 0; state <= 2; ++state) {
    for (int f : final_levels(state)) {
      if (!bessel_regime(params_, ladder_.frequency(state, f))) return RateMethod::numeric;
    }
  }
  return RateMethod::bessel;
}

double TunnelingModel::partial_rate(int i, int f, Direction dir, double temp_k,
                                    RateMethod method) const {
  method = resolve(method);
  const double f_fi = ladder_.frequency(i, f);
  if (method == RateMethod::approx) return approx_partial(i, f, dir, params_, f_fi, temp_k);
  const MatrixElements me = ladder_.elements(i, f);
  double rate = 0.0;
  if (me.cos2 > 0.0) {
    rate += structure_factor(dir, -1, f_fi, params_, temp_k, method) * me.cos2;
  }
  if (me.sin2 > 0.0) {
    rate += structure_factor(dir, +1, f_fi, params_, temp_k, method) * me.sin2;
  }
  return 16.0 * params_.ej_ghz * kHzPerGhz * rate;
}

double TunnelingModel::state_rate(int state, Direction dir, double temp_k,
                                  RateMethod method) const {
  double total = 0.0;
  for (int f : final_levels(state)) total += partial_rate(state, f, dir, temp_k, method);
  return total;
}

double TunnelingModel::state_rate(int state, double temp_k, RateMethod method) const {
  return state_rate(state, Direction::left_to_right, temp_k, method) +
         state_rate(state, Direction::right_to_left, temp_k, method);
}

RateBundle TunnelingModel::rates(double temp_k, RateMethod method) const {
  RateBundle b;
  b.method = resolve(method);
  b.temp_k = temp_k;
  double totals[3] = {0.0, 0.0, 0.0};
  for (int state = 0; state <= 2; ++state) {
    for (int f : final_levels(state)) {
      for (Direction dir : {Direction::left_to_right, Direction::right_to_left}) {
        const double r = partial_rate(state, f, dir, temp_k, b.method);
        b.partials[{state, f, dir}] = r;
        totals[state] += r;
      }
    }
  }
  b.gamma0 = totals[0];
  b.gamma1 = totals[1];
  b.gamma2 = totals[2];
  return b;
}

double partial_rate(int i, int f, Direction dir, const DeviceParams& params, double ng,
                    double temp_k, RateMethod method, MatrixElementSource source) {
  return TunnelingModel(params, ng, source).partial_rate(i, f, dir, temp_k, method);
}

double state_rate(int state, const DeviceParams& params, double ng, double temp_k,
                  RateMethod method) {
  return TunnelingModel(params, ng).state_rate(state, temp_k, method);
}

double eta_prefactor(const DeviceParams& params, double f_q_ghz) {
  const double gap = params.ddelta_ghz - f_q_ghz;
  if (!(gap > 0.0)) throw ParameterError("activation laws require ddelta_ghz > f_q");
  return 4.0 * std::sqrt(params.ej_ghz / params.ec_ghz * params.ddelta_ghz / params.delta_ghz) +
         std::sqrt(2.0 * params.delta_ghz / gap);
}

double approx_state_rate(int state, const DeviceParams& params, double temp_k, double ng) {
  validate(params);
  const double fq = qubit_frequency(params, ng);
  const double kt = kelvin_to_ghz(temp_k);
  const double x = xqp_total(params, temp_k);
  const double gap = params.ddelta_ghz - fq;
  if (!(gap > 0.0)) throw ParameterError("activation laws require ddelta_ghz > f_q");
  const double fq_hz = fq * kHzPerGhz;
  switch (state) {
    case 0:
      return eta_prefactor(params, fq) * fq_hz * x * safe_exp(-params.ddelta_ghz / kt);
    case 1:
      return fq_hz * std::sqrt(2.0 * params.delta_ghz / gap) * x * safe_exp(-gap / kt);
    default:
      throw ParameterError("approx_state_rate covers states 0 and 1");
  }
}

bool approx_regime(const DeviceParams& params, double temp_k, double ng) {
  const double gap = params.ddelta_ghz - qubit_frequency(params, ng);
  return gap > 0.0 && kelvin_to_ghz(temp_k) <= 0.1 * gap;
}

double gamma2_weight(double f21_ghz, double temp_k) {
  const double w = safe_exp(-f21_ghz / kelvin_to_ghz(temp_k));
  return w / (1.0 + w);
}

double effective_rate(double p_exc, double gamma0, double gamma1, double gamma2,
                      double f21_ghz, double temp_k) {
  if (!(p_exc >= 0.0 && p_exc <= 1.0)) throw ParameterError("p_exc must lie in [0, 1]");
  const double w = safe_exp(-f21_ghz / kelvin_to_ghz(temp_k));
  if (w < 1e-6) return (1.0 - p_exc) * gamma0 + p_exc * gamma1;
  return (1.0 - p_exc) * gamma0 + p_exc * (gamma1 + w * gamma2) / (1.0 + w);
}

double effective_rate(double p_exc, const TunnelingModel& model, const EnvConditions& env,
                      RateMethod method) {
  validate(env);
  const double off = env.gamma_offset;
  const double t = env.temp_k;
  const double g0 = model.state_rate(0, t, method) + off;
  if (p_exc == 0.0) return g0;
  const double g1 = model.state_rate(1, t, method) + off;
  const double f21 = model.ladder().frequency(1, 2);
  const double w = safe_exp(-f21 / kelvin_to_ghz(t));
  const double g2 = w < 1e-6 ? 0.0 : model.state_rate(2, t, method) + off;
  return effective_rate(p_exc, g0, g1, g2, f21, t);
}

double no_gap_ratio(const DeviceParams& params, double temp_k, double ng) {
  const double fq = qubit_frequency(params, ng);
  const double kt = kelvin_to_ghz(temp_k);
  const double d = params.delta_ghz;
  return std::sqrt(std::numbers::pi * d * d / (fq * kt)) *
         std::sqrt(params.ec_ghz / (8.0 * params.ej_ghz));
}

}  // namespace qpscope
