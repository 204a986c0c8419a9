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
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qpscope/device.hpp"
#include "qpscope/transmon.hpp"

namespace qpscope {

enum class Direction { left_to_right, right_to_left };

// numeric: quadrature of the structure-factor integrals.
// bessel: K0/K1 closed forms, valid for dDelta > |f_fi|.
// approx: leading-order activation laws with transmon-limit elements.
// automatic: bessel when every transition used is inside its regime, else
// numeric.
enum class RateMethod { numeric, bessel, approx, automatic };

enum class MatrixElementSource { numeric, approx };

inline constexpr double kDefaultNg = 0.163;

const char* to_string(Direction d);
const char* to_string(RateMethod m);
const char* to_string(MatrixElementSource s);
RateMethod rate_method_from_string(const std::string& name);
MatrixElementSource matrix_element_source_from_string(const std::string& name);

// True when the closed forms apply: dDelta > |f_fi|.
bool bessel_regime(const DeviceParams& params, double f_fi_ghz);

// Dimensionless structure factor S_sign^dir(f_fi). `sign` is +1 or -1 and
// `method` is numeric, bessel or automatic.
double structure_factor(Direction dir, int sign, double f_fi_ghz, const DeviceParams& params,
                        double temp_k, RateMethod method);

/// Parity-averaged levels 0..3 and the matrix elements of every transition
/// that enters the state rates. Depends on E_J, E_C and ng only.
class TransmonLadder {
 public:
  static constexpr int kLevels = 4;

  TransmonLadder(const DeviceParams& params, double ng, MatrixElementSource source);

  double ng() const { return ng_; }
  MatrixElementSource source() const { return source_; }
  double level(int k) const { return levels_.at(k); }
  // f_fi = E_f - E_i in GHz.
  double frequency(int i, int f) const { return level(f) - level(i); }
  MatrixElements elements(int i, int f) const;

 private:
  double ng_;
  MatrixElementSource source_;
  std::array<double, kLevels> levels_{};
  std::array<std::array<MatrixElements, kLevels>, kLevels> elements_{};
};

struct PartialKey {
  int i;
  int f;
  Direction dir;
  auto operator<=>(const PartialKey&) const = default;
};

/// Partial and state rates at one temperature. Rates are QP-only, in s^-1.
struct RateBundle {
  std::map<PartialKey, double> partials;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  RateMethod method = RateMethod::numeric;
  double temp_k = 0.0;
};

// Final levels summed for the state rate of level n: {0,1}, {0,1,2}, {1,2,3}.
std::vector<int> final_levels(int state);

class TunnelingModel {
 public:
  TunnelingModel(const DeviceParams& params, double ng = kDefaultNg,
                 MatrixElementSource source = MatrixElementSource::numeric);
  TunnelingModel(const DeviceParams& params, TransmonLadder ladder);

  const DeviceParams& params() const { return params_; }
  const TransmonLadder& ladder() const { return ladder_; }

  // Maps automatic to numeric or bessel for this device; other values pass.
  RateMethod resolve(RateMethod method) const;

  double partial_rate(int i, int f, Direction dir, double temp_k, RateMethod method) const;
  // Sum over both directions of the partials leaving `state`.
  double state_rate(int state, double temp_k, RateMethod method) const;
  // Same sum restricted to one tunneling direction.
  double state_rate(int state, Direction dir, double temp_k, RateMethod method) const;
  RateBundle rates(double temp_k, RateMethod method) const;

 private:
  DeviceParams params_;
  TransmonLadder ladder_;
};

double partial_rate(int i, int f, Direction dir, const DeviceParams& params, double ng,
                    double temp_k, RateMethod method,
                    MatrixElementSource source = MatrixElementSource::numeric);

double state_rate(int state, const DeviceParams& params, double ng, double temp_k,
                  RateMethod method);

// eta = 4 sqrt((E_J/E_C)(dDelta/Delta)) + sqrt(2 Delta / (dDelta - f_q)).
double eta_prefactor(const DeviceParams& params, double f_q_ghz);

// Activation laws for the ground (state 0) and first excited (state 1) rates
// using the total QP density. Throws ParameterError when dDelta <= f_q.
double approx_state_rate(int state, const DeviceParams& params, double temp_k,
                         double ng = kDefaultNg);

// True when kT is at most a tenth of dDelta - f_q, where the activation laws
// are expected to hold.
bool approx_regime(const DeviceParams& params, double temp_k, double ng = kDefaultNg);

// Boltzmann weight of level 2 relative to level 1 among excited states,
// w / (1 + w) with w = exp(-f21/kT).
double gamma2_weight(double f21_ghz, double temp_k);

// (1 - p) G0 + p (G1 + w G2)/(1 + w), w = exp(-f21/kT). The rates are taken
// as given; the linear form is used once w < 1e-6.
double effective_rate(double p_exc, double gamma0, double gamma1, double gamma2,
                      double f21_ghz, double temp_k);

// Same with state rates from the model, each shifted by env.gamma_offset.
double effective_rate(double p_exc, const TunnelingModel& model, const EnvConditions& env,
                      RateMethod method);

// Ratio of excited to ground rates predicted without a gap difference:
// sqrt(pi Delta^2 / (f_q kT)) sqrt(E_C / 8 E_J).
double no_gap_ratio(const DeviceParams& params, double temp_k, double ng = kDefaultNg);

}  // namespace qpscope
