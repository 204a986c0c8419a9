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
#include "qpscope/tunneling.hpp"

namespace qpscope {

struct PhotonEnv {
  double f0_ghz = 10.0;  // cutoff of the filtered photon spectrum
  double g0 = 0.0;       // overall scale, s^-1
};

PhotonEnv photon_env(const EnvConditions& env);

// How the excited-state photon rate is assembled from partial rates.
//   closed_form: the 1->2 term enters with the 0->1 element and f_q,
//     which is the algebra behind the closed-form ratio.
//   transmon_limit: every element from approx_matrix_elements, including the
//     factor 2 on 1->2, and the actual f21.
enum class PhotonElements { closed_form, transmon_limit };

const char* to_string(PhotonElements e);
PhotonElements photon_elements_from_string(const std::string& name);

// S+ = g0 exp(-f/f0), S- = S+ f0 / (2 Delta).
double photon_structure_factor(int sign, double f_fi_ghz, const PhotonEnv& env,
                               const DeviceParams& params);

// Gamma_0^ph = Gamma_00 + Gamma_01 and Gamma_1^ph = Gamma_10 + Gamma_11 + Gamma_12.
double photon_state_rate(int state, const PhotonEnv& env, const DeviceParams& params,
                         const TransmonLadder& ladder,
                         PhotonElements elements = PhotonElements::closed_form);
double photon_state_rate(int state, const PhotonEnv& env, const DeviceParams& params,
                         double ng = kDefaultNg,
                         PhotonElements elements = PhotonElements::closed_form);

// Closed-form Gamma_1^ph / Gamma_0^ph. Independent of g0.
double photon_ratio(const PhotonEnv& env, const DeviceParams& params, double ng = kDefaultNg);

// g0 for which Gamma_0^ph equals gamma_offset.
double calibrate_g0(double gamma_offset, double f0_ghz, const DeviceParams& params,
                    double ng = kDefaultNg);

}  // namespace qpscope
