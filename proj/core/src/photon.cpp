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

#include "qpscope/photon.hpp"

#include <cmath>

#include "qpscope/error.hpp"
#include "qpscope/units.hpp"

namespace qpscope {

namespace {

void check(const PhotonEnv& env) {
  if (!(env.f0_ghz > 0.0)) throw ParameterError("f0_ghz must be positive");
  if (!(env.g0 >= 0.0)) throw ParameterError("g0 must be nonnegative");
}

}  // namespace

PhotonEnv photon_env(const EnvConditions& env) { return {env.f0_ghz, env.g0}; }

const char* to_string(PhotonElements e) {
  return e == PhotonElements::closed_form ? "closed_form" : "transmon_limit";
}

PhotonElements photon_elements_from_string(const std::string& name) {
  if (name == "closed_form") return PhotonElements::closed_form;
  if (name == "transmon_limit") return PhotonElements::transmon_limit;
  throw ParameterError("photon elements must be closed_form or transmon_limit, got '" +
                       name + "'");
}

double photon_structure_factor(int sign, double f_fi_ghz, const PhotonEnv& env,
                               const DeviceParams& params) {
  check(env);
  if (sign != 1 && sign != -1) throw ParameterError("structure factor sign must be +1 or -1");
  const double plus = env.g0 * std::exp(-f_fi_ghz / env.f0_ghz);
  return sign > 0 ? plus : plus * env.f0_ghz / (2.0 * params.delta_ghz);
}

double photon_state_rate(int state, const PhotonEnv& env, const DeviceParams& params,
                         const TransmonLadder& ladder, PhotonElements elements) {
  check(env);
  if (state != 0 && state != 1) throw ParameterError("photon rates cover states 0 and 1");
  const double fq = ladder.frequency(0, 1);
  auto partial = [&](int i, int f) {
    MatrixElements me = approx_matrix_elements(params.ej_ghz, params.ec_ghz, i, f);
    double f_fi = ladder.frequency(i, f);
    if (elements == PhotonElements::closed_form && i == 1 && f == 2) {
      me = approx_matrix_elements(params.ej_ghz, params.ec_ghz, 0, 1);
      f_fi = fq;
    }
    return photon_structure_factor(-1, f_fi, env, params) * me.cos2 +
           photon_structure_factor(+1, f_fi, env, params) * me.sin2;
  };
  if (state == 0) return partial(0, 0) + partial(0, 1);
  return partial(1, 0) + partial(1, 1) + partial(1, 2);
}

double photon_state_rate(int state, const PhotonEnv& env, const DeviceParams& params, double ng,
                         PhotonElements elements) {
  const TransmonLadder ladder(params, ng, MatrixElementSource::approx);
  return photon_state_rate(state, env, params, ladder, elements);
}

double photon_ratio(const PhotonEnv& env, const DeviceParams& params, double ng) {
  check(env);
  const double fq = qubit_frequency(params, ng);
  const double h = env.f0_ghz / params.delta_ghz;
  const double r = std::sqrt(params.ec_ghz / (2.0 * params.ej_ghz));
  const double down = std::exp(-fq / env.f0_ghz);
  const double up = std::exp(fq / env.f0_ghz);
  return (h + r * down + r * up) / (h + r * down);
}

double calibrate_g0(double gamma_offset, double f0_ghz, const DeviceParams& params, double ng) {
  if (!(gamma_offset >= 0.0)) throw ParameterError("gamma_offset must be nonnegative");
  const double per_unit = photon_state_rate(0, PhotonEnv{f0_ghz, 1.0}, params, ng);
  return gamma_offset / per_unit;
}

}  // namespace qpscope
