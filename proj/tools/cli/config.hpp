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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpscope/device.hpp"
#include "qpscope/inference.hpp"
#include "qpscope/kinetics.hpp"
#include "qpscope/photon.hpp"
#include "qpscope/trace_sim.hpp"
#include "qpscope/tunneling.hpp"

namespace qpscope::cli {

struct SweepConfig {
  double t_min_k = 0.015;
  double t_max_k = 0.160;
  double t_step_k = 0.005;
  double arrhenius_min_k = 0.035;
  double arrhenius_max_k = 0.095;
};

struct PlanConfig {
  std::vector<double> temperatures_k = {0.020, 0.035, 0.050, 0.065, 0.080, 0.095};
  std::vector<double> p1 = {0.0, 0.1, 0.2, 0.3, 0.4};

  std::vector<PlanPoint> points() const;
};

struct PumpSweepConfig {
  double ratio = 37.0;
  double t1_s = 193e-6;
  double p_e_max = 0.5;
  int points = 51;
};

struct AnalysisConfig {
  int gmm_components = 5;
  std::size_t gmm_max_points = 60000;
};

struct RunConfig {
  DeviceParams device;
  EnvConditions env;
  ReadoutModel readout;
  KineticsParams kinetics;
  PlanConfig plan;
  SimulationOptions simulation;
  SweepConfig sweep;
  PumpSweepConfig pump;
  AnalysisConfig analysis;
  PhotonElements photon_elements = PhotonElements::closed_form;
  std::uint64_t seed = 0;
  std::string output_dir = "qpscope_out";

  double ng() const { return simulation.ng; }
  RateMethod method() const { return simulation.method; }
};

// Validates every section. Missing required fields, unknown keys, wrong types
// and invariant violations raise ParameterError with the dotted field path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_file(const std::filesystem::path& path);

// Canonical JSON of a parsed config, with every default filled in.
nlohmann::json to_json(const RunConfig& cfg);

// The device and environment of the reference experiment.
RunConfig default_config();

}  // namespace qpscope::cli
