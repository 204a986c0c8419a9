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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpscope/device.hpp"
#include "qpscope/tunneling.hpp"

namespace qpscope {

// Readout clusters are indexed like PumpState: |0,+>, |1,+>, |0,->, |1,->.
inline constexpr int kReadoutStates = 4;

int state_parity(int state);
int state_plasmon(int state);
int make_state(int plasmon, int parity);

/// Dispersive readout emulated as Gaussian clusters on a circle in the IQ
/// plane. The defaults are illustrative, not calibrated to a device.
struct ReadoutModel {
  std::array<double, kReadoutStates> cluster_angles = {0.0, 0.7, 3.1, 2.4};
  double radius = 1.0;
  double sigma = 0.25;
  double mis_prob_plus = 0.05;   // readout error given parity +1
  double mis_prob_minus = 0.01;  // readout error given parity -1

  double mis_prob(int parity) const { return parity == 1 ? mis_prob_plus : mis_prob_minus; }
  bool operator==(const ReadoutModel&) const = default;
};

ReadoutModel validate(const ReadoutModel& model);

/// Two-state parity path on [0, duration].
struct ParityPath {
  int initial_parity = 1;
  std::vector<double> switch_times;  // ascending
  double duration_s = 0.0;

  int parity_at(double t) const;
};

// gamma_pm is the rate of +1 -> -1, gamma_mp of -1 -> +1. The initial parity is
// drawn from the stationary distribution (uniform when both rates vanish).
ParityPath simulate_parity_path(double gamma_pm, double gamma_mp, double duration_s,
                                std::uint64_t seed);

struct TraceMeta {
  double temp_k = 0.0;
  double p1 = 0.0;
  double gamma_pm = 0.0;
  double gamma_mp = 0.0;
  std::uint64_t seed = 0;
};

/// Sampled readout record. truth_* are empty for measured data.
struct JumpTrace {
  double dt_s = 0.0;
  std::vector<double> i_quad;
  std::vector<double> q_quad;
  std::vector<std::int8_t> truth_parity;
  std::vector<std::int8_t> truth_plasmon;
  std::vector<std::uint8_t> misassigned;  // not serialized
  TraceMeta meta;

  std::size_t size() const { return i_quad.size(); }
  bool has_truth() const { return !truth_parity.empty(); }
};

// Samples at t = k dt for k < floor(duration/dt). Each sample reads the path
// parity, draws the plasmon from Bernoulli(p1), swaps the cluster for a
// uniformly chosen other one with probability mis_prob(parity), then adds
// isotropic Gaussian noise.
JumpTrace emit_readout(const ParityPath& path, double p1, const ReadoutModel& model, double dt_s,
                       double duration_s, std::uint64_t seed);

// Parity symbols read straight off the path, each flipped with probability
// err_p (true parity +1) or err_m (true parity -1).
std::vector<std::int8_t> emit_symbols(const ParityPath& path, double err_p, double err_m,
                                      double dt_s, double duration_s, std::uint64_t seed);

inline constexpr const char* kTraceHeader = "index,time_s,i_quad,q_quad";
inline constexpr const char* kTraceTruthColumns = ",truth_parity,truth_plasmon";

void write_trace_csv(std::ostream& os, const JumpTrace& trace, bool include_truth);
// Reads the format above. dt is taken from the first two time stamps.
JumpTrace read_trace_csv(std::istream& is);

struct PlanPoint {
  double temp_k = 0.0;
  double p1 = 0.0;
};

struct SimulationOptions {
  int n_traces = 10;
  double duration_s = 30.0;
  double dt_s = 2e-3;
  double ng = kDefaultNg;
  RateMethod method = RateMethod::automatic;
};

struct PointTruth {
  PlanPoint point;
  double gamma0 = 0.0;  // including offset
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma = 0.0;   // effective symmetric parity rate
};

struct Dataset {
  std::vector<PointTruth> points;
  std::vector<std::vector<JumpTrace>> traces;  // [point][trace]
  std::uint64_t seed = 0;
  SimulationOptions options;
};

// Per plan point: state rates plus offset, the effective rate at p1, and
// n_traces independent traces with symmetric switching at that rate. Trace
// (k, j) uses substreams indexed by (k, j), so output is schedule-independent.
Dataset simulate_experiment(const std::vector<PlanPoint>& plan, const DeviceParams& params,
                            const EnvConditions& env, const ReadoutModel& model,
                            std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace qpscope
