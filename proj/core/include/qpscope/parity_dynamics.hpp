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

#include <vector>

#include <Eigen/Core>

namespace qpscope {

// State order of the pumping chain.
enum PumpState : int { kGroundPlus = 0, kExcitedPlus = 1, kGroundMinus = 2, kExcitedMinus = 3 };

struct PumpConfig {
  int drive_parity = 1;          // sector whose qubit line is driven
  double p_e_conditional = 0.0;  // stationary excitation given the driven parity
  double gamma0 = 0.14;          // parity flip rate from |0,P>, s^-1
  double gamma1 = 0.14 * 37.0;   // parity flip rate from |1,P>, s^-1
  double t1_s = 193e-6;          // qubit relaxation time
};

PumpConfig validate(const PumpConfig& cfg);

// Generator Q with dp/dt = Q p; Q(to, from) holds the rate from -> to and each
// column sums to zero. The driven sector is pumped up at
// Gamma_up = p_e / ((1 - p_e) T1); both sectors relax at 1/T1. Parity flips
// land in the ground state of the other sector.
Eigen::Matrix4d pump_rate_matrix(const PumpConfig& cfg);

// Stationary distribution of a CTMC generator. Throws NumericError when the
// null space is not one-dimensional.
Eigen::VectorXd steady_state(const Eigen::MatrixXd& generator);

// Rate-equation polarization 1/2 (1 - (r - 1) p_e / (2 + (r - 1) p_e)).
double pump_polarization(double ratio, double p_e);

// Total population of the driven sector, the quantity the closed form above
// describes when flips are slow compared with 1/T1.
double driven_parity_population(const PumpConfig& cfg);

// Population of |0,-1>.
double ground_minus_population(const PumpConfig& cfg);

struct PumpFit {
  double ratio = 0.0;
  double sigma = 0.0;
  double rss = 0.0;
};

// Least-squares fit of pump_polarization(ratio, p_e) to (p_e, p) pairs.
PumpFit fit_pump_ratio(const std::vector<double>& p_e, const std::vector<double>& p);

}  // namespace qpscope
