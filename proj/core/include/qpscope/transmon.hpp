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

#include "qpscope/device.hpp"

namespace qpscope {

/// Eigenstates of the transmon in one charge-parity sector.
///
/// The Hamiltonian is 4 E_C (N - n_g + P/4)^2 - (E_J/2)(|N><N+1| + h.c.) on
/// integer N. Row r of `eigvecs` holds the amplitude on N = n_min + r.
struct Spectrum {
  double ng = 0.0;
  int parity = 1;
  std::vector<double> levels;  // GHz, ascending, absolute
  Eigen::MatrixXd eigvecs;     // column k is level k
  int n_charge = 0;            // basis half-width
  int n_min = 0;               // charge of row 0

  // Amplitude of level k on integer charge n, zero outside the basis.
  double amplitude(int k, int n) const;
};

struct MatrixElements {
  double cos2 = 0.0;  // |<f|cos(phi/2)|i>|^2
  double sin2 = 0.0;  // |<f|sin(phi/2)|i>|^2
};

// Diagonalizes one parity sector. The basis starts at |N - round(ng_eff)| <= 15
// and grows by 5 until the lowest max(4, n_levels) levels move by less than
// 1 kHz. Throws NumericError if 200 is reached without convergence.
Spectrum spectrum(const DeviceParams& params, double ng, int parity, int n_levels);

// Level energies relative to the ground state, averaged over both parities.
std::vector<double> averaged_levels(const DeviceParams& params, double ng, int n_levels);

// Parity-averaged f01.
double qubit_frequency(const DeviceParams& params, double ng);

// Peak-to-peak variation of f01 over one period of ng at fixed parity.
double charge_dispersion(const DeviceParams& params);

// Elements of cos(phi/2) and sin(phi/2) from level i of `from` to level f of
// `to`. The two spectra must have opposite parity.
MatrixElements matrix_elements_between(const Spectrum& from, const Spectrum& to, int i, int f);

// Numeric elements averaged over the parity of the initial state.
MatrixElements transition_matrix_elements(const DeviceParams& params, double ng, int i, int f);

// Leading transmon-limit elements: cos2 = delta_if,
// sin2 = (1/4) sqrt(2 E_C / E_J) (i delta_{i-1,f} + (i+1) delta_{i+1,f}).
MatrixElements approx_matrix_elements(double ej_ghz, double ec_ghz, int i, int f);

}  // namespace qpscope
