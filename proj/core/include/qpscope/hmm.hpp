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
#include <vector>

namespace qpscope {

using Symbols = std::vector<std::int8_t>;  // entries +1 or -1

struct HmmOptions {
  double rel_tol = 1e-10;
  int max_iterations = 1000;
  int min_length = 100;  // per sequence
};

/// Two hidden parities, two symbols. err_p is the probability of reading -1
/// while the parity is +1, err_m the converse.
struct HmmFit {
  double p_pm = 0.0;  // per-sample switching probabilities
  double p_mp = 0.0;
  double gamma_pm = 0.0;  // s^-1
  double gamma_mp = 0.0;
  double err_p = 0.0;
  double err_m = 0.0;
  double pi_plus = 0.5;
  double loglik = 0.0;
  double expected_switches = 0.0;
  std::vector<double> loglik_trace;
  std::vector<Symbols> viterbi_paths;  // one per input sequence
  int iterations = 0;
  bool converged = false;

  // Mean of the two directed rates.
  double gamma() const { return 0.5 * (gamma_pm + gamma_mp); }
  // Poisson error gamma / sqrt(switches).
  double gamma_sigma() const;
};

// Exact conversion of per-step switching probabilities of a two-state chain
// sampled every dt to its rates: a + b = -ln(1 - p - q)/dt, a = p/(p+q) (a+b).
// Throws NumericError when either probability exceeds 1/2.
void probabilities_to_rates(double p_pm, double p_mp, double dt_s, double& gamma_pm,
                            double& gamma_mp);
void rates_to_probabilities(double gamma_pm, double gamma_mp, double dt_s, double& p_pm,
                            double& p_mp);

// Baum-Welch fitted jointly to all sequences (shared parameters), followed by
// Viterbi decoding of each.
HmmFit fit_parity_hmm(const std::vector<Symbols>& sequences, double dt_s,
                      const HmmOptions& opt = {});
HmmFit fit_parity_hmm(const Symbols& symbols, double dt_s, const HmmOptions& opt = {});

}  // namespace qpscope
