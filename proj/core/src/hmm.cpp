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

#include "qpscope/hmm.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qpscope/error.hpp"

namespace qpscope {

namespace {

// Hidden index 0 is parity +1, 1 is parity -1.
int hidden_index(std::int8_t parity) { return parity == 1 ? 0 : 1; }

struct Params {
  std::array<std::array<double, 2>, 2> a;  // a[from][to]
  std::array<std::array<double, 2>, 2> b;  // b[hidden][symbol index]
  std::array<double, 2> pi;
};

struct Accumulators {
  std::array<std::array<double, 2>, 2> trans{};
  std::array<std::array<double, 2>, 2> emit{};
  std::array<double, 2> occupancy_from{};  // excludes the last step
  std::array<double, 2> occupancy{};
  std::array<double, 2> first{};
  double loglik = 0.0;
};

void forward_backward(const Symbols& obs, const Params& p, Accumulators& acc,
                      std::vector<std::array<double, 2>>& alpha,
                      std::vector<std::array<double, 2>>& beta, std::vector<double>& scale) {
  const std::size_t n = obs.size();
  alpha.resize(n);
  beta.resize(n);
  scale.resize(n);
  for (int s = 0; s < 2; ++s) alpha[0][s] = p.pi[s] * p.b[s][hidden_index(obs[0])];
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      const int o = hidden_index(obs[t]);
      for (int s = 0; s < 2; ++s) {
        alpha[t][s] = (alpha[t - 1][0] * p.a[0][s] + alpha[t - 1][1] * p.a[1][s]) * p.b[s][o];
      }
    }
    scale[t] = alpha[t][0] + alpha[t][1];
    if (!(scale[t] > 0.0)) throw NumericError("hidden Markov forward pass underflowed");
    alpha[t][0] /= scale[t];
    alpha[t][1] /= scale[t];
    acc.loglik += std::log(scale[t]);
  }
  beta[n - 1] = {1.0, 1.0};
  for (std::size_t t = n - 1; t-- > 0;) {
    const int o = hidden_index(obs[t + 1]);
    for (int s = 0; s < 2; ++s) {
      beta[t][s] = (p.a[s][0] * p.b[0][o] * beta[t + 1][0] +
                    p.a[s][1] * p.b[1][o] * beta[t + 1][1]) /
                   scale[t + 1];
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    const int o = hidden_index(obs[t]);
    std::array<double, 2> g{alpha[t][0] * beta[t][0], alpha[t][1] * beta[t][1]};
    const double norm = g[0] + g[1];
    g[0] /= norm;
    g[1] /= norm;
    for (int s = 0; s < 2; ++s) {
      acc.emit[s][o] += g[s];
      acc.occupancy[s] += g[s];
      if (t == 0) acc.first[s] += g[s];
    }
    if (t + 1 < n) {
      const int o1 = hidden_index(obs[t + 1]);
      for (int s = 0; s < 2; ++s) {
        acc.occupancy_from[s] += g[s];
        for (int r = 0; r < 2; ++r) {
          acc.trans[s][r] +=
              alpha[t][s] * p.a[s][r] * p.b[r][o1] * beta[t + 1][r] / scale[t + 1];
        }
      }
    }
  }
}

Symbols viterbi(const Symbols& obs, const Params& p) {
  const std::size_t n = obs.size();
  std::vector<std::array<double, 2>> delta(n);
  std::vector<std::array<int, 2>> back(n);
  auto lg = [](double x) { return x > 0.0 ? std::log(x) : -1e300; };
  for (int s = 0; s < 2; ++s) delta[0][s] = lg(p.pi[s]) + lg(p.b[s][hidden_index(obs[0])]);
  for (std::size_t t = 1; t < n; ++t) {
    const int o = hidden_index(obs[t]);
    for (int s = 0; s < 2; ++s) {
      const double stay = delta[t - 1][s] + lg(p.a[s][s]);
      const double move = delta[t - 1][1 - s] + lg(p.a[1 - s][s]);
      back[t][s] = stay >= move ? s : 1 - s;
      delta[t][s] = std::max(stay, move) + lg(p.b[s][o]);
    }
  }
  Symbols path(n);
  int s = delta[n - 1][0] >= delta[n - 1][1] ? 0 : 1;
  for (std::size_t t = n; t-- > 0;) {
    path[t] = static_cast<std::int8_t>(s == 0 ? 1 : -1);
    if (t > 0) s = back[t][s];
  }
  return path;
}

}  // namespace

double HmmFit::gamma_sigma() const {
  return expected_switches > 0.0 ? gamma() / std::sqrt(expected_switches) : gamma();
}

void probabilities_to_rates(double p_pm, double p_mp, double dt_s, double& gamma_pm,
                            double& gamma_mp) {
  if (!(dt_s > 0.0)) throw ParameterError("dt_s must be positive");
  if (p_pm > 0.5 || p_mp > 0.5) {
    throw NumericError("switching probability per sample exceeds 1/2 (rate at Nyquist bound)");
  }
  const double sum = p_pm + p_mp;
  if (!(sum > 0.0)) {
    gamma_pm = gamma_mp = 0.0;
    return;
  }
  const double total = -std::log1p(-sum) / dt_s;
  gamma_pm = p_pm / sum * total;
  gamma_mp = p_mp / sum * total;
}

void rates_to_probabilities(double gamma_pm, double gamma_mp, double dt_s, double& p_pm,
                            double& p_mp) {
  const double total = gamma_pm + gamma_mp;
  if (!(total > 0.0)) {
    p_pm = p_mp = 0.0;
    return;
  }
  const double relax = -std::expm1(-total * dt_s);
  p_pm = gamma_pm / total * relax;
  p_mp = gamma_mp / total * relax;
}

HmmFit fit_parity_hmm(const std::vector<Symbols>& sequences, double dt_s, const HmmOptions& opt) {
  if (!(dt_s > 0.0)) throw ParameterError("dt_s must be positive");
  if (sequences.empty()) throw ParameterError("no symbol sequences");
  double flips = 0.0;
  double steps = 0.0;
  for (const Symbols& seq : sequences) {
    if (static_cast<int>(seq.size()) < opt.min_length) {
      throw ParameterError("symbol sequence shorter than the minimum length");
    }
    for (std::size_t t = 0; t < seq.size(); ++t) {
      if (seq[t] != 1 && seq[t] != -1) throw ParameterError("symbols must be +1 or -1");
      if (t > 0 && seq[t] != seq[t - 1]) flips += 1.0;
    }
    steps += static_cast<double>(seq.size() - 1);
  }

  Params p;
  const double p0 = std::clamp(0.25 * flips / steps, 1e-5, 0.1);
  p.a = {{{1.0 - p0, p0}, {p0, 1.0 - p0}}};
  p.b = {{{0.95, 0.05}, {0.05, 0.95}}};
  p.pi = {0.5, 0.5};

  HmmFit fit;
  std::vector<std::array<double, 2>> alpha, beta;
  std::vector<double> scale;
  double prev = -INFINITY;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Accumulators acc;
    for (const Symbols& seq : sequences) forward_backward(seq, p, acc, alpha, beta, scale);
    if (!std::isfinite(acc.loglik)) throw NumericError("hidden Markov log-likelihood not finite");
    fit.loglik_trace.push_back(acc.loglik);
    fit.loglik = acc.loglik;
    fit.iterations = it;
    fit.expected_switches = acc.trans[0][1] + acc.trans[1][0];
    const bool done = std::abs(acc.loglik - prev) <= opt.rel_tol * std::abs(acc.loglik);
    prev = acc.loglik;
    if (done) {
      fit.converged = true;
      break;
    }
    for (int s = 0; s < 2; ++s) {
      const double from = acc.occupancy_from[s];
      if (from > 0.0) {
        p.a[s][0] = acc.trans[s][0] / from;
        p.a[s][1] = acc.trans[s][1] / from;
      }
      const double occ = acc.occupancy[s];
      if (occ > 0.0) {
        p.b[s][0] = acc.emit[s][0] / occ;
        p.b[s][1] = acc.emit[s][1] / occ;
      }
      p.pi[s] = acc.first[s] / static_cast<double>(sequences.size());
    }
  }

  fit.p_pm = p.a[0][1];
  fit.p_mp = p.a[1][0];
  fit.err_p = p.b[0][1];
  fit.err_m = p.b[1][0];
  fit.pi_plus = p.pi[0];
  probabilities_to_rates(fit.p_pm, fit.p_mp, dt_s, fit.gamma_pm, fit.gamma_mp);
  fit.viterbi_paths.reserve(sequences.size());
  for (const Symbols& seq : sequences) fit.viterbi_paths.push_back(viterbi(seq, p));
  return fit;
}

HmmFit fit_parity_hmm(const Symbols& symbols, double dt_s, const HmmOptions& opt) {
  return fit_parity_hmm(std::vector<Symbols>{symbols}, dt_s, opt);
}

}  // namespace qpscope
