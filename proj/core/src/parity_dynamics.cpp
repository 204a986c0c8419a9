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

#include "qpscope/parity_dynamics.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "qpscope/error.hpp"

namespace qpscope {

PumpConfig validate(const PumpConfig& cfg) {
  if (cfg.drive_parity != 1 && cfg.drive_parity != -1) {
    throw ParameterError("drive_parity must be +1 or -1");
  }
  if (!(cfg.p_e_conditional >= 0.0 && cfg.p_e_conditional <= 0.5)) {
    throw ParameterError("p_e_conditional must lie in [0, 0.5]");
  }
  if (!(cfg.gamma0 >= 0.0) || !(cfg.gamma1 >= 0.0)) {
    throw ParameterError("parity rates must be nonnegative");
  }
  if (!(cfg.t1_s > 0.0)) throw ParameterError("t1_s must be positive");
  return cfg;
}

Eigen::Matrix4d pump_rate_matrix(const PumpConfig& cfg) {
  validate(cfg);
  const double down = 1.0 / cfg.t1_s;
  const double pe = cfg.p_e_conditional;
  const double up = down * pe / (1.0 - pe);
  const int g_drv = cfg.drive_parity == 1 ? kGroundPlus : kGroundMinus;
  const int e_drv = cfg.drive_parity == 1 ? kExcitedPlus : kExcitedMinus;

  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  auto add = [&q](int from, int to, double rate) {
    q(to, from) += rate;
    q(from, from) -= rate;
  };
  add(g_drv, e_drv, up);
  add(kExcitedPlus, kGroundPlus, down);
  add(kExcitedMinus, kGroundMinus, down);
  add(kGroundPlus, kGroundMinus, cfg.gamma0);
  add(kGroundMinus, kGroundPlus, cfg.gamma0);
  add(kExcitedPlus, kGroundMinus, cfg.gamma1);
  add(kExcitedMinus, kGroundPlus, cfg.gamma1);
  return q;
}

Eigen::VectorXd steady_state(const Eigen::MatrixXd& generator) {
  const Eigen::Index n = generator.rows();
  if (n == 0 || generator.cols() != n) throw ParameterError("generator must be square");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(generator);
  lu.setThreshold(1e-12);
  if (lu.rank() != n - 1) {
    throw NumericError("generator null space is not one-dimensional (disconnected chain)");
  }
  // Replace one balance equation with normalization.
  Eigen::MatrixXd a = generator;
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd p = a.fullPivLu().solve(b);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (p(k) < 0.0) p(k) = 0.0;
  }
  return p / p.sum();
}

double pump_polarization(double ratio, double p_e) {
  if (!(ratio >= 1.0)) throw ParameterError("rate ratio must be at least 1");
  if (!(p_e >= 0.0 && p_e <= 0.5)) throw ParameterError("p_e must lie in [0, 0.5]");
  const double b = (ratio - 1.0) * p_e;
  return 0.5 * (1.0 - b / (2.0 + b));
}

double driven_parity_population(const PumpConfig& cfg) {
  const Eigen::VectorXd p = steady_state(pump_rate_matrix(cfg));
  return cfg.drive_parity == 1 ? p(kGroundPlus) + p(kExcitedPlus)
                               : p(kGroundMinus) + p(kExcitedMinus);
}

double ground_minus_population(const PumpConfig& cfg) {
  return steady_state(pump_rate_matrix(cfg))(kGroundMinus);
}

PumpFit fit_pump_ratio(const std::vector<double>& p_e, const std::vector<double>& p) {
  if (p_e.size() != p.size() || p_e.size() < 2) {
    throw ParameterError("pump fit needs at least two matched points");
  }
  auto rss = [&](double log_ratio) {
    const double r = 1.0 + std::exp(log_ratio);
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double d = pump_polarization(r, p_e[k]) - p[k];
      sum += d * d;
    }
    return sum;
  };
  std::uintmax_t iters = 500;
  const auto best = boost::math::tools::brent_find_minima(rss, -10.0, 12.0,
                                                          std::numeric_limits<double>::digits / 2,
                                                          iters);
  PumpFit fit;
  fit.ratio = 1.0 + std::exp(best.first);
  fit.rss = best.second;
  // Gauss-Newton variance from the residual scale and the ratio derivative.
  double jtj = 0.0;
  for (double pe : p_e) {
    const double b = (fit.ratio - 1.0) * pe;
    const double dp = -pe / ((2.0 + b) * (2.0 + b));
    jtj += dp * dp;
  }
  const std::size_t dof = p.size() - 1;
  if (jtj > 0.0 && dof > 0) fit.sigma = std::sqrt(fit.rss / dof / jtj);
  return fit;
}

}  // namespace qpscope
