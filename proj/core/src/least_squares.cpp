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

#include "qpscope/least_squares.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "qpscope/error.hpp"

namespace qpscope {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

Eigen::MatrixXd jacobian_fd(const ResidualFn& fn, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& f0, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, double rel) {
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double h = rel * std::max(1.0, std::abs(x(k)));
    Eigen::VectorXd xp = x;
    // Step away from an active upper bound.
    if (x(k) + h > hi(k)) h = -h;
    xp(k) = x(k) + h;
    if (xp(k) < lo(k)) xp(k) = lo(k);
    const double actual = xp(k) - x(k);
    if (actual == 0.0) {
      j.col(k).setZero();
      continue;
    }
    j.col(k) = (fn(xp) - f0) / actual;
  }
  return j;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& fn, const Eigen::VectorXd& start,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const LmOptions& opt) {
  if (lower.size() != start.size() || upper.size() != start.size()) {
    throw ParameterError("bounds must match the parameter vector");
  }
  LmResult out;
  Eigen::VectorXd x = clamp(start, lower, upper);
  Eigen::VectorXd f = fn(x);
  if (!f.allFinite()) throw NumericError("residuals not finite at the starting point");
  double cost = f.squaredNorm();
  double lambda = opt.initial_lambda;
  Eigen::MatrixXd j = jacobian_fd(fn, x, f, lower, upper, opt.fd_step);

  for (int it = 1; it <= opt.max_iterations; ++it) {
    out.iterations = it;
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd grad = j.transpose() * f;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < a.rows(); ++k) {
        a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      }
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd trial = clamp(x + step, lower, upper);
      const Eigen::VectorXd ft = fn(trial);
      const double ct = ft.allFinite() ? ft.squaredNorm() : INFINITY;
      if (ct < cost) {
        const double dx = (trial - x).norm() / (x.norm() + opt.step_tol);
        const double dc = (cost - ct) / std::max(cost, 1e-300);
        x = trial;
        f = ft;
        cost = ct;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (dx < opt.step_tol || dc < opt.cost_tol) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No descent direction left at any damping: a local minimum.
      out.converged = true;
      break;
    }
    j = jacobian_fd(fn, x, f, lower, upper, opt.fd_step);
    if (out.converged) break;
  }

  out.params = x;
  out.residuals = f;
  out.jacobian = j;
  out.cost = cost;
  const Eigen::Index dof = f.size() - x.size();
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jtj);
  const double s2 = dof > 0 ? cost / static_cast<double>(dof) : 0.0;
  out.covariance = cod.pseudoInverse() * s2;
  return out;
}

}  // namespace qpscope
