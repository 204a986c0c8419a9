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

#include <functional>

#include <Eigen/Core>

namespace qpscope {

struct LmOptions {
  int max_iterations = 200;
  double initial_lambda = 1e-3;
  double step_tol = 1e-10;      // relative parameter change
  double cost_tol = 1e-12;      // relative cost change
  double fd_step = 1e-6;        // relative forward-difference step
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1 with s^2 = cost / dof
  double cost = 0.0;           // sum of squared residuals
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Levenberg-Marquardt with a forward-difference Jacobian and Marquardt
// diagonal scaling. Parameters leaving [lower, upper] are clamped.
LmResult levenberg_marquardt(const ResidualFn& residuals, const Eigen::VectorXd& start,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const LmOptions& options = {});

}  // namespace qpscope
