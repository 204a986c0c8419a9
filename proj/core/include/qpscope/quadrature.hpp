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

namespace qpscope {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b]. Bisects the
// interval with the largest error estimate until the summed estimate is below
// max(abs_tol, rel_tol |value|). Throws NumericError after max_intervals.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double rel_tol = 1e-8, double abs_tol = 0.0,
                                int max_intervals = 2000);

}  // namespace qpscope
