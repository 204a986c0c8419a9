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

#include "qpscope/transmon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qpscope/error.hpp"

namespace qpscope {

namespace {

constexpr int kInitialHalfWidth = 15;
constexpr int kHalfWidthStep = 5;
constexpr int kMaxHalfWidth = 200;
constexpr double kConvergenceGhz = 1.0e-6;

Spectrum diagonalize(const DeviceParams& p, double ng, int parity, int half_width) {
  const double ng_eff = ng - 0.25 * parity;
  const int center = static_cast<int>(std::lround(ng_eff));
  const int dim = 2 * half_width + 1;

  Eigen::VectorXd diag(dim);
  Eigen::VectorXd off = Eigen::VectorXd::Constant(dim - 1, -0.5 * p.ej_ghz);
  for (int r = 0; r < dim; ++r) {
    const double q = center - half_width + r - ng_eff;
    diag(r) = 4.0 * p.ec_ghz * q * q;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericError("tridiagonal eigensolver failed");
  }

  Spectrum s;
  s.ng = ng;
  s.parity = parity;
  s.n_charge = half_width;
  s.n_min = center - half_width;
  s.levels.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
  s.eigvecs = solver.eigenvectors();
  // Fix the sign so the largest component of each eigenvector is positive.
  for (int k = 0; k < dim; ++k) {
    Eigen::Index arg = 0;
    s.eigvecs.col(k).cwiseAbs().maxCoeff(&arg);
    if (s.eigvecs(arg, k) < 0.0) s.eigvecs.col(k) *= -1.0;
  }
  return s;
}

}  // namespace

double Spectrum::amplitude(int k, int n) const {
  const int r = n - n_min;
  if (r < 0 || r >= eigvecs.rows()) return 0.0;
  return eigvecs(r, k);
}

Spectrum spectrum(const DeviceParams& params, double ng, int parity, int n_levels) {
  validate(params);
  if (parity != 1 && parity != -1) throw ParameterError("parity must be +1 or -1");
  if (n_levels < 2) throw ParameterError("n_levels must be at least 2");
  if (!std::isfinite(ng)) throw ParameterError("ng must be finite");

  const int n_check = std::max(4, n_levels);
  int width = std::max(kInitialHalfWidth, (n_check + 1) / 2 + kHalfWidthStep);
  Spectrum prev = diagonalize(params, ng, parity, width);
  while (width + kHalfWidthStep <= kMaxHalfWidth) {
    width += kHalfWidthStep;
    Spectrum next = diagonalize(params, ng, parity, width);
    double change = 0.0;
    for (int k = 0; k < n_check; ++k) {
      change = std::max(change, std::abs(next.levels[k] - prev.levels[k]));
    }
    if (change < kConvergenceGhz) {
      next.levels.resize(n_levels);
      return next;
    }
    prev = std::move(next);
  }
  throw NumericError("transmon spectrum did not converge at basis half-width " +
                     std::to_string(kMaxHalfWidth));
}

std::vector<double> averaged_levels(const DeviceParams& params, double ng, int n_levels) {
  const Spectrum plus = spectrum(params, ng, 1, n_levels);
  const Spectrum minus = spectrum(params, ng, -1, n_levels);
  std::vector<double> out(n_levels);
  for (int k = 0; k < n_levels; ++k) {
    out[k] = 0.5 * ((plus.levels[k] - plus.levels[0]) + (minus.levels[k] - minus.levels[0]));
  }
  return out;
}

double qubit_frequency(const DeviceParams& params, double ng) {
  return averaged_levels(params, ng, 2)[1];
}

double charge_dispersion(const DeviceParams& params) {
  // f01 at fixed parity is extremal at the charge degeneracy points, which for
  // the +1 sector sit at ng = 1/4 and ng = 3/4. A coarse scan guards against
  // unusual parameter regimes.
  constexpr int kSamples = 200;
  double lo = 0.0;
  double hi = 0.0;
  for (int j = 0; j <= kSamples; ++j) {
    const double ng = static_cast<double>(j) / kSamples;
    const Spectrum s = spectrum(params, ng, 1, 2);
    const double f01 = s.levels[1] - s.levels[0];
    if (j == 0) {
      lo = hi = f01;
    } else {
      lo = std::min(lo, f01);
      hi = std::max(hi, f01);
    }
  }
  for (double ng : {0.25, 0.75}) {
    const Spectrum s = spectrum(params, ng, 1, 2);
    const double f01 = s.levels[1] - s.levels[0];
    lo = std::min(lo, f01);
    hi = std::max(hi, f01);
  }
  return hi - lo;
}

MatrixElements matrix_elements_between(const Spectrum& from, const Spectrum& to, int i, int f) {
  if (from.parity == to.parity) {
    throw ParameterError("matrix elements connect opposite parity sectors");
  }
  if (i < 0 || i >= from.eigvecs.cols() || f < 0 || f >= to.eigvecs.cols()) {
    throw ParameterError("level index out of range");
  }
  // Physical charge of basis state N in sector P is N + P/4. Shifting by +-1/2
  // lands on integer charges M of the other sector: from P=+1, N+1/4+1/2 maps
  // to M=N+1 and N+1/4-1/2 to M=N; from P=-1 the targets are M=N and M=N-1.
  const int up_shift = from.parity == 1 ? 1 : 0;
  double c_sum = 0.0;
  double s_sum = 0.0;
  for (int r = 0; r < from.eigvecs.rows(); ++r) {
    const int n = from.n_min + r;
    const double a = from.eigvecs(r, i);
    const double up = to.amplitude(f, n + up_shift);
    const double down = to.amplitude(f, n + up_shift - 1);
    c_sum += a * (up + down);
    s_sum += a * (up - down);
  }
  return {0.25 * c_sum * c_sum, 0.25 * s_sum * s_sum};
}

MatrixElements transition_matrix_elements(const DeviceParams& params, double ng, int i, int f) {
  if (i < 0 || f < 0) throw ParameterError("level index must be nonnegative");
  const int n = std::max(2, std::max(i, f) + 1);
  const Spectrum plus = spectrum(params, ng, 1, n);
  const Spectrum minus = spectrum(params, ng, -1, n);
  const MatrixElements a = matrix_elements_between(plus, minus, i, f);
  const MatrixElements b = matrix_elements_between(minus, plus, i, f);
  return {0.5 * (a.cos2 + b.cos2), 0.5 * (a.sin2 + b.sin2)};
}

MatrixElements approx_matrix_elements(double ej_ghz, double ec_ghz, int i, int f) {
  if (!(ej_ghz > 0.0) || !(ec_ghz > 0.0)) throw ParameterError("energies must be positive");
  if (i < 0 || f < 0) throw ParameterError("level index must be nonnegative");
  const double unit = 0.25 * std::sqrt(2.0 * ec_ghz / ej_ghz);
  MatrixElements m;
  m.cos2 = i == f ? 1.0 : 0.0;
  if (f == i - 1) m.sin2 = unit * i;
  if (f == i + 1) m.sin2 = unit * (i + 1);
  return m;
}

}  // namespace qpscope
