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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qpscope/device.hpp"
#include "qpscope/gmm.hpp"
#include "qpscope/hmm.hpp"
#include "qpscope/trace_sim.hpp"
#include "qpscope/tunneling.hpp"

namespace qpscope {

struct PopulationRecord {
  double p1 = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;
};

/// Weighted line through (p1, Gamma) records, evaluated at p1 = 0 and 1.
struct PopulationFit {
  double gamma0 = 0.0;
  double sigma0 = 0.0;
  double gamma1 = 0.0;
  double sigma1 = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  // Quadratic term of a weighted parabola through the same records.
  double curvature = 0.0;
  double curvature_sigma = 0.0;
};

// Weights are 1/sigma^2; records with sigma <= 0 get unit weight. Throws
// ParameterError for fewer than two records or a singular design.
PopulationFit rates_vs_population(const std::vector<PopulationRecord>& records);

struct ArrheniusFit {
  double ea_ghz = 0.0;
  double ea_sigma = 0.0;
  double prefactor = 0.0;  // s^-1
  double ln_prefactor_sigma = 0.0;
};

// Ordinary least squares of ln(Gamma - offset) on 1/kT.
ArrheniusFit arrhenius_fit(const std::vector<double>& temp_k, const std::vector<double>& gamma,
                           double offset);

/// A measured total rate. state 0 is the ground-state rate, state 1 the
/// extrapolated excited-state rate.
struct RatePoint {
  double temp_k = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;
  int state = 0;
};

struct FitParam {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;
};

struct FitResult {
  std::vector<FitParam> params;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;
  int iterations = 0;
  int starts = 0;
  bool converged = false;

  const FitParam& get(const std::string& name) const;
};

struct JointFitOptions {
  DeviceParams base;  // E_J, E_C and fixed constants; fitted fields are overwritten
  double ng = kDefaultNg;
  RateMethod method = RateMethod::automatic;
  std::vector<double> delta_starts = {40.0, 50.0};
  std::vector<double> ddelta_starts = {4.0, 5.0, 6.5};
};

// Model value for a RatePoint: Gamma_0 + offset for state 0, and for state 1
// (Gamma_1 + w Gamma_2)/(1 + w) with offsets and w = exp(-f21/kT).
double joint_model_rate(const TunnelingModel& model, double gamma_offset, const RatePoint& point,
                        RateMethod method);

// Weighted least squares in log-rate space over (Delta, dDelta, ln x_res,
// ln Gamma_offset) from a grid of starts. Reports delta_ghz, ddelta_ghz,
// ln_x_res, x_res and gamma_offset. Throws NumericError when no start
// converges or the best solution sits on a bound.
FitResult joint_fit(const std::vector<RatePoint>& data, const JointFitOptions& options);

struct PsdFit {
  double gamma = 0.0;  // pi fc
  double fc_hz = 0.0;
  double amplitude = 0.0;
  double white = 0.0;
  std::vector<double> freq_hz;  // log-binned spectrum used for the fit
  std::vector<double> power;
};

// Averages the one-sided periodogram of the mean-subtracted sequences, fits
// A / (1 + (f/fc)^2) + W in log space and returns Gamma = pi fc. Throws
// NumericError "no Lorentzian knee" when the fitted knee is absent or outside
// the resolved band.
PsdFit psd_rate(const std::vector<Symbols>& sequences, double dt_s);

struct PointEstimate {
  PlanPoint point;
  double p1_est = 0.0;  // corrected for readout errors
  double p1_raw = 0.0;  // summed excited state weights
  double gamma = 0.0;
  double sigma = 0.0;
  double gamma_pm = 0.0;
  double gamma_mp = 0.0;
  double err_p = 0.0;
  double err_m = 0.0;
  double loglik = 0.0;
};

struct TemperatureRates {
  double temp_k = 0.0;
  PopulationFit fit;
};

struct PipelineOptions {
  ReadoutModel readout;
  int gmm_components = 5;
  std::size_t gmm_max_points = 60000;  // pooled over all plan points
  std::uint64_t seed = 0;
  bool run_joint_fit = true;
  JointFitOptions joint;
};

struct PipelineResult {
  MixtureFit readout;  // pooled readout mixture shared by every plan point
  std::vector<PointEstimate> points;
  std::vector<TemperatureRates> temperatures;
  std::vector<RatePoint> rate_points;
  bool has_joint_fit = false;
  FitResult joint;
};

// One mixture fit on IQ points pooled evenly from every plan point, labeled
// and refined to one Gaussian per readout state.
MixtureFit fit_readout(const std::vector<std::vector<JumpTrace>>& traces,
                       const PipelineOptions& options);

// State populations with the readout shapes held fixed, parity assignment,
// and a joint HMM over the point's traces.
PointEstimate analyze_point(const std::vector<JumpTrace>& traces, const PlanPoint& point,
                            const MixtureFit& readout);

// fit_readout, analyze_point per plan point, a population line per
// temperature, then the joint model fit when at least two temperatures are
// present. Extrapolated rates that come out nonpositive are left out of the
// joint fit, which works in log space.
PipelineResult analyze_dataset(const std::vector<std::vector<JumpTrace>>& traces,
                               const std::vector<PlanPoint>& plan,
                               const PipelineOptions& options);

}  // namespace qpscope
