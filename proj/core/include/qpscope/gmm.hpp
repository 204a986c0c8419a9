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

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "qpscope/trace_sim.hpp"

namespace qpscope {

using Points2 = std::vector<Eigen::Vector2d>;

struct GaussianComponent {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
  double weight = 0.0;
  int label = -1;  // readout state, -1 until labeled
};

/// Angular interval [start, start + width) assigned to one readout state.
struct Sector {
  double start = 0.0;
  double width = 0.0;
  int state = -1;
};

struct GmmOptions {
  double rel_tol = 1e-8;
  int max_iterations = 500;
  int max_restarts = 10;
  double min_variance = 1e-10;  // collapse threshold on covariance eigenvalues
  int n_init = 6;               // k-means++ seeds screened per attempt
  int screen_iterations = 20;   // EM iterations given to each seed before choosing
};

struct MixtureFit {
  std::vector<GaussianComponent> components;
  std::vector<GaussianComponent> states;  // one per readout state after refine_states
  std::vector<Sector> assignment_sectors;
  std::vector<double> loglik_trace;  // per EM iteration of the accepted run
  double loglik = 0.0;
  double p1_est = 0.0;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
};

// EM for a k-component full-covariance mixture. Each attempt seeds n_init
// k-means++ starts, runs them briefly and converges the one with the highest
// likelihood. An attempt whose covariance collapses is retried with fresh seeds.
MixtureFit fit_gmm(const Points2& points, int k, std::uint64_t seed, const GmmOptions& opt = {});

// Labels each component with the readout state at the nearest configured
// angle, builds sectors bounded by the bisectors between adjacent labeled
// states, and sets p1_est to the weight of components labeled excited.
void label_mixture(MixtureFit& fit, const ReadoutModel& model);

// Merges the labeled components into one Gaussian per readout state and runs
// EM with those four components on `points`. Spare components that straddle
// two clusters are thereby shared out by the data rather than by their mean
// angle. Updates states, p1_est and the sectors.
void refine_states(MixtureFit& fit, const Points2& points, const ReadoutModel& model,
                   const GmmOptions& opt = {});

// Maximum-likelihood state populations of `points` with the refined state
// Gaussians held fixed. Requires refine_states.
std::array<double, kReadoutStates> state_weights(const MixtureFit& fit, const Points2& points,
                                                 const GmmOptions& opt = {});

// Readout state of the sector containing the angle of the point.
int classify_state(const Eigen::Vector2d& point, const MixtureFit& fit);

// Parity symbols for every point. Throws ParameterError if the fit is unlabeled.
std::vector<std::int8_t> assign_parity(const Points2& points, const MixtureFit& fit);

Points2 trace_points(const JumpTrace& trace);

// Log-density of a single point under the mixture.
double mixture_log_density(const MixtureFit& fit, const Eigen::Vector2d& x);

}  // namespace qpscope
