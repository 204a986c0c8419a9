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

#include "qpscope/gmm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "qpscope/error.hpp"
#include "qpscope/rng.hpp"

namespace qpscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

double angle_distance(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

double log_gauss(const Eigen::Vector2d& x, const Eigen::Vector2d& mean, const Eigen::Matrix2d& inv,
                 double log_det) {
  const Eigen::Vector2d d = x - mean;
  return -0.5 * d.dot(inv * d) - 0.5 * log_det - std::log(kTwoPi);
}

std::vector<Eigen::Vector2d> kmeans_pp(const Points2& pts, int k, Engine& eng) {
  std::vector<Eigen::Vector2d> centers;
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  centers.push_back(pts[pick(eng)]);
  std::vector<double> d2(pts.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t n = 0; n < pts.size(); ++n) {
      d2[n] = std::min(d2[n], (pts[n] - centers.back()).squaredNorm());
      total += d2[n];
    }
    if (!(total > 0.0)) {
      centers.push_back(pts[pick(eng)]);
      continue;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(eng);
    std::size_t chosen = pts.size() - 1;
    for (std::size_t n = 0; n < pts.size(); ++n) {
      u -= d2[n];
      if (u <= 0.0) {
        chosen = n;
        break;
      }
    }
    centers.push_back(pts[chosen]);
  }
  return centers;
}

// k-means++ centers with a pooled scatter covariance and hard-count weights.
std::vector<GaussianComponent> initial_components(const Points2& pts, int k, Engine& eng,
                                                  const GmmOptions& opt) {
  const std::size_t n = pts.size();
  const auto centers = kmeans_pp(pts, k, eng);
  std::vector<int> nearest(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = (pts[i] - centers[c]).squaredNorm();
      if (d < best) {
        best = d;
        nearest[i] = c;
      }
    }
  }
  std::vector<GaussianComponent> comps(k);
  std::vector<double> counts(k, 0.0);
  for (int c = 0; c < k; ++c) comps[c].mean = centers[c];
  Eigen::Matrix2d pooled = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d d = pts[i] - centers[nearest[i]];
    pooled += d * d.transpose();
    counts[nearest[i]] += 1.0;
  }
  pooled /= static_cast<double>(n);
  pooled += opt.min_variance * 10.0 * Eigen::Matrix2d::Identity();
  double total = 0.0;
  for (int c = 0; c < k; ++c) total += std::max(counts[c], 1.0);
  for (int c = 0; c < k; ++c) {
    comps[c].cov = pooled;
    comps[c].weight = std::max(counts[c], 1.0) / total;
  }
  return comps;
}

struct EmRun {
  MixtureFit fit;
  bool collapsed = false;
  double prev = -std::numeric_limits<double>::infinity();
};

// Advances EM on run.fit until convergence, collapse, or `until` total
// iterations.
void em_steps(const Points2& pts, EmRun& run, int until, const GmmOptions& opt) {
  const std::size_t n = pts.size();
  std::vector<GaussianComponent>& comps = run.fit.components;
  const int k = static_cast<int>(comps.size());
  Eigen::MatrixXd resp(n, k);
  while (run.fit.iterations < until && !run.fit.converged) {
    // E step.
    std::vector<Eigen::Matrix2d> inv(k);
    std::vector<double> log_det(k), log_w(k);
    for (int c = 0; c < k; ++c) {
      inv[c] = comps[c].cov.inverse();
      log_det[c] = std::log(comps[c].cov.determinant());
      log_w[c] = std::log(comps[c].weight);
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        resp(i, c) = log_w[c] + log_gauss(pts[i], comps[c].mean, inv[c], log_det[c]);
        mx = std::max(mx, resp(i, c));
      }
      double s = 0.0;
      for (int c = 0; c < k; ++c) {
        resp(i, c) = std::exp(resp(i, c) - mx);
        s += resp(i, c);
      }
      for (int c = 0; c < k; ++c) resp(i, c) /= s;
      ll += mx + std::log(s);
    }
    run.fit.loglik_trace.push_back(ll);
    run.fit.loglik = ll;
    ++run.fit.iterations;
    if (std::abs(ll - run.prev) <= opt.rel_tol * std::abs(ll)) {
      run.fit.converged = true;
      return;
    }
    run.prev = ll;

    // M step.
    for (int c = 0; c < k; ++c) {
      const double nk = resp.col(c).sum();
      if (!(nk > 1e-9)) {
        run.collapsed = true;
        return;
      }
      Eigen::Vector2d mean = Eigen::Vector2d::Zero();
      for (std::size_t i = 0; i < n; ++i) mean += resp(i, c) * pts[i];
      mean /= nk;
      Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d d = pts[i] - mean;
        cov += resp(i, c) * (d * d.transpose());
      }
      cov /= nk;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
      if (!(es.eigenvalues().minCoeff() > opt.min_variance)) {
        run.collapsed = true;
        return;
      }
      comps[c].mean = mean;
      comps[c].cov = cov;
      comps[c].weight = nk / static_cast<double>(n);
    }
  }
}

}  // namespace

MixtureFit fit_gmm(const Points2& points, int k, std::uint64_t seed, const GmmOptions& opt) {
  if (k < 1) throw ParameterError("component count must be positive");
  if (points.size() < static_cast<std::size_t>(10 * k)) {
    throw ParameterError("too few points for the requested component count");
  }
  if (opt.n_init < 1) throw ParameterError("n_init must be positive");
  for (int attempt = 0; attempt <= opt.max_restarts; ++attempt) {
    // Screen several initializations with a short EM run, then converge the
    // best surviving one.
    EmRun best;
    bool have = false;
    for (int init = 0; init < opt.n_init; ++init) {
      Engine eng = make_engine(seed, "gmm", static_cast<std::uint64_t>(attempt),
                               static_cast<std::uint64_t>(init));
      EmRun run;
      run.fit.components = initial_components(points, k, eng, opt);
      em_steps(points, run, std::min(opt.screen_iterations, opt.max_iterations), opt);
      if (run.collapsed) continue;
      if (!have || run.fit.loglik > best.fit.loglik) {
        best = std::move(run);
        have = true;
      }
    }
    if (!have) continue;
    em_steps(points, best, opt.max_iterations, opt);
    if (!best.collapsed) {
      best.fit.restarts = attempt;
      return best.fit;
    }
  }
  throw NumericError("mixture components collapsed on every restart");
}

namespace {

// Sectors bounded by the bisectors between angularly adjacent states.
std::vector<Sector> build_sectors(const std::array<double, kReadoutStates>& state_angle) {
  std::array<int, kReadoutStates> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return state_angle[a] < state_angle[b]; });
  std::vector<Sector> sectors;
  for (int j = 0; j < kReadoutStates; ++j) {
    const int s = order[j];
    const double here = state_angle[s];
    const double prev = state_angle[order[(j + kReadoutStates - 1) % kReadoutStates]];
    const double next = state_angle[order[(j + 1) % kReadoutStates]];
    const double gap_prev = wrap_angle(here - prev);
    const double gap_next = wrap_angle(next - here);
    const double start = wrap_angle(here - 0.5 * gap_prev);
    sectors.push_back({start, 0.5 * (gap_prev + gap_next), s});
  }
  return sectors;
}

}  // namespace

void label_mixture(MixtureFit& fit, const ReadoutModel& model) {
  validate(model);
  if (fit.components.empty()) throw ParameterError("mixture has no components");
  std::array<double, kReadoutStates> best_weight{};
  std::array<double, kReadoutStates> state_angle{};
  std::array<bool, kReadoutStates> seen{};
  fit.p1_est = 0.0;
  fit.states.clear();
  for (GaussianComponent& c : fit.components) {
    const double theta = std::atan2(c.mean.y(), c.mean.x());
    int label = 0;
    for (int s = 1; s < kReadoutStates; ++s) {
      if (angle_distance(theta, model.cluster_angles[s]) <
          angle_distance(theta, model.cluster_angles[label])) {
        label = s;
      }
    }
    c.label = label;
    if (state_plasmon(label) == 1) fit.p1_est += c.weight;
    if (!seen[label] || c.weight > best_weight[label]) {
      seen[label] = true;
      best_weight[label] = c.weight;
      state_angle[label] = wrap_angle(theta);
    }
  }
  // States without a fitted component fall back to the configured angle.
  for (int s = 0; s < kReadoutStates; ++s) {
    if (!seen[s]) state_angle[s] = wrap_angle(model.cluster_angles[s]);
  }
  fit.assignment_sectors = build_sectors(state_angle);
}

void refine_states(MixtureFit& fit, const Points2& points, const ReadoutModel& model,
                   const GmmOptions& opt) {
  if (fit.components.empty() || fit.components.front().label < 0) {
    throw ParameterError("mixture components are unlabeled");
  }
  if (points.size() < static_cast<std::size_t>(10 * kReadoutStates)) {
    throw ParameterError("too few points to refine the state mixture");
  }
  // Moment-matched merge of the components carrying each label.
  Eigen::Matrix2d pooled = Eigen::Matrix2d::Zero();
  double total = 0.0;
  for (const auto& c : fit.components) {
    pooled += c.weight * c.cov;
    total += c.weight;
  }
  pooled /= total;
  EmRun run;
  run.fit.components.resize(kReadoutStates);
  for (int s = 0; s < kReadoutStates; ++s) {
    GaussianComponent& st = run.fit.components[s];
    st.label = s;
    double w = 0.0;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& c : fit.components) {
      if (c.label != s) continue;
      w += c.weight;
      mean += c.weight * c.mean;
    }
    if (w > 0.0) {
      mean /= w;
      Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
      for (const auto& c : fit.components) {
        if (c.label != s) continue;
        const Eigen::Vector2d d = c.mean - mean;
        cov += c.weight * (c.cov + d * d.transpose());
      }
      st.mean = mean;
      st.cov = cov / w;
      st.weight = w;
    } else {
      const double a = model.cluster_angles[s];
      st.mean = model.radius * Eigen::Vector2d(std::cos(a), std::sin(a));
      st.cov = pooled;
      st.weight = 1e-3;
    }
  }
  double norm = 0.0;
  for (const auto& st : run.fit.components) norm += st.weight;
  for (auto& st : run.fit.components) st.weight /= norm;

  em_steps(points, run, opt.max_iterations, opt);
  if (run.collapsed) throw NumericError("state mixture collapsed during refinement");
  fit.states = run.fit.components;
  fit.p1_est = 0.0;
  std::array<double, kReadoutStates> state_angle{};
  for (const auto& st : fit.states) {
    if (state_plasmon(st.label) == 1) fit.p1_est += st.weight;
    state_angle[st.label] = wrap_angle(std::atan2(st.mean.y(), st.mean.x()));
  }
  fit.assignment_sectors = build_sectors(state_angle);
}

int classify_state(const Eigen::Vector2d& point, const MixtureFit& fit) {
  if (fit.assignment_sectors.empty()) throw ParameterError("mixture components are unlabeled");
  const double theta = wrap_angle(std::atan2(point.y(), point.x()));
  for (const Sector& s : fit.assignment_sectors) {
    if (wrap_angle(theta - s.start) < s.width) return s.state;
  }
  return fit.assignment_sectors.back().state;
}

std::vector<std::int8_t> assign_parity(const Points2& points, const MixtureFit& fit) {
  std::vector<std::int8_t> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = static_cast<std::int8_t>(state_parity(classify_state(points[i], fit)));
  }
  return out;
}

Points2 trace_points(const JumpTrace& trace) {
  Points2 pts(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) pts[i] = {trace.i_quad[i], trace.q_quad[i]};
  return pts;
}

std::array<double, kReadoutStates> state_weights(const MixtureFit& fit, const Points2& points,
                                                 const GmmOptions& opt) {
  if (fit.states.size() != static_cast<std::size_t>(kReadoutStates)) {
    throw ParameterError("state mixture has not been refined");
  }
  if (points.empty()) throw ParameterError("no points for state weights");
  const std::size_t n = points.size();
  Eigen::MatrixXd dens(n, kReadoutStates);
  for (int c = 0; c < kReadoutStates; ++c) {
    const GaussianComponent& st = fit.states[c];
    const Eigen::Matrix2d inv = st.cov.inverse();
    const double log_det = std::log(st.cov.determinant());
    for (std::size_t i = 0; i < n; ++i) dens(i, c) = log_gauss(points[i], st.mean, inv, log_det);
  }
  // Per-point shift keeps exp() finite; it cancels in the responsibilities.
  for (std::size_t i = 0; i < n; ++i) {
    const double mx = dens.row(i).maxCoeff();
    dens.row(i) = (dens.row(i).array() - mx).exp();
  }
  Eigen::Vector4d w = Eigen::Vector4d::Constant(1.0 / kReadoutStates);
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector4d r = dens.row(i).transpose().cwiseProduct(w);
      const double tot = r.sum();
      ll += std::log(tot);
      acc += r / tot;
    }
    w = acc / static_cast<double>(n);
    if (std::abs(ll - prev) <= opt.rel_tol * std::abs(ll)) break;
    prev = ll;
  }
  return {w(0), w(1), w(2), w(3)};
}

double mixture_log_density(const MixtureFit& fit, const Eigen::Vector2d& x) {
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for (const auto& c : fit.components) {
    const double t = std::log(c.weight) +
                     log_gauss(x, c.mean, c.cov.inverse(), std::log(c.cov.determinant()));
    terms.push_back(t);
    mx = std::max(mx, t);
  }
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

}  // namespace qpscope
