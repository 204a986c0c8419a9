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

#include "qpscope/inference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "qpscope/error.hpp"
#include "qpscope/least_squares.hpp"
#include "qpscope/parallel.hpp"
#include "qpscope/rng.hpp"
#include "qpscope/units.hpp"

namespace qpscope {

namespace {

// Weighted polynomial least squares; returns coefficients and covariance.
void weighted_poly(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& w, int degree, Eigen::VectorXd& coef,
                   Eigen::MatrixXd& cov) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(w[i]);
    for (int d = 0; d <= degree; ++d) a(i, d) = sw * std::pow(x[i], d);
    b(i) = sw * y[i];
  }
  const Eigen::MatrixXd ata = a.transpose() * a;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ata);
  if (lu.rank() < degree + 1) throw ParameterError("singular design: p1 values do not vary");
  cov = lu.inverse();
  coef = cov * (a.transpose() * b);
}

}  // namespace

PopulationFit rates_vs_population(const std::vector<PopulationRecord>& records) {
  if (records.size() < 2) throw ParameterError("population fit needs at least two records");
  std::vector<double> x, y, w;
  for (const auto& r : records) {
    x.push_back(r.p1);
    y.push_back(r.gamma);
    w.push_back(r.sigma > 0.0 ? 1.0 / (r.sigma * r.sigma) : 1.0);
  }
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;
  weighted_poly(x, y, w, 1, coef, cov);
  PopulationFit fit;
  fit.gamma0 = coef(0);
  fit.gamma1 = coef(0) + coef(1);
  fit.sigma0 = std::sqrt(cov(0, 0));
  fit.sigma1 = std::sqrt(cov(0, 0) + 2.0 * cov(0, 1) + cov(1, 1));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (coef(0) + coef(1) * x[i]);
    fit.chi2 += w[i] * r * r;
  }
  fit.dof = static_cast<int>(x.size()) - 2;
  if (x.size() >= 3) {
    try {
      Eigen::VectorXd q;
      Eigen::MatrixXd qcov;
      weighted_poly(x, y, w, 2, q, qcov);
      fit.curvature = q(2);
      fit.curvature_sigma = std::sqrt(qcov(2, 2));
    } catch (const ParameterError&) {
      // Only two distinct p1 values: no curvature information.
    }
  }
  return fit;
}

ArrheniusFit arrhenius_fit(const std::vector<double>& temp_k, const std::vector<double>& gamma,
                           double offset) {
  if (temp_k.size() != gamma.size() || temp_k.size() < 2) {
    throw ParameterError("Arrhenius fit needs at least two matched points");
  }
  const std::size_t n = temp_k.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gamma[i] > offset)) throw ParameterError("rate does not exceed the offset");
    x[i] = 1.0 / kelvin_to_ghz(temp_k[i]);
    y[i] = std::log(gamma[i] - offset);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("Arrhenius fit needs distinct temperatures");
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - icpt - slope * x[i];
    rss += r * r;
  }
  ArrheniusFit fit;
  fit.ea_ghz = -slope;
  fit.prefactor = std::exp(icpt);
  if (n > 2) {
    const double s2 = rss / static_cast<double>(n - 2);
    fit.ea_sigma = std::sqrt(s2 / sxx);
    fit.ln_prefactor_sigma = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return fit;
}

const FitParam& FitResult::get(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return p;
  }
  throw ParameterError("fit has no parameter " + name);
}

double joint_model_rate(const TunnelingModel& model, double gamma_offset, const RatePoint& pt,
                        RateMethod method) {
  const double g0 = model.state_rate(0, pt.temp_k, method) + gamma_offset;
  if (pt.state == 0) return g0;
  if (pt.state != 1) throw ParameterError("rate point state must be 0 or 1");
  const double g1 = model.state_rate(1, pt.temp_k, method) + gamma_offset;
  const double f21 = model.ladder().frequency(1, 2);
  const double w = safe_exp(-f21 / kelvin_to_ghz(pt.temp_k));
  const double g2 = w < 1e-6 ? 0.0 : model.state_rate(2, pt.temp_k, method) + gamma_offset;
  return effective_rate(1.0, g0, g1, g2, f21, pt.temp_k);
}

FitResult joint_fit(const std::vector<RatePoint>& data, const JointFitOptions& opt) {
  if (data.size() < 4) throw ParameterError("joint fit needs at least four rate points");
  for (const auto& pt : data) {
    if (!(pt.gamma > 0.0)) throw ParameterError("joint fit rates must be positive");
    if (!(pt.temp_k > 0.0)) throw ParameterError("joint fit temperatures must be positive");
  }
  const TransmonLadder ladder(opt.base, opt.ng, MatrixElementSource::numeric);

  auto device_at = [&](const Eigen::VectorXd& x) {
    DeviceParams p = opt.base;
    p.delta_ghz = x(0);
    p.ddelta_ghz = x(1);
    p.x_res = std::exp(x(2));
    return p;
  };
  auto residuals = [&](const Eigen::VectorXd& x) {
    const TunnelingModel model(device_at(x), ladder);
    const double offset = std::exp(x(3));
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
      const RatePoint& pt = data[i];
      const double rel = pt.sigma > 0.0 ? pt.sigma / pt.gamma : 0.1;
      const double m = joint_model_rate(model, offset, pt, opt.method);
      r(static_cast<Eigen::Index>(i)) = (std::log(m) - std::log(pt.gamma)) / rel;
    }
    return r;
  };

  Eigen::VectorXd lo(4), hi(4);
  lo << 20.0, 0.5, std::log(1e-15), std::log(1e-5);
  hi << 120.0, 15.0, std::log(1e-5), std::log(1e3);

  // Starting offset: the smallest ground-state rate; starting x_res scales a
  // reference model onto the coldest excited-state point.
  double off0 = std::numeric_limits<double>::infinity();
  const RatePoint* coldest = nullptr;
  for (const auto& pt : data) {
    if (pt.state == 0) off0 = std::min(off0, pt.gamma);
    if (pt.state == 1 && (!coldest || pt.temp_k < coldest->temp_k)) coldest = &pt;
  }
  if (!std::isfinite(off0)) off0 = 0.1;

  LmResult best;
  best.cost = std::numeric_limits<double>::infinity();
  int starts = 0;
  for (double d0 : opt.delta_starts) {
    for (double dd0 : opt.ddelta_starts) {
      Eigen::VectorXd x0(4);
      double ln_x = std::log(1e-9);
      if (coldest) {
        Eigen::VectorXd probe(4);
        probe << d0, dd0, ln_x, std::log(1e-12);
        const TunnelingModel ref(device_at(probe), ladder);
        const double m = joint_model_rate(ref, 0.0, *coldest, opt.method);
        const double excess = std::max(coldest->gamma - 0.5 * off0, 0.1 * coldest->gamma);
        if (m > 0.0) ln_x += std::log(excess / m);
      }
      x0 << d0, dd0, std::clamp(ln_x, lo(2) + 1.0, hi(2) - 1.0), std::log(0.9 * off0);
      ++starts;
      try {
        LmResult r = levenberg_marquardt(residuals, x0, lo, hi);
        if (r.cost < best.cost) best = std::move(r);
      } catch (const NumericError&) {
        // A start that wanders into an invalid region is skipped.
      }
    }
  }
  if (!std::isfinite(best.cost)) throw NumericError("joint fit failed from every start");
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double span = hi(k) - lo(k);
    if (best.params(k) <= lo(k) + 1e-6 * span || best.params(k) >= hi(k) - 1e-6 * span) {
      static const char* names[] = {"delta_ghz", "ddelta_ghz", "ln_x_res", "ln_gamma_offset"};
      throw NumericError(std::string("joint fit parameter at bound: ") + names[k]);
    }
  }

  FitResult out;
  out.covariance = best.covariance;
  out.residual_norm = std::sqrt(best.cost);
  out.iterations = best.iterations;
  out.starts = starts;
  out.converged = best.converged;
  auto sd = [&](int k) { return std::sqrt(std::max(0.0, best.covariance(k, k))); };
  const double x_res = std::exp(best.params(2));
  const double off = std::exp(best.params(3));
  out.params = {{"delta_ghz", best.params(0), sd(0)},
                {"ddelta_ghz", best.params(1), sd(1)},
                {"ln_x_res", best.params(2), sd(2)},
                {"x_res", x_res, x_res * sd(2)},
                {"gamma_offset", off, off * sd(3)}};
  return out;
}

PsdFit psd_rate(const std::vector<Symbols>& sequences, double dt_s) {
  if (sequences.empty()) throw ParameterError("no symbol sequences");
  if (!(dt_s > 0.0)) throw ParameterError("dt_s must be positive");
  const std::size_t n = sequences.front().size();
  if (n < 64) throw ParameterError("sequences too short for a spectrum");
  const std::size_t half = n / 2;
  std::vector<double> avg(half + 1, 0.0);
  Eigen::FFT<double> fft;
  std::vector<double> x(n);
  std::vector<std::complex<double>> spec;
  for (const Symbols& seq : sequences) {
    if (seq.size() != n) throw ParameterError("sequences must share one length");
    double mean = 0.0;
    for (auto s : seq) mean += s;
    mean /= static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = seq[t] - mean;
    fft.fwd(spec, x);
    for (std::size_t k = 1; k <= half; ++k) {
      avg[k] += 2.0 * dt_s / static_cast<double>(n) * std::norm(spec[k]);
    }
  }
  for (auto& v : avg) v /= static_cast<double>(sequences.size());

  // Log-spaced bins from the lowest resolved frequency to Nyquist.
  const double df = 1.0 / (static_cast<double>(n) * dt_s);
  const double f_lo = df;
  const double f_hi = half * df;
  constexpr int kBins = 80;
  PsdFit fit;
  std::vector<double> sum(kBins, 0.0), fsum(kBins, 0.0);
  std::vector<int> count(kBins, 0);
  const double span = std::log(f_hi / f_lo) * (1.0 + 1e-12);
  for (std::size_t k = 1; k <= half; ++k) {
    const double f = k * df;
    const int b = std::min(kBins - 1, static_cast<int>(std::log(f / f_lo) / span * kBins));
    sum[b] += avg[k];
    fsum[b] += f;
    ++count[b];
  }
  for (int b = 0; b < kBins; ++b) {
    if (count[b] == 0) continue;
    fit.freq_hz.push_back(fsum[b] / count[b]);
    fit.power.push_back(sum[b] / count[b]);
  }
  const std::size_t m = fit.power.size();
  for (double p : fit.power) {
    if (!(p > 0.0)) throw NumericError("no Lorentzian knee (empty spectrum)");
  }

  const double a0 = fit.power.front();
  double w0 = 0.0;
  const std::size_t tail = std::max<std::size_t>(1, m / 10);
  for (std::size_t i = m - tail; i < m; ++i) w0 += fit.power[i];
  w0 /= static_cast<double>(tail);
  double fc0 = std::sqrt(f_lo * f_hi);
  for (std::size_t i = 0; i < m; ++i) {
    if (fit.power[i] < 0.5 * (a0 + w0)) {
      fc0 = fit.freq_hz[i];
      break;
    }
  }
  auto residuals = [&](const Eigen::VectorXd& p) {
    const double a = std::exp(p(0)), fc = std::exp(p(1)), w = std::exp(p(2));
    Eigen::VectorXd r(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const double u = fit.freq_hz[i] / fc;
      r(static_cast<Eigen::Index>(i)) = std::log(a / (1.0 + u * u) + w) - std::log(fit.power[i]);
    }
    return r;
  };
  Eigen::VectorXd start(3), lo(3), hi(3);
  start << std::log(std::max(a0 - w0, 1e-3 * a0)), std::log(fc0), std::log(std::max(w0, 1e-12));
  lo << start(0) - 30.0, std::log(f_lo * 1e-3), std::log(1e-20);
  hi << start(0) + 30.0, std::log(f_hi * 1e3), std::log(10.0 * a0 + 1.0);
  const LmResult r = levenberg_marquardt(residuals, start, lo, hi);
  fit.amplitude = std::exp(r.params(0));
  fit.fc_hz = std::exp(r.params(1));
  fit.white = std::exp(r.params(2));
  fit.gamma = std::numbers::pi * fit.fc_hz;
  const bool knee_resolved = fit.fc_hz > 2.0 * f_lo && fit.fc_hz < 0.5 * f_hi;
  const bool above_floor = fit.amplitude > 3.0 * fit.white;
  if (!knee_resolved || !above_floor) throw NumericError("no Lorentzian knee");
  return fit;
}

MixtureFit fit_readout(const std::vector<std::vector<JumpTrace>>& traces,
                       const PipelineOptions& opt) {
  if (traces.empty()) throw ParameterError("no plan points to fit the readout");
  const std::size_t per_point = std::max<std::size_t>(1, opt.gmm_max_points / traces.size());
  Points2 sample;
  for (const auto& point_traces : traces) {
    Points2 all;
    for (const auto& tr : point_traces) {
      const Points2 pts = trace_points(tr);
      all.insert(all.end(), pts.begin(), pts.end());
    }
    const std::size_t take = std::min(per_point, all.size());
    const double stride = static_cast<double>(all.size()) / static_cast<double>(take);
    for (std::size_t k = 0; k < take; ++k) {
      sample.push_back(all[static_cast<std::size_t>(k * stride)]);
    }
  }
  MixtureFit mix = fit_gmm(sample, opt.gmm_components, substream_seed(opt.seed, "gmm"));
  label_mixture(mix, opt.readout);
  refine_states(mix, sample, opt.readout);
  return mix;
}

PointEstimate analyze_point(const std::vector<JumpTrace>& traces, const PlanPoint& point,
                            const MixtureFit& mix) {
  if (traces.empty()) throw ParameterError("no traces for plan point");
  Points2 all;
  for (const auto& tr : traces) {
    const Points2 pts = trace_points(tr);
    all.insert(all.end(), pts.begin(), pts.end());
  }
  const std::array<double, kReadoutStates> w = state_weights(mix, all);
  double p1_est = 0.0;
  for (int s = 0; s < kReadoutStates; ++s) {
    if (state_plasmon(s) == 1) p1_est += w[s];
  }

  std::vector<Symbols> symbols;
  symbols.reserve(traces.size());
  for (const auto& tr : traces) symbols.push_back(assign_parity(trace_points(tr), mix));
  const HmmFit hmm = fit_parity_hmm(symbols, traces.front().dt_s);

  PointEstimate est;
  est.point = point;
  // Readout errors replace the cluster uniformly, so two of the three wrong
  // clusters flip parity and the observed excited fraction is
  // p1 (1 - 2e) + e with e the occupancy-weighted parity error.
  const double occ_plus = hmm.p_mp / (hmm.p_pm + hmm.p_mp);
  const double e = occ_plus * hmm.err_p + (1.0 - occ_plus) * hmm.err_m;
  est.p1_raw = p1_est;
  est.p1_est = (p1_est - e) / (1.0 - 2.0 * e);
  est.gamma = hmm.gamma();
  est.sigma = hmm.gamma_sigma();
  est.gamma_pm = hmm.gamma_pm;
  est.gamma_mp = hmm.gamma_mp;
  est.err_p = hmm.err_p;
  est.err_m = hmm.err_m;
  est.loglik = hmm.loglik;
  return est;
}

PipelineResult analyze_dataset(const std::vector<std::vector<JumpTrace>>& traces,
                               const std::vector<PlanPoint>& plan, const PipelineOptions& opt) {
  if (traces.size() != plan.size()) throw ParameterError("trace groups do not match the plan");
  PipelineResult out;
  out.readout = fit_readout(traces, opt);
  out.points.resize(plan.size());
  parallel_for(plan.size(), [&](std::size_t k) {
    out.points[k] = analyze_point(traces[k], plan[k], out.readout);
  });

  std::map<double, std::vector<PopulationRecord>> by_temp;
  for (const auto& est : out.points) {
    by_temp[est.point.temp_k].push_back({est.p1_est, est.gamma, est.sigma});
  }
  for (const auto& [temp, records] : by_temp) {
    if (records.size() < 2) continue;
    TemperatureRates tr;
    tr.temp_k = temp;
    tr.fit = rates_vs_population(records);
    out.temperatures.push_back(tr);
    if (tr.fit.gamma0 > 0.0) out.rate_points.push_back({temp, tr.fit.gamma0, tr.fit.sigma0, 0});
    if (tr.fit.gamma1 > 0.0) out.rate_points.push_back({temp, tr.fit.gamma1, tr.fit.sigma1, 1});
  }
  if (opt.run_joint_fit && out.temperatures.size() >= 2) {
    out.joint = joint_fit(out.rate_points, opt.joint);
    out.has_joint_fit = true;
  }
  return out;
}

}  // namespace qpscope
