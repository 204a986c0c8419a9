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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qpscope/error.hpp"
#include "qpscope/trace_sim.hpp"
#include "qpscope/units.hpp"
#include "test_support.hpp"

namespace qpscope {
namespace {

using testing::RelNear;

TEST(PopulationFitTest, TwoPointsAreExact) {
  const PopulationFit f = rates_vs_population({{0.0, 1.0, 0.1}, {0.5, 3.0, 0.1}});
  EXPECT_NEAR(f.gamma0, 1.0, 1e-12);
  EXPECT_NEAR(f.gamma1, 5.0, 1e-12);
  EXPECT_EQ(f.dof, 0);
}

TEST(PopulationFitTest, NoisyLineWithinThreeSigma) {
  std::mt19937_64 eng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<PopulationRecord> rec;
  const double sigma = 0.05;
  for (int i = 0; i < 10; ++i) {
    const double p1 = 0.05 * i;
    rec.push_back({p1, 0.14 + (4.7 - 0.14) * p1 + sigma * n(eng), sigma});
  }
  const PopulationFit f = rates_vs_population(rec);
  EXPECT_LT(std::abs(f.gamma0 - 0.14), 3.0 * f.sigma0);
  EXPECT_LT(std::abs(f.gamma1 - 4.7), 3.0 * f.sigma1);
  EXPECT_LT(std::abs(f.curvature), 3.0 * f.curvature_sigma);
  EXPECT_EQ(f.dof, 8);
}

TEST(PopulationFitTest, ConstantPopulationIsSingular) {
  QPSCOPE_EXPECT_THROW_MSG(rates_vs_population({{0.2, 1.0, 0.1}, {0.2, 1.1, 0.1}}),
                           ParameterError, "singular design");
  EXPECT_THROW(rates_vs_population({{0.2, 1.0, 0.1}}), ParameterError);
}

TEST(ArrheniusFitTest, RecoversExactActivation) {
  const double ea = 3.8, pref = 2e4, offset = 0.14;
  std::vector<double> t, g;
  for (double tk = 0.035; tk < 0.0951; tk += 0.005) {
    t.push_back(tk);
    g.push_back(offset + pref * std::exp(-ea / kelvin_to_ghz(tk)));
  }
  const ArrheniusFit f = arrhenius_fit(t, g, offset);
  EXPECT_NEAR(f.ea_ghz, ea, 1e-9);
  EXPECT_TRUE(RelNear(f.prefactor, pref, 1e-9));
  EXPECT_LT(f.ea_sigma, 1e-9);
}

TEST(ArrheniusFitTest, Errors) {
  QPSCOPE_EXPECT_THROW_MSG(arrhenius_fit({0.05, 0.06}, {0.1, 1.0}, 0.14), ParameterError,
                           "does not exceed");
  EXPECT_THROW(arrhenius_fit({0.05}, {1.0}, 0.0), ParameterError);
  EXPECT_THROW(arrhenius_fit({0.05, 0.05}, {1.0, 2.0}, 0.0), ParameterError);
}

std::vector<RatePoint> synthetic_rates(double rel_noise, std::uint64_t seed) {
  const DeviceParams truth = reference_device();
  const TunnelingModel model(truth);
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<RatePoint> out;
  for (int i = 0; i < 9; ++i) {
    const double t = 0.020 + 0.010 * i;
    for (int s : {0, 1}) {
      RatePoint pt{t, 0.0, 0.0, s};
      const double g = joint_model_rate(model, 0.14, pt, RateMethod::automatic);
      pt.gamma = g * std::exp(rel_noise * n(eng));
      pt.sigma = std::max(rel_noise, 0.01) * pt.gamma;
      out.push_back(pt);
    }
  }
  return out;
}

JointFitOptions joint_options() {
  JointFitOptions opt;
  opt.base = reference_device();
  return opt;
}

TEST(JointFitTest, NoiselessDataAreRecovered) {
  const FitResult f = joint_fit(synthetic_rates(0.0, 1), joint_options());
  const DeviceParams truth = reference_device();
  EXPECT_TRUE(RelNear(f.get("delta_ghz").value, truth.delta_ghz, 0.01));
  EXPECT_TRUE(RelNear(f.get("ddelta_ghz").value, truth.ddelta_ghz, 0.01));
  EXPECT_TRUE(RelNear(f.get("x_res").value, truth.x_res, 0.01));
  EXPECT_TRUE(RelNear(f.get("gamma_offset").value, 0.14, 0.01));
  QPSCOPE_EXPECT_THROW_MSG(f.get("nope"), ParameterError, "no parameter");
}

TEST(JointFitTest, TenPercentNoise) {
  const FitResult f = joint_fit(synthetic_rates(0.10, 2), joint_options());
  const DeviceParams truth = reference_device();
  EXPECT_TRUE(RelNear(f.get("ddelta_ghz").value, truth.ddelta_ghz, 0.05));
  EXPECT_TRUE(RelNear(f.get("x_res").value, truth.x_res, 0.20));
  EXPECT_GT(f.get("ddelta_ghz").sigma, 0.0);
}

TEST(JointFitTest, InputValidation) {
  std::vector<RatePoint> few(3, RatePoint{0.05, 1.0, 0.1, 0});
  EXPECT_THROW(joint_fit(few, joint_options()), ParameterError);
  std::vector<RatePoint> bad(4, RatePoint{0.05, 1.0, 0.1, 0});
  bad[2].gamma = -1.0;
  QPSCOPE_EXPECT_THROW_MSG(joint_fit(bad, joint_options()), ParameterError, "positive");
  const TunnelingModel m(reference_device());
  EXPECT_THROW(joint_model_rate(m, 0.0, RatePoint{0.05, 1.0, 0.1, 2}, RateMethod::numeric),
               ParameterError);
}

std::vector<Symbols> telegraph(double gamma, int n, double duration, double dt, double err,
                               std::uint64_t seed) {
  std::vector<Symbols> out;
  for (int j = 0; j < n; ++j) {
    const ParityPath p = simulate_parity_path(gamma, gamma, duration, seed + 2 * j);
    out.push_back(emit_symbols(p, err, err, dt, duration, seed + 2 * j + 1));
  }
  return out;
}

TEST(PsdRateTest, AgreesWithHiddenMarkovEstimate) {
  const auto seqs = telegraph(5.0, 20, 30.0, 2e-3, 0.02, 10);
  const PsdFit psd = psd_rate(seqs, 2e-3);
  const HmmFit hmm = fit_parity_hmm(seqs, 2e-3);
  EXPECT_TRUE(RelNear(psd.gamma, hmm.gamma(), 0.15));
  EXPECT_NEAR(psd.gamma, std::numbers::pi * psd.fc_hz, 1e-12);
}

TEST(PsdRateTest, IndependentOfSamplingInterval) {
  const auto fine = telegraph(5.0, 20, 30.0, 1e-3, 0.0, 20);
  const auto coarse = telegraph(5.0, 20, 30.0, 4e-3, 0.0, 20);
  EXPECT_TRUE(RelNear(psd_rate(fine, 1e-3).gamma, psd_rate(coarse, 4e-3).gamma, 0.15));
}

TEST(PsdRateTest, WhiteNoiseHasNoKnee) {
  std::mt19937_64 eng(5);
  std::bernoulli_distribution coin(0.5);
  std::vector<Symbols> seqs(10, Symbols(8192));
  for (auto& s : seqs) {
    for (auto& v : s) v = coin(eng) ? 1 : -1;
  }
  QPSCOPE_EXPECT_THROW_MSG(psd_rate(seqs, 2e-3), NumericError, "no Lorentzian knee");
  EXPECT_THROW(psd_rate({Symbols(10, 1)}, 2e-3), ParameterError);
}

TEST(PipelineTest, SmallClosure) {
  SimulationOptions sim;
  sim.n_traces = 10;
  const std::vector<PlanPoint> plan = {{0.020, 0.0}, {0.020, 0.3}};
  const ReadoutModel readout;
  const Dataset ds = simulate_experiment(plan, reference_device(), reference_environment(),
                                         readout, 2024, sim);
  PipelineOptions opt;
  opt.readout = readout;
  opt.seed = 2024;
  opt.run_joint_fit = false;
  const PipelineResult r = analyze_dataset(ds.traces, plan, opt);
  ASSERT_EQ(r.points.size(), 2u);
  for (std::size_t k = 0; k < plan.size(); ++k) {
    EXPECT_NEAR(r.points[k].p1_est, plan[k].p1, 0.02) << k;
    EXPECT_LT(std::abs(r.points[k].gamma - ds.points[k].gamma), 3.0 * r.points[k].sigma) << k;
  }
  ASSERT_EQ(r.temperatures.size(), 1u);
  EXPECT_FALSE(r.has_joint_fit);
  EXPECT_THROW(analyze_dataset(ds.traces, {plan[0]}, opt), ParameterError);
}

}  // namespace
}  // namespace qpscope
