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

#include "qpscope/tunneling.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qpscope/error.hpp"
#include "qpscope/inference.hpp"
#include "qpscope/transmon.hpp"
#include "qpscope/units.hpp"
#include "test_support.hpp"

namespace qpscope {
namespace {

using testing::RelNear;

constexpr double kFq = 3.8241924443970623;
constexpr Direction kLR = Direction::left_to_right;
constexpr Direction kRL = Direction::right_to_left;

struct SfCase {
  double temp_k;
  double f;
  Direction dir;
  int sign;
  double value;
};

TEST(StructureFactorTest, NumericMatchesQuadratureOracle) {
  const SfCase cases[] = {
      {0.02, -kFq, kLR, 1, 5.486987959768e-10},  {0.02, -kFq, kLR, -1, 6.100645657811e-12},
      {0.02, -kFq, kRL, 1, 1.870775986643e-14},  {0.02, -kFq, kRL, -1, 1.627724670088e-15},
      {0.02, 0.0, kLR, 1, 2.469599231247e-14},   {0.02, 0.0, kRL, -1, 1.253913350751e-15},
      {0.06, -kFq, kLR, 1, 1.451176738132e-09},  {0.06, -kFq, kLR, -1, 2.442423259996e-11},
      {0.06, -kFq, kRL, 1, 2.474329377953e-11},  {0.06, -kFq, kRL, -1, 2.331588494824e-12},
      {0.06, 0.0, kLR, 1, 3.220387310449e-11},   {0.06, 0.0, kRL, -1, 1.865778650337e-12},
  };
  const DeviceParams p = reference_device();
  for (const SfCase& c : cases) {
    const double v = structure_factor(c.dir, c.sign, c.f, p, c.temp_k, RateMethod::numeric);
    EXPECT_TRUE(RelNear(v, c.value, 1e-6)) << c.temp_k << " " << c.f << " " << c.sign;
  }
}

TEST(StructureFactorTest, BesselAgreesOnDominantBranch) {
  const DeviceParams p = reference_device();
  for (double t : {0.020, 0.030, 0.040, 0.050, 0.060}) {
    const double num = structure_factor(kLR, 1, -kFq, p, t, RateMethod::numeric);
    const double bes = structure_factor(kLR, 1, -kFq, p, t, RateMethod::bessel);
    EXPECT_TRUE(RelNear(bes, num, 0.02)) << t;
  }
}

// Agreement claimed wherever kT < dDelta/5, dDelta < Delta/5 and
// dDelta > |f|. Fails on the subdominant branches; see the acceptance report.
TEST(StructureFactorTest, BesselAgreesOverRegimeGrid) {
  const DeviceParams p = reference_device();
  double worst = 0.0;
  for (double t : {0.020, 0.030, 0.040, 0.050, 0.060}) {
    ASSERT_LT(kelvin_to_ghz(t), p.ddelta_ghz / 5.0);
    for (double f : {-kFq, 0.0, kFq}) {
      for (Direction d : {kLR, kRL}) {
        for (int s : {1, -1}) {
          const double num = structure_factor(d, s, f, p, t, RateMethod::numeric);
          const double bes = structure_factor(d, s, f, p, t, RateMethod::bessel);
          worst = std::max(worst, std::abs(bes - num) / num);
        }
      }
    }
  }
  EXPECT_LT(worst, 0.02);
}

TEST(StructureFactorTest, VanishesWithoutQuasiparticles) {
  DeviceParams p = reference_device();
  p.x_res = 0.0;
  for (RateMethod m : {RateMethod::numeric, RateMethod::bessel}) {
    EXPECT_LT(structure_factor(kLR, 1, -kFq, p, 0.005, m), 1e-150);
  }
}

TEST(StructureFactorTest, CoherenceFactorSuppressesMinusBranch) {
  const DeviceParams p = reference_device();
  for (double t : {0.02, 0.05, 0.08}) {
    for (double f : {-kFq, 0.0, kFq}) {
      for (Direction d : {kLR, kRL}) {
        for (RateMethod m : {RateMethod::numeric, RateMethod::bessel}) {
          EXPECT_LT(structure_factor(d, -1, f, p, t, m), structure_factor(d, 1, f, p, t, m));
        }
      }
    }
  }
}

TEST(StructureFactorTest, BesselRegimeEnforced) {
  DeviceParams p = reference_device();
  p.ddelta_ghz = 3.0;
  EXPECT_FALSE(bessel_regime(p, -kFq));
  QPSCOPE_EXPECT_THROW_MSG(structure_factor(kLR, 1, -kFq, p, 0.02, RateMethod::bessel),
                           ParameterError, "ddelta_ghz > |f_fi|");
  EXPECT_NO_THROW(structure_factor(kLR, 1, -kFq, p, 0.02, RateMethod::numeric));
  const TunnelingModel model(p);
  EXPECT_EQ(model.resolve(RateMethod::automatic), RateMethod::numeric);
  EXPECT_EQ(TunnelingModel(reference_device()).resolve(RateMethod::automatic),
            RateMethod::bessel);
}

TEST(TunnelingRatesTest, NumericStateRatesMatchOracle) {
  const TunnelingModel m(reference_device());
  EXPECT_TRUE(RelNear(m.state_rate(0, 0.02, RateMethod::numeric), 7.061362010540325e-4, 1e-6));
  EXPECT_TRUE(RelNear(m.state_rate(1, 0.02, RateMethod::numeric), 4.622659360375764, 1e-6));
  EXPECT_TRUE(RelNear(m.state_rate(2, 0.02, RateMethod::numeric), 2.335319855689757, 1e-6));
  EXPECT_TRUE(RelNear(m.state_rate(0, 0.06, RateMethod::numeric), 0.9229563186974287, 1e-6));
  EXPECT_TRUE(RelNear(m.state_rate(1, 0.06, RateMethod::numeric), 13.677171800238861, 1e-6));
  EXPECT_TRUE(RelNear(m.state_rate(2, 0.06, RateMethod::numeric), 15.608388029226028, 1e-6));
}

TEST(TunnelingRatesTest, StateTotalsAreSumsOfPartials) {
  const TunnelingModel m(reference_device());
  for (RateMethod meth : {RateMethod::numeric, RateMethod::bessel, RateMethod::approx}) {
    const RateBundle b = m.rates(0.04, meth);
    auto part = [&](int i, int f, Direction d) { return b.partials.at({i, f, d}); };
    EXPECT_NEAR(b.gamma0, part(0, 0, kRL) + part(0, 1, kRL) + part(0, 0, kLR) + part(0, 1, kLR),
                1e-12 * b.gamma0);
    double six = 0.0;
    for (int f : {0, 1, 2}) six += part(1, f, kLR) + part(1, f, kRL);
    EXPECT_NEAR(b.gamma1, six, 1e-12 * b.gamma1);
    for (const auto& [key, v] : b.partials) EXPECT_GE(v, 0.0);
  }
}

TEST(TunnelingRatesTest, PartialRateHierarchyAtBase) {
  const TunnelingModel m(reference_device());
  auto r = [&](int i, int f, Direction d) {
    return m.partial_rate(i, f, d, 0.020, RateMethod::numeric);
  };
  const double top = r(1, 0, kLR);
  const std::vector<double> middle = {r(0, 1, kRL), r(1, 0, kRL), r(1, 2, kRL), r(0, 0, kLR),
                                      r(0, 0, kRL), r(1, 1, kLR), r(1, 1, kRL)};
  const std::vector<double> bottom = {r(0, 1, kLR), r(1, 2, kLR)};
  const double mid_max = *std::max_element(middle.begin(), middle.end());
  const double mid_min = *std::min_element(middle.begin(), middle.end());
  const double low_max = *std::max_element(bottom.begin(), bottom.end());
  EXPECT_GT(top, 100.0 * mid_max);
  EXPECT_GT(mid_min, 100.0 * low_max);
}

TEST(TunnelingRatesTest, DetailedBalanceInActivationLaws) {
  const TunnelingModel m(reference_device());
  const double t = 0.020;
  auto r = [&](int i, int f, Direction d) { return m.partial_rate(i, f, d, t, RateMethod::approx); };
  const double down = r(1, 0, kRL) + r(1, 0, kLR);
  const double up = r(0, 1, kRL) + r(0, 1, kLR);
  const double f10 = m.ladder().frequency(0, 1);
  EXPECT_TRUE(RelNear(down, std::exp(f10 / kelvin_to_ghz(t)) * up, 0.01));
}

TEST(TunnelingRatesTest, ActivationLawDiagonalPartialsAreEqual) {
  const TunnelingModel m(reference_device());
  const double a = m.partial_rate(0, 0, kRL, 0.03, RateMethod::approx);
  EXPECT_DOUBLE_EQ(m.partial_rate(0, 0, kLR, 0.03, RateMethod::approx), a);
  EXPECT_DOUBLE_EQ(m.partial_rate(1, 1, kRL, 0.03, RateMethod::approx), a);
  EXPECT_DOUBLE_EQ(m.partial_rate(1, 1, kLR, 0.03, RateMethod::approx), a);
}

TEST(TunnelingRatesTest, ActivationLawStateRatesAtBase) {
  const DeviceParams p = reference_device();
  EXPECT_TRUE(RelNear(approx_state_rate(1, p, 0.020), 4.7, 0.05));
  EXPECT_TRUE(RelNear(approx_state_rate(0, p, 0.020), 7.0e-4, 0.05));
  EXPECT_TRUE(RelNear(TunnelingModel(p).state_rate(0, 0.020, RateMethod::numeric), 7.0e-4, 0.05));
  const double ratio = approx_state_rate(1, p, 0.020) / approx_state_rate(0, p, 0.020);
  EXPECT_TRUE(RelNear(ratio, 6.7e3, 0.05));
}

TEST(TunnelingRatesTest, EtaPrefactor) {
  const DeviceParams p = reference_device();
  EXPECT_NEAR(eta_prefactor(p, 3.826), 16.76, 0.01);
  const double fq = qubit_frequency(p, kDefaultNg);
  const double expected = 4.0 * std::sqrt((p.ej_ghz / p.ec_ghz) * (p.ddelta_ghz / p.delta_ghz)) +
                          std::sqrt(2.0 * p.delta_ghz / (p.ddelta_ghz - fq));
  EXPECT_DOUBLE_EQ(eta_prefactor(p, fq), expected);
}

TEST(TunnelingRatesTest, ActivationRatioFollowsQubitBoltzmannFactor) {
  const DeviceParams p = reference_device();
  const double t = 0.004;
  const double g0 = approx_state_rate(0, p, t);
  const double g1 = approx_state_rate(1, p, t);
  EXPECT_LT(g0, 1e-20);
  EXPECT_TRUE(RelNear(std::log(g1 / g0), kFq / kelvin_to_ghz(t), 0.05));
}

TEST(TunnelingRatesTest, NoQuasiparticlesNoRates) {
  DeviceParams p = reference_device();
  p.x_res = 0.0;
  const TunnelingModel m(p);
  for (int s : {0, 1, 2}) EXPECT_LT(m.state_rate(s, 0.005, RateMethod::numeric), 1e-100);
}

TEST(TunnelingRatesTest, RatesLinearInResidentDensityBelowSixtyMillikelvin) {
  DeviceParams p = reference_device();
  DeviceParams q = p;
  q.x_res *= 3.0;
  const TunnelingModel a(p), b(q);
  for (double t : {0.02, 0.04, 0.055}) {
    for (int s : {0, 1}) {
      EXPECT_TRUE(RelNear(b.state_rate(s, t, RateMethod::numeric),
                          3.0 * a.state_rate(s, t, RateMethod::numeric), 1e-6))
          << t << " " << s;
    }
  }
}

TEST(TunnelingRatesTest, EffectiveRateEndpointsAndLinearity) {
  const TunnelingModel m(reference_device());
  EnvConditions env = reference_environment();
  env.temp_k = 0.05;
  const double g0 = m.state_rate(0, env.temp_k, RateMethod::bessel);
  EXPECT_DOUBLE_EQ(effective_rate(0.0, m, env, RateMethod::bessel), g0 + env.gamma_offset);
  const double h = 0.1;
  for (double p : {0.2, 0.5, 0.8}) {
    const double second = effective_rate(p + h, m, env, RateMethod::bessel) -
                          2.0 * effective_rate(p, m, env, RateMethod::bessel) +
                          effective_rate(p - h, m, env, RateMethod::bessel);
    EXPECT_NEAR(second, 0.0, 1e-12);
  }
  EXPECT_THROW(effective_rate(1.5, m, env, RateMethod::bessel), ParameterError);
}

TEST(TunnelingRatesTest, EffectiveRateIncludesSecondExcitedState) {
  const double w = std::exp(-3.3 / kelvin_to_ghz(0.1));
  EXPECT_DOUBLE_EQ(effective_rate(1.0, 1.0, 2.0, 5.0, 3.3, 0.1), (2.0 + w * 5.0) / (1.0 + w));
  EXPECT_DOUBLE_EQ(effective_rate(0.5, 1.0, 2.0, 5.0, 3.3, 0.005), 1.5);
}

TEST(TunnelingRatesTest, SecondExcitedStateWeightAtHundredTenMillikelvin) {
  const TunnelingModel m(reference_device());
  const double w = gamma2_weight(m.ladder().frequency(1, 2), 0.110);
  EXPECT_NEAR(w, 0.18864, 1e-4);
  EXPECT_LE(w, 0.18);
}

TEST(TunnelingRatesTest, NoGapRatio) {
  const DeviceParams p = reference_device();
  const double r = no_gap_ratio(p, 0.020);
  EXPECT_NEAR(r, 5.5, 1.0);
  EXPECT_GT(34.0 / r, 5.0);
  EXPECT_TRUE(RelNear(no_gap_ratio(p, 0.080), 0.5 * r, 1e-12));
}

TEST(TunnelingRatesTest, ArrheniusSlopesOfModelRates) {
  const TunnelingModel m(reference_device());
  const double fq = m.ladder().frequency(0, 1);
  std::vector<double> t, g0, g1;
  for (int k = 0; k <= 12; ++k) {
    t.push_back(0.035 + 0.005 * k);
    g0.push_back(m.state_rate(0, t.back(), RateMethod::automatic));
    g1.push_back(m.state_rate(1, t.back(), RateMethod::automatic));
  }
  const ArrheniusFit a0 = arrhenius_fit(t, g0, 0.0);
  const ArrheniusFit a1 = arrhenius_fit(t, g1, 0.0);
  EXPECT_TRUE(RelNear(a0.ea_ghz - a1.ea_ghz, fq, 0.15));
  EXPECT_TRUE(RelNear(a1.ea_ghz, reference_device().ddelta_ghz - fq, 0.15));
}

TEST(TunnelingRatesTest, FinalLevelsAndNames) {
  EXPECT_EQ(final_levels(0), (std::vector<int>{0, 1}));
  EXPECT_EQ(final_levels(1), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(final_levels(2), (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(final_levels(3), ParameterError);
  EXPECT_EQ(rate_method_from_string("bessel"), RateMethod::bessel);
  EXPECT_THROW(rate_method_from_string("magic"), ParameterError);
}

}  // namespace
}  // namespace qpscope
