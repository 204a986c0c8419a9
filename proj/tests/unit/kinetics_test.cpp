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

#include "qpscope/kinetics.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "qpscope/error.hpp"
#include "qpscope/qp_distribution.hpp"
#include "qpscope/units.hpp"
#include "test_support.hpp"

namespace qpscope {
namespace {

using testing::RelNear;

constexpr double kT = 0.020;
constexpr Direction kLR = Direction::left_to_right;
constexpr Direction kRL = Direction::right_to_left;

struct KineticsFixture : ::testing::Test {
  DeviceParams params = reference_device();
  DirectionalRates rates{};
  void SetUp() override {
    rates = directional_rates(TunnelingModel(params), kT, RateMethod::numeric);
  }
  DeviceParams at_bound() const {
    DeviceParams p = params;
    p.n_cp = n_cp_for_gamma_bound(rates, params, kT, 1.0);
    return p;
  }
};

TEST_F(KineticsFixture, DirectionalRatesSumToStateRates) {
  const TunnelingModel m(params);
  EXPECT_NEAR(rates.g0_lr + rates.g0_rl, m.state_rate(0, kT, RateMethod::numeric), 1e-15);
  EXPECT_NEAR(rates.g1_lr + rates.g1_rl, m.state_rate(1, kT, RateMethod::numeric), 1e-12);
  EXPECT_GT(rates.g1_lr, 1000.0 * rates.g1_rl);
}

TEST_F(KineticsFixture, BoundOnPerQuasiparticleRate) {
  const DeviceParams p = at_bound();
  double peak = 0.0;
  for (int k = 0; k <= 20; ++k) {
    for (Direction d : {kLR, kRL}) {
      const double g = per_qp_rate(d, 0.05 * k, rates, p, kT);
      EXPECT_LE(g, 1.0 + 1e-12);
      peak = std::max(peak, g);
    }
  }
  EXPECT_NEAR(peak, 1.0, 1e-12);
}

TEST_F(KineticsFixture, DirectionsBalanceAtThermalExcitation) {
  const double fq = TunnelingModel(params).ladder().frequency(0, 1);
  const double w = std::exp(-fq / kelvin_to_ghz(kT));
  const double p_th = w / (1.0 + w);
  const double lr = per_qp_rate(kLR, p_th, rates, params, kT);
  const double rl = per_qp_rate(kRL, p_th, rates, params, kT);
  EXPECT_TRUE(RelNear(lr, rl, 0.02));
}

TEST_F(KineticsFixture, PerQuasiparticleRateAffineInPopulation) {
  for (double p1 : {0.2, 0.5, 0.8}) {
    for (Direction d : {kLR, kRL}) {
      const double second = per_qp_rate(d, p1 + 0.1, rates, params, kT) -
                            2.0 * per_qp_rate(d, p1, rates, params, kT) +
                            per_qp_rate(d, p1 - 0.1, rates, params, kT);
      EXPECT_NEAR(second, 0.0, 1e-15);
    }
  }
  EXPECT_THROW(per_qp_rate(kLR, 1.2, rates, params, kT), ParameterError);
}

TEST_F(KineticsFixture, PerQuasiparticleRateIndependentOfDensity) {
  DeviceParams more = params;
  more.x_res *= 4.0;
  const DirectionalRates r4 = directional_rates(TunnelingModel(more), kT, RateMethod::numeric);
  EXPECT_TRUE(RelNear(per_qp_rate(kLR, 0.3, r4, more, kT), per_qp_rate(kLR, 0.3, rates, params, kT),
                      1e-6));
}

TEST(KineticsTest, SteadyDensities) {
  const KineticsParams kin{2e-9, 10.0, 0.0};
  const Densities sym = steady_densities(kin, 0.7, 0.7);
  EXPECT_DOUBLE_EQ(sym.x_l, 2e-10);
  EXPECT_DOUBLE_EQ(sym.x_r, 2e-10);
  const KineticsParams fast{2e-9 * 1e8, 1e8 * 10.0, 0.0};
  const Densities big = steady_densities(fast, 1.0, 0.0);
  EXPECT_TRUE(RelNear(big.x_l, 2e-10, 1e-8));
  EXPECT_TRUE(RelNear(big.x_r, 2e-10, 1e-8));
  const Densities skew = steady_densities(kin, 1.0, 0.2);
  EXPECT_DOUBLE_EQ(skew.x_l, 2e-10 * (1.0 - 0.8 / 11.2));
  EXPECT_DOUBLE_EQ(skew.x_r, 2e-10 * (1.0 + 0.8 / 11.2));
}

TEST(KineticsTest, RightHandSideVanishesAtSteadyState) {
  const KineticsParams kin{3e-9, 10.0, 0.0};
  for (auto [lr, rl] : {std::pair{1.0, 0.0}, {0.3, 0.9}, {0.02, 0.02}}) {
    const Densities x = steady_densities(kin, lr, rl);
    const auto rhs = kinetic_rhs(kin, lr, rl, x);
    EXPECT_NEAR(rhs[0], 0.0, 1e-15 * kin.g);
    EXPECT_NEAR(rhs[1], 0.0, 1e-15 * kin.g);
  }
}

TEST(KineticsTest, TunnelingConservesQuasiparticles) {
  const KineticsParams off{0.0, 0.0, 0.0};
  const auto rhs = kinetic_rhs(off, 0.8, 0.1, {3e-10, 7e-10});
  EXPECT_NEAR(rhs[0] + rhs[1], 0.0, 1e-25);
  EXPECT_NE(rhs[0], 0.0);
}

TEST(KineticsTest, SteadyDensitiesMatchOdeIntegration) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double lr = 1.0, rl = 0.05;
  const KineticsParams kin{5.6e-9, 10.0, 1.0e7};
  const Densities analytic = steady_densities(kin, lr, rl);
  // Integrate in units of g/s so the tolerances are relative.
  const double scale = kin.g / kin.s;
  State x{0.0, 0.0};
  auto rhs = [&](const State& y, State& dy, double) {
    const auto d = kinetic_rhs(kin, lr, rl, {y[0] * scale, y[1] * scale});
    dy = {d[0] / scale, d[1] / scale};
  };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-12, 1e-12),
                             rhs, x, 0.0, 100.0 / kin.s, 1e-3);
  State dx{};
  rhs(x, dx, 0.0);
  EXPECT_LT(std::hypot(dx[0], dx[1]), 1e-9 * std::hypot(x[0], x[1]) * kin.s);
  EXPECT_TRUE(RelNear(x[0] * scale, analytic.x_l, 1e-3));
  EXPECT_TRUE(RelNear(x[1] * scale, analytic.x_r, 1e-3));
}

TEST_F(KineticsFixture, ParityRateBetweenChordAndUncorrectedLine) {
  const DeviceParams p = at_bound();
  const KineticsParams fast{0.0, 1e12, 0.0};
  for (double s : {1.0, 10.0, 100.0}) {
    const KineticsParams kin{0.0, s, 0.0};
    const double a = kinetic_parity_rate(0.0, kin, rates, p, kT);
    const double b = kinetic_parity_rate(1.0, kin, rates, p, kT);
    for (int k = 0; k <= 20; ++k) {
      const double p1 = 0.05 * k;
      const double g = kinetic_parity_rate(p1, kin, rates, p, kT);
      EXPECT_LE(g, kinetic_parity_rate(p1, fast, rates, p, kT) * (1.0 + 1e-12));
      EXPECT_GE(g, (a + p1 * (b - a)) * (1.0 - 1e-12));
    }
  }
}

TEST_F(KineticsFixture, FastTrappingKeepsCurveLinear) {
  EXPECT_LT(linearity_deviation({0.0, 1000.0, 0.0}, rates, at_bound(), kT), 0.01);
  EXPECT_LT(linearity_deviation({0.0, 1e9, 0.0}, rates, at_bound(), kT), 1e-8);
}

TEST_F(KineticsFixture, DeviationAtReferenceTrappingWithinFivePercent) {
  const double dev = linearity_deviation({0.0, 10.0, 0.0}, rates, at_bound(), kT);
  EXPECT_NEAR(dev, 0.0973, 5e-4);
  EXPECT_LT(dev, 0.05);
}

TEST_F(KineticsFixture, DeviationGrowsAsTrappingSlows) {
  const DeviceParams p = at_bound();
  double prev = 0.0;
  for (double s : {100.0, 10.0, 3.0, 1.0}) {
    const double dev = linearity_deviation({0.0, s, 0.0}, rates, p, kT);
    EXPECT_GT(dev, prev) << s;
    prev = dev;
  }
}

TEST_F(KineticsFixture, SymmetricTunnelingIsLinear) {
  const DirectionalRates sym{0.3, 0.3, 2.0, 2.0};
  EXPECT_NEAR(linearity_deviation({0.0, 1.0, 0.0}, sym, at_bound(), kT), 0.0, 1e-14);
}

TEST_F(KineticsFixture, DefaultPairCountKeepsRateBelowBound) {
  ASSERT_DOUBLE_EQ(params.n_cp, 1e12);
  EXPECT_LT(per_qp_rate(kLR, 1.0, rates, params, kT), 1.0);
  EXPECT_LT(linearity_deviation({0.0, 10.0, 0.0}, rates, params, kT), 0.01);
}

TEST(KineticsTest, Validation) {
  EXPECT_THROW(validate(KineticsParams{-1.0, 1.0, 0.0}), ParameterError);
  EXPECT_THROW(validate(KineticsParams{0.0, -1.0, 0.0}), ParameterError);
  EXPECT_THROW(validate(KineticsParams{0.0, 1.0, -1.0}), ParameterError);
  EXPECT_THROW(steady_densities({1.0, 0.0, 0.0}, 0.0, 0.0), ParameterError);
}

}  // namespace
}  // namespace qpscope
