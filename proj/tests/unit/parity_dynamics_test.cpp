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

#include "qpscope/parity_dynamics.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include "qpscope/error.hpp"
#include "test_support.hpp"

namespace qpscope {
namespace {

using testing::RelNear;

PumpConfig reference_pump(double p_e, int drive = 1) {
  PumpConfig cfg;
  cfg.drive_parity = drive;
  cfg.p_e_conditional = p_e;
  cfg.gamma0 = 0.14;
  cfg.gamma1 = 37.0 * 0.14;
  cfg.t1_s = 193e-6;
  return cfg;
}

TEST(ParityDynamicsTest, GeneratorColumnsSumToZero) {
  for (double pe : {0.0, 0.2, 0.5}) {
    for (int drive : {1, -1}) {
      const Eigen::Matrix4d q = pump_rate_matrix(reference_pump(pe, drive));
      for (int c = 0; c < 4; ++c) EXPECT_EQ(q.col(c).sum(), 0.0);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          if (r != c) EXPECT_GE(q(r, c), 0.0);
        }
      }
    }
  }
}

TEST(ParityDynamicsTest, UndrivenSectorIsDark) {
  const Eigen::Matrix4d q = pump_rate_matrix(reference_pump(0.4, 1));
  EXPECT_EQ(q(kExcitedMinus, kGroundMinus), 0.0);
  EXPECT_GT(q(kExcitedPlus, kGroundPlus), 0.0);
}

TEST(ParityDynamicsTest, UndrivenSymmetricChainIsUniformOverParity) {
  PumpConfig cfg = reference_pump(0.0);
  cfg.gamma1 = cfg.gamma0;
  const Eigen::VectorXd p = steady_state(pump_rate_matrix(cfg));
  EXPECT_NEAR(p(kGroundPlus), 0.5, 1e-12);
  EXPECT_NEAR(p(kGroundMinus), 0.5, 1e-12);
  EXPECT_NEAR(p(kExcitedPlus), 0.0, 1e-12);
  EXPECT_NEAR(p(kExcitedMinus), 0.0, 1e-12);
}

TEST(ParityDynamicsTest, SteadyStateIsNormalizedNullVector) {
  for (double pe : {0.05, 0.3, 0.5}) {
    const Eigen::Matrix4d q = pump_rate_matrix(reference_pump(pe));
    const Eigen::VectorXd p = steady_state(q);
    EXPECT_NEAR(p.sum(), 1.0, 1e-14);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LT((q * p).cwiseAbs().maxCoeff(), 1e-12 * q.cwiseAbs().maxCoeff());
  }
}

TEST(ParityDynamicsTest, TwoStateChainGivesBoltzmannRatio) {
  const double up = 0.3, down = 2.1;
  Eigen::Matrix2d q;
  q << -up, down, up, -down;
  const Eigen::VectorXd p = steady_state(q);
  EXPECT_NEAR(p(1) / p(0), up / down, 1e-14);
}

TEST(ParityDynamicsTest, SteadyStateMatchesLongTimePropagation) {
  const Eigen::Matrix4d q = pump_rate_matrix(reference_pump(0.25));
  const Eigen::Vector4d start(1.0, 0.0, 0.0, 0.0);
  const Eigen::Matrix4d prop = (q * 2000.0).exp();
  const Eigen::Vector4d late = prop * start;
  EXPECT_LT((late - steady_state(q)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ParityDynamicsTest, RelabelingPermutesSolution) {
  const Eigen::Matrix4d q = pump_rate_matrix(reference_pump(0.3));
  Eigen::PermutationMatrix<4> perm;
  perm.indices() << 2, 0, 3, 1;
  const Eigen::Matrix4d qp = perm * q * perm.transpose();
  const Eigen::VectorXd expected = perm * steady_state(q);
  EXPECT_LT((steady_state(qp) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ParityDynamicsTest, DisconnectedChainIsRejected) {
  EXPECT_THROW(steady_state(Eigen::Matrix3d::Zero()), NumericError);
}

TEST(ParityDynamicsTest, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(pump_polarization(37.0, 0.0), 0.5);
  EXPECT_NEAR(pump_polarization(37.0, 0.5), 0.050, 1e-15);
  for (double pe : {0.0, 0.1, 0.37, 0.5}) EXPECT_DOUBLE_EQ(pump_polarization(1.0, pe), 0.5);
  EXPECT_THROW(pump_polarization(0.5, 0.1), ParameterError);
  EXPECT_THROW(pump_polarization(37.0, 0.6), ParameterError);
}

TEST(ParityDynamicsTest, MasterEquationAgreesWithClosedForm) {
  for (int k = 0; k <= 10; ++k) {
    const double pe = 0.05 * k;
    EXPECT_TRUE(RelNear(driven_parity_population(reference_pump(pe)),
                        pump_polarization(37.0, pe), 0.10))
        << pe;
  }
  EXPECT_NEAR(driven_parity_population(reference_pump(0.5)), 0.05002, 1e-5);
}

TEST(ParityDynamicsTest, OppositeDriveMirrorsPolarization) {
  for (double pe : {0.1, 0.3, 0.5}) {
    const double minus_drive_plus = 1.0 - driven_parity_population(reference_pump(pe, 1));
    const double minus_drive_minus = driven_parity_population(reference_pump(pe, -1));
    EXPECT_NEAR(minus_drive_minus, 1.0 - minus_drive_plus, 1e-12);
  }
}

TEST(ParityDynamicsTest, FitRecoversRatio) {
  std::vector<double> pe, clean, noisy;
  std::mt19937_64 eng(7);
  std::normal_distribution<double> noise(0.0, 0.02);
  for (int k = 0; k <= 10; ++k) {
    pe.push_back(0.05 * k);
    clean.push_back(pump_polarization(37.0, pe.back()));
    noisy.push_back(clean.back() * (1.0 + noise(eng)));
  }
  EXPECT_TRUE(RelNear(fit_pump_ratio(pe, clean).ratio, 37.0, 0.05));
  const PumpFit f = fit_pump_ratio(pe, noisy);
  EXPECT_NEAR(f.ratio, 37.0, 2.0);
  EXPECT_GT(f.sigma, 0.0);
  EXPECT_THROW(fit_pump_ratio({0.1}, {0.4}), ParameterError);
}

TEST(ParityDynamicsTest, Validation) {
  PumpConfig cfg = reference_pump(0.6);
  QPSCOPE_EXPECT_THROW_MSG(validate(cfg), ParameterError, "p_e_conditional");
  cfg = reference_pump(0.1, 0);
  EXPECT_THROW(validate(cfg), ParameterError);
  cfg = reference_pump(0.1);
  cfg.t1_s = 0.0;
  EXPECT_THROW(validate(cfg), ParameterError);
  cfg = reference_pump(0.1);
  cfg.gamma1 = -1.0;
  EXPECT_THROW(validate(cfg), ParameterError);
}

}  // namespace
}  // namespace qpscope
