// Copyright 2026 The rcar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "rcar/dist.hpp"
#include "rcar/stats.hpp"

namespace {

using namespace rcar;
using Complex = std::complex<double>;

JointLaw example1() { return JointLaw::independent(Marginal::uniform(0.2, 0.8), Marginal::normal(0, 1)); }

std::vector<Marginal> all_families() {
  return {Marginal::normal(0.3, 1.7),
          Marginal::uniform(-1.0, 2.5),
          Marginal::point_mass(0.7),
          Marginal::finite_discrete({-1.0, 0.5, 2.0}, {0.2, 0.5, 0.3}),
          Marginal::log_normal_abs(-0.5, 0.4, 0.3)};
}

TEST(Dist, ConstructionRejectsInvalidParameters) {
  EXPECT_THROW(Marginal::normal(0, 0), std::invalid_argument);
  EXPECT_THROW(Marginal::normal(0, -1), std::invalid_argument);
  EXPECT_THROW(Marginal::uniform(1, 1), std::invalid_argument);
  EXPECT_THROW(Marginal::finite_discrete({1, 2}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(Marginal::finite_discrete({1, 2}, {-0.1, 1.1}), std::invalid_argument);
  EXPECT_THROW(Marginal::log_normal_abs(0, 1, 1.5), std::invalid_argument);
  EXPECT_THROW(JointLaw::zero_inflated(1.2, Marginal::point_mass(1), Marginal::point_mass(1)), std::invalid_argument);
  EXPECT_THROW(JointLaw::discrete({{0.5, 1.0, 0.5}, {0.5, 2.0, 0.4}}), std::invalid_argument);
  EXPECT_NO_THROW(JointLaw::discrete({{0.5, 1.0, 0.5}, {0.5, 2.0, 0.5 - 1e-13}}));
}

TEST(Dist, DiscreteJointPointMassAlwaysSamplesTheAtom) {
  const auto law = JointLaw::discrete({{0.5, 1.0, 1.0}});
  RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_pair(law, rng);
    ASSERT_EQ(p.rho, 0.5);
    ASSERT_EQ(p.eps, 1.0);
  }
}

TEST(Dist, FullZeroInflationForcesZeroRho) {
  const auto law = JointLaw::zero_inflated(1.0, Marginal::normal(0, 1), Marginal::point_mass(2.0));
  RandomStream rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_pair(law, rng);
    ASSERT_EQ(p.rho, 0.0);
    ASSERT_EQ(p.eps, 2.0);
  }
}

TEST(Dist, UniformRhoMeanMonteCarlo) {
  const auto law = example1();
  RandomStream rng(3);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_pair(law, rng).rho;
  const double sd = 0.6 / std::sqrt(12.0);
  EXPECT_NEAR(sum / n, 0.5, 3.0 * sd / 1000.0);
}

TEST(Dist, ZeroInflationFrequency) {
  const auto law = JointLaw::zero_inflated(0.3, Marginal::uniform(0.2, 0.8), Marginal::normal(0, 1));
  RandomStream rng(4);
  const int n = 200000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += sample_pair(law, rng).rho == 0.0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.3, 4.0 * std::sqrt(0.3 * 0.7 / n));
  EXPECT_DOUBLE_EQ(prob_rho_zero(law), 0.3);
}

TEST(Dist, DiscreteJointKeepsPairsTogether) {
  const auto law = JointLaw::discrete({{0.5, 1.0, 0.5}, {-0.5, -1.0, 0.5}});
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_pair(law, rng);
    ASSERT_EQ(p.eps, 2.0 * p.rho);
  }
}

TEST(Dist, LogMomentRho) {
  const auto pm = JointLaw::independent(Marginal::point_mass(0.5), Marginal::normal(0, 1));
  EXPECT_NEAR(log_moment_rho(pm), std::log(0.5), 1e-15);
  EXPECT_NEAR(log_moment_rho(example1()), -0.7610454309409128, 1e-12);
  const auto zi = JointLaw::zero_inflated(0.3, Marginal::uniform(0.2, 0.8), Marginal::normal(0, 1));
  EXPECT_EQ(log_moment_rho(zi), -std::numeric_limits<double>::infinity());
  const auto explosive = JointLaw::independent(Marginal::point_mass(1.5), Marginal::normal(0, 1));
  EXPECT_NEAR(log_moment_rho(explosive), std::log(1.5), 1e-15);
}

TEST(Dist, LogMomentOfNormalRhoUsesQuadrature) {
  // E log|Z| for Z ~ N(0,1) equals -(gamma + log 2) / 2.
  const auto law = JointLaw::independent(Marginal::normal(0, 1), Marginal::normal(0, 1));
  EXPECT_NEAR(log_moment_rho(law), -(std::numbers::egamma + std::numbers::ln2) / 2.0, 1e-9);
  const auto ln = JointLaw::independent(Marginal::log_normal_abs(-0.3, 0.5, 0.5), Marginal::normal(0, 1));
  EXPECT_NEAR(log_moment_rho(ln), -0.3, 1e-12);
}

TEST(Dist, LogMomentAgreesWithMonteCarlo) {
  for (const auto& rho : {Marginal::uniform(-0.9, 0.4), Marginal::normal(0.2, 0.6), Marginal::uniform(0.2, 0.8)}) {
    const auto law = JointLaw::independent(rho, Marginal::normal(0, 1));
    RandomStream rng(6);
    const int n = 1000000;
    std::vector<double> logs(n);
    for (auto& v : logs) v = std::log(std::abs(sample_pair(law, rng).rho));
    const double se = stats::standard_deviation(logs) / std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(stats::mean(logs), log_moment_rho(law), 3.0 * se) << rho.family();
  }
}

TEST(Dist, LogPlusMomentEps) {
  auto with_eps = [](Marginal m) { return JointLaw::independent(Marginal::point_mass(0.5), std::move(m)); };
  EXPECT_EQ(log_plus_moment_eps(with_eps(Marginal::uniform(-1, 1))), 0.0);
  EXPECT_NEAR(log_plus_moment_eps(with_eps(Marginal::point_mass(std::numbers::e))), 1.0, 1e-15);
  // scipy.integrate.quad of 2 * log(x) * phi(x) over [1, inf).
  EXPECT_NEAR(log_plus_moment_eps(with_eps(Marginal::normal(0, 1))), 0.12205043635709784, 1e-9);
  // Uniform(-3, 2): (1/5) * ([x log x - x] from 1 to 3 + [x log x - x] from 1 to 2).
  const double expect = ((3 * std::log(3.0) - 3 + 1) + (2 * std::log(2.0) - 2 + 1)) / 5.0;
  EXPECT_NEAR(log_plus_moment_eps(with_eps(Marginal::uniform(-3, 2))), expect, 1e-14);
}

TEST(Dist, CfClosedForms) {
  for (const auto& m : all_families()) {
    if (!m.has_cf()) {
      EXPECT_FALSE(m.cf(1.0).has_value());
      continue;
    }
    EXPECT_EQ(*m.cf(0.0), Complex(1.0, 0.0)) << m.family();
  }
  EXPECT_NEAR(std::abs(*Marginal::normal(0, 1).cf(1.0) - Complex(std::exp(-0.5), 0.0)), 0.0, 1e-15);
  const double t = std::numbers::pi;
  const Complex i(0.0, 1.0);
  const Complex uniform = (std::exp(i * 0.8 * t) - std::exp(i * 0.2 * t)) / (i * t * 0.6);
  EXPECT_NEAR(std::abs(*Marginal::uniform(0.2, 0.8).cf(t) - uniform), 0.0, 1e-14);
}

TEST(Dist, CfPropertiesOnGrid) {
  for (const auto& m : all_families()) {
    if (!m.has_cf()) continue;
    for (int k = -100; k <= 100; ++k) {
      const double t = 0.137 * k;
      const Complex c = *m.cf(t);
      ASSERT_LE(std::abs(c), 1.0 + 1e-12) << m.family() << " t=" << t;
      const Complex c_neg = *m.cf(-t);
      ASSERT_NEAR(std::abs(c_neg - std::conj(c)), 0.0, 1e-15) << m.family();
    }
  }
}

TEST(Dist, CfMatchesMonteCarlo) {
  for (const auto& m : all_families()) {
    if (!m.has_cf()) continue;
    RandomStream rng(7);
    const int n = 1000000;
    std::vector<double> draws(n);
    for (auto& v : draws) v = m.sample(rng);
    double worst = 0.0;
    for (int k = -10; k <= 10; ++k) {
      const double t = 0.5 * k;
      Complex acc(0.0, 0.0);
      for (double v : draws) acc += std::polar(1.0, t * v);
      worst = std::max(worst, std::abs(acc / static_cast<double>(n) - *m.cf(t)));
    }
    EXPECT_LT(worst, 0.01) << m.family();
  }
}

TEST(Dist, TransitionCdfExamples) {
  EXPECT_NEAR(*oracle_transition_cdf(example1(), 0.0, 0.0), 0.5, 1e-15);
  const auto two_point = JointLaw::discrete({{0.5, 1.0, 0.5}, {0.5, -1.0, 0.5}});
  EXPECT_DOUBLE_EQ(*oracle_transition_cdf(two_point, 2.0, 0.0), 0.5);
  // scipy.integrate.quad of Phi(1 - r) / 0.6 over [0.2, 0.8].
  EXPECT_NEAR(*oracle_transition_cdf(example1(), 1.0, 1.0), 0.6888543300524818, 1e-10);
}

TEST(Dist, TransitionCdfMatchesMonteCarlo) {
  const auto law = example1();
  RandomStream rng(8);
  const int n = 10000000;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_pair(law, rng);
    below += p.rho * 1.0 + p.eps <= 1.0 ? 1 : 0;
  }
  const double g = *oracle_transition_cdf(law, 1.0, 1.0);
  EXPECT_NEAR(static_cast<double>(below) / n, g, 4.0 * std::sqrt(g * (1 - g) / n));
}

TEST(Dist, TransitionCdfMonotoneWithLimits) {
  const std::vector<JointLaw> laws{
      example1(),
      JointLaw::independent(Marginal::uniform(-0.5, 0.9), Marginal::uniform(-1, 1)),
      JointLaw::independent(Marginal::finite_discrete({0.1, 0.6}, {0.4, 0.6}), Marginal::normal(1, 2)),
      JointLaw::independent(Marginal::normal(0, 0.3), Marginal::point_mass(1.0)),
      JointLaw::zero_inflated(0.25, Marginal::uniform(0.2, 0.8), Marginal::normal(0, 1)),
      JointLaw::discrete({{0.5, 1.0, 0.3}, {-0.2, 0.0, 0.7}}),
  };
  for (const auto& law : laws) {
    const double scale = eps_scale(law);
    for (double x : {-3.0, 0.0, 0.4, 5.0}) {
      double prev = 0.0;
      for (int k = -200; k <= 200; ++k) {
        const double y = 0.05 * k;
        const double g = *oracle_transition_cdf(law, x, y);
        ASSERT_GE(g, prev - 1e-10) << law.family() << " x=" << x << " y=" << y;
        ASSERT_GE(g, 0.0);
        ASSERT_LE(g, 1.0);
        prev = g;
      }
      EXPECT_NEAR(*oracle_transition_cdf(law, x, -50.0 * scale - 50.0 * std::abs(x)), 0.0, 1e-9);
      EXPECT_NEAR(*oracle_transition_cdf(law, x, 50.0 * scale + 50.0 * std::abs(x)), 1.0, 1e-9);
    }
  }
}

TEST(Dist, TransitionDensity) {
  // scipy.integrate.quad of phi(0.5 - r) / 0.6 over [0.2, 0.8].
  EXPECT_NEAR(*oracle_transition_density(example1(), 1.0, 0.5), 0.3930380739631755, 1e-10);
  const auto law = JointLaw::independent(Marginal::uniform(0.2, 0.8), Marginal::uniform(-1, 1));
  // Density integrates to one and matches the CDF slope.
  for (double x : {0.0, 0.7, -2.0}) {
    const double h = 1e-5;
    for (double y : {-0.9, 0.1, 0.8}) {
      const double slope = (*oracle_transition_cdf(law, x, y + h) - *oracle_transition_cdf(law, x, y - h)) / (2 * h);
      EXPECT_NEAR(*oracle_transition_density(law, x, y), slope, 1e-5);
    }
  }
  EXPECT_FALSE(oracle_transition_density(JointLaw::discrete({{0.5, 1.0, 1.0}}), 0.0, 1.0).has_value());
}

TEST(Dist, JointCfFactorizesUnderIndependence) {
  const auto law = example1();
  const Complex j = *oracle_joint_cf(law, 1.3, -0.4);
  EXPECT_NEAR(std::abs(j - *oracle_cf_rho(law, 1.3) * *oracle_cf_eps(law, -0.4)), 0.0, 1e-15);
  const auto pair = JointLaw::discrete({{0.5, 1.0, 1.0}});
  EXPECT_NEAR(std::abs(*oracle_joint_cf(pair, 2.0, 3.0) - std::polar(1.0, 0.5 * 2.0 + 3.0)), 0.0, 1e-15);
  const auto ln = JointLaw::independent(Marginal::log_normal_abs(0, 1, 0.5), Marginal::normal(0, 1));
  EXPECT_FALSE(oracle_cf_rho(ln, 1.0).has_value());
  EXPECT_FALSE(oracle_joint_cf(ln, 1.0, 1.0).has_value());
}

TEST(Dist, NonDegeneracy) {
  EXPECT_TRUE(is_non_degenerate(example1()));
  EXPECT_FALSE(is_non_degenerate(JointLaw::independent(Marginal::point_mass(0.5), Marginal::point_mass(1))));
  EXPECT_FALSE(is_non_degenerate(JointLaw::discrete({{0.5, 1.0, 1.0}})));
  EXPECT_TRUE(is_non_degenerate(JointLaw::discrete({{0.5, 1.0, 0.5}, {0.5, 2.0, 0.5}})));
}

}  // namespace
