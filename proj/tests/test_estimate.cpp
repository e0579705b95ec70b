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
#include <vector>

#include <gtest/gtest.h>

#include "rcar/errors.hpp"
#include "rcar/estimate.hpp"
#include "rcar/stats.hpp"

namespace {

using namespace rcar;
using Complex = std::complex<double>;

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / (points - 1));
  return out;
}

JointLaw example1() { return JointLaw::independent(Marginal::uniform(0.2, 0.8), Marginal::normal(0, 1)); }

TEST(Estimate, ConstantPathTransitionCdf) {
  const std::vector<double> path{0, 0, 0, 0};
  const std::vector<double> y{-0.5, 0.0};
  const auto e = transition_cdf_estimate(path, -0.1, 0.2, y);
  EXPECT_FALSE(e.empty_bin);
  EXPECT_EQ(e.bin_count, 3u);
  EXPECT_EQ(e.values[0], 0.0);
  EXPECT_EQ(e.values[1], 1.0);
}

TEST(Estimate, EmptyBinIsFlagged) {
  const std::vector<double> path{0, 0.1, -0.2, 0.3};
  const std::vector<double> y{-1, 0, 1};
  const auto e = transition_cdf_estimate(path, 5.0, 0.5, y);
  EXPECT_TRUE(e.empty_bin);
  EXPECT_EQ(e.bin_count, 0u);
  for (double v : e.values) EXPECT_EQ(v, 0.0);
  const auto c = conditional_cf_estimate(path, 5.0, 0.5, y);
  EXPECT_TRUE(c.empty_bin);
  EXPECT_EQ(c.valid_count(), 0u);
}

TEST(Estimate, BinIsHalfOpen) {
  // X_0 = 1 sits on the lower edge of (1, 1.5] and is excluded; X_1 = 1.5 is
  // on the upper edge and included.
  const std::vector<double> path{1.0, 1.5, 7.0};
  const auto next = bin_successors(path, 1.0, 0.5);
  ASSERT_EQ(next.size(), 1u);
  EXPECT_EQ(next[0], 7.0);
}

TEST(Estimate, LastStateIsNeverABinMember) {
  const std::vector<double> path{5.0, 0.1};
  EXPECT_TRUE(bin_successors(path, 0.0, 1.0).empty());
}

TEST(Estimate, CfAtZeroAndConstantSuccessors) {
  const std::vector<double> path{0.05, 2.0, 0.05, 2.0, 0.05, 2.0};
  const std::vector<double> t{-1.7, 0.0, 0.4, 3.0};
  const auto e = conditional_cf_estimate(path, 0.0, 0.1, t);
  EXPECT_EQ(e.values[1], Complex(1.0, 0.0));
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_NEAR(std::abs(e.values[k] - std::polar(1.0, 2.0 * t[k])), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.values[k]), 1.0, 1e-15);
  }
}

TEST(Estimate, PointMassEpsRecovery) {
  // Transitions out of the origin bin with eps == 2 and an arbitrary rho land
  // at rho * x + 2 with x in (0, h], so the estimate is e^{2it} up to |t| h.
  RandomStream rng(1);
  const double h = 1e-3;
  std::vector<double> path;
  for (int j = 0; j < 500; ++j) {
    const double x = rng.uniform(0.0, h) + 1e-9;
    path.push_back(x);
    path.push_back(step(x, rng.uniform(-1.0, 1.0), 2.0));
  }
  const auto grid = linspace(-3, 3, 13);
  const auto e = recover_eps_cf(path, h, grid);
  ASSERT_EQ(e.bin_count, 500u);
  for (std::size_t k = 0; k < grid.size(); ++k)
    EXPECT_LT(std::abs(e.values[k] - std::polar(1.0, 2.0 * grid[k])), std::abs(grid[k]) * h + 1e-12);
  EXPECT_EQ(e.values[6], Complex(1.0, 0.0));
}

TEST(Estimate, RhoRecoveryForPointMassRho) {
  const double r = 0.4;
  const auto law = JointLaw::independent(Marginal::point_mass(r), Marginal::normal(0, 1));
  RandomStream rng(2);
  const auto t = simulate(law, 0.0, 1000000, false, rng);
  const auto grid = linspace(-2, 2, 21);
  const auto e = recover_rho_cf(t.path(), 0.05, 1.0, grid);
  EXPECT_EQ(e.values[10], Complex(1.0, 0.0));
  EXPECT_TRUE(e.valid[10]);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!e.valid[k]) continue;
    EXPECT_LT(std::abs(e.values[k] - std::polar(1.0, r * grid[k])), 0.1) << grid[k];
  }
}

TEST(Estimate, RhoRecoveryFlagsSmallDenominators) {
  const std::vector<double> path{0.05, 1.0, 1.02, 0.05, -1.0, 1.01, 0.05, 3.0};
  const auto grid = linspace(-2, 2, 5);
  EXPECT_THROW(recover_rho_cf(path, 0.1, 0.0, grid), PreconditionError);
  EXPECT_THROW(recover_rho_cf(path, 0.1, 50.0, grid), AllEntriesInvalid);
  EXPECT_THROW(recover_rho_cf(path, 0.1, 1.0, grid, 2.0), AllEntriesInvalid);
}

TEST(Estimate, JointCfOfDeterministicPair) {
  const auto law = JointLaw::discrete({{0.5, 1.0, 1.0}});
  RandomStream rng(3);
  // The chain sits at its fixed point 2; the bin at x = t1/t2 must contain 2.
  const auto t = simulate(law, 2.0, 50, false, rng);
  const double t1 = 3.9;
  const double t2 = 2.0;
  const auto e = joint_cf_from_transition(t.path(), 0.1, t1, t2);
  ASSERT_FALSE(e.empty_bin);
  EXPECT_EQ(e.x, t1 / t2);
  // Successor of any bin member is 2 = 0.5 * 2 + 1.
  EXPECT_NEAR(std::abs(e.value - std::polar(1.0, t2 * 2.0)), 0.0, 1e-15);
  EXPECT_THROW(joint_cf_from_transition(t.path(), 0.1, 1.0, 0.0), PreconditionError);
}

TEST(Estimate, JointCfAtZeroT1IsEpsEstimate) {
  RandomStream rng(4);
  const auto t = simulate(example1(), 0.0, 100000, false, rng);
  const double grid[1] = {1.3};
  const auto j = joint_cf_from_transition(t.path(), 0.1, 0.0, 1.3);
  EXPECT_EQ(j.value, recover_eps_cf(t.path(), 0.1, grid).values[0]);
}

TEST(Estimate, TwoPassFormulaIsBitIdentical) {
  RandomStream rng(5);
  const auto t = simulate(example1(), 0.0, 50000, false, rng);
  const auto path = t.path();
  const double x = 0.3;
  const double h = 0.2;
  const auto y = linspace(-3, 3, 61);
  const auto single = transition_cdf_estimate(path, x, h, y);
  double denominator = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) denominator += (path[i] > x && path[i] <= x + h) ? 1.0 : 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    double numerator = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      numerator += (path[i] > x && path[i] <= x + h && path[i + 1] <= y[k]) ? 1.0 : 0.0;
    ASSERT_EQ(single.values[k], numerator / denominator);
  }
}

TEST(Estimate, InvariantsOnRandomTuples) {
  const std::vector<JointLaw> laws{
      example1(),
      JointLaw::independent(Marginal::uniform(-0.9, 0.9), Marginal::uniform(-1, 1)),
      JointLaw::zero_inflated(0.3, Marginal::normal(0, 0.5), Marginal::normal(1, 2)),
      JointLaw::discrete({{0.5, 1.0, 0.3}, {-0.4, -1.0, 0.3}, {0.0, 0.2, 0.4}}),
  };
  const auto y = linspace(-6, 6, 121);
  // Built from integers so that t_grid[80 - k] == -t_grid[k] exactly.
  std::vector<double> t_grid;
  for (int k = -40; k <= 40; ++k) t_grid.push_back(0.1 * k);
  RandomStream meta(6);
  for (int trial = 0; trial < 40; ++trial) {
    const auto& law = laws[trial % laws.size()];
    RandomStream rng(1000 + trial);
    const auto traj = simulate(law, 0.0, 5000, false, rng);
    const double h = meta.uniform(0.02, 1.0);
    const double x = meta.uniform(-1.5, 1.0);
    const auto f = transition_cdf_estimate(traj, x, h, y);
    const auto c = conditional_cf_estimate(traj, x, h, t_grid);
    if (f.empty_bin) continue;
    for (std::size_t k = 0; k < y.size(); ++k) {
      ASSERT_GE(f.values[k], 0.0);
      ASSERT_LE(f.values[k], 1.0);
      if (k) {
        ASSERT_GE(f.values[k], f.values[k - 1]);
      }
    }
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      ASSERT_LE(std::abs(c.values[k]), 1.0 + 1e-12);
      ASSERT_EQ(c.values[t_grid.size() - 1 - k], std::conj(c.values[k]));
    }
    ASSERT_EQ(c.values[40], Complex(1.0, 0.0));
  }
}

TEST(Estimate, BandwidthRule) {
  EXPECT_NEAR(bandwidth_default(100000, 1.0), 0.106, 1e-15);
  EXPECT_NEAR(bandwidth_default(200000, 1.0) / bandwidth_default(100000, 1.0), std::pow(2.0, -0.2), 1e-15);
  const std::vector<double> flat(10, 3.0);
  EXPECT_THROW(bandwidth_default(flat), std::domain_error);
  const auto ladder = bandwidth_ladder(0.2, 3);
  EXPECT_EQ(ladder, (std::vector<double>{0.2, 0.1, 0.05}));
}

TEST(Estimate, DefaultProbeIsMedianAwayFromZero) {
  const std::vector<double> states{0.01, -0.02, 1.0, -2.0, 3.0};
  EXPECT_EQ(default_probe(states, 0.1), 2.0);
}

TEST(Estimate, FixedBandwidthConvergesInN) {
  // Successive differences of F_{n,h}(0, 0.5) at n = 1e4, 1e5, 1e6 shrink.
  RandomStream rng(7);
  const auto t = simulate(example1(), 0.0, 1000000, false, rng);
  const double y[1] = {0.5};
  std::vector<double> values;
  for (std::size_t n : {10000, 100000, 1000000})
    values.push_back(transition_cdf_estimate(t.path().first(n + 1), 0.0, 0.2, y).values[0]);
  EXPECT_LT(std::abs(values[2] - values[1]), std::abs(values[1] - values[0]) + 0.005);
}

}  // namespace
