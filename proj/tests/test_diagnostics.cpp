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


#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rcar/diagnostics.hpp"
#include "rcar/errors.hpp"
#include "rcar/process.hpp"
#include "rcar/stats.hpp"

namespace {

using namespace rcar;

JointLaw example1() { return JointLaw::independent(Marginal::uniform(0.2, 0.8), Marginal::normal(0, 1)); }
JointLaw example2() { return JointLaw::independent(Marginal::uniform(0.2, 0.8), Marginal::uniform(-1, 1)); }

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

TEST(Diagnostics, HypothesesForExample1) {
  const auto r = check_hypotheses(example1());
  EXPECT_NEAR(r.log_moment_rho, -0.7610454309409128, 1e-12);
  EXPECT_TRUE(r.stationary_limit);
  EXPECT_TRUE(r.harris_regenerative);
  EXPECT_TRUE(r.non_atomic_limit);
  EXPECT_FALSE(r.atom_regenerative);
  EXPECT_TRUE(has(r.applicable, "stationary-limit"));
  EXPECT_TRUE(has(r.applicable, "harris-regenerative"));
}

TEST(Diagnostics, HypothesesForZeroInflation) {
  const auto r = check_hypotheses(JointLaw::zero_inflated(0.3, Marginal::uniform(0.2, 0.8), Marginal::normal(0, 1)));
  EXPECT_EQ(r.log_moment_rho, -HUGE_VAL);
  EXPECT_TRUE(r.atom_regenerative);
  EXPECT_FALSE(r.harris_regenerative);
  EXPECT_TRUE(has(r.applicable, "atom-regenerative"));
}

TEST(Diagnostics, HypothesesForExplosiveLaw) {
  const auto r = check_hypotheses(JointLaw::independent(Marginal::point_mass(1.5), Marginal::normal(0, 1)));
  EXPECT_NEAR(r.log_moment_rho, std::log(1.5), 1e-15);
  EXPECT_FALSE(r.stationary_limit);
  EXPECT_EQ(r.applicable, std::vector<std::string>{"none"});
  ASSERT_FALSE(r.findings.empty());
  EXPECT_NE(r.findings[0].find("stationary-limit hypotheses fail"), std::string::npos);
}

TEST(Diagnostics, DyadicResolutions) {
  const auto r = dyadic_resolutions(3.0, 3);
  EXPECT_EQ(r, (std::vector<double>{3.0, 1.5, 0.75, 0.375}));
}

TEST(Diagnostics, AtomTestOnConstantSamples) {
  const std::vector<double> s(10000, 3.0);
  const auto r = atom_test(s, dyadic_resolutions(1.0, 10));
  for (double f : r.max_fraction) EXPECT_EQ(f, 1.0);
  EXPECT_TRUE(r.atomic);
}

TEST(Diagnostics, AtomTestOnNormalSamples) {
  RandomStream rng(1);
  std::vector<double> s(100000);
  for (auto& v : s) v = rng.normal();
  const std::vector<double> res{0.01 * 1024, 0.01};
  const auto r = atom_test(s, res);
  // 0.3989 * delta plus binomial noise at the fullest of ~ 1000 bins.
  EXPECT_NEAR(r.max_fraction.back(), 0.004, 0.001);
  EXPECT_FALSE(r.atomic);
}

TEST(Diagnostics, AtomTestMaxFractionIsMonotone) {
  RandomStream rng(2);
  std::vector<double> s(20000);
  for (auto& v : s) v = rng.uniform(-3.0, 5.0) * rng.uniform();
  const auto r = atom_test(s, dyadic_resolutions(8.0, 20));
  for (std::size_t k = 1; k < r.max_fraction.size(); ++k) EXPECT_LE(r.max_fraction[k], r.max_fraction[k - 1]);
}

TEST(Diagnostics, AtomTestPreconditions) {
  const std::vector<double> few(100, 1.0);
  EXPECT_THROW(atom_test(few, dyadic_resolutions(1.0, 3)), InsufficientData);
  const std::vector<double> s(10000, 1.0);
  const std::vector<double> not_dyadic{1.0, 0.3};
  EXPECT_THROW(atom_test(s, not_dyadic), PreconditionError);
}

TEST(Diagnostics, AtomicLimitIsFlagged) {
  // rho takes the value 0 with positive probability and eps is discrete, so
  // the stationary law is discrete.
  const auto law = JointLaw::discrete({{0.0, 1.0, 0.5}, {0.5, -1.0, 0.5}});
  const auto samples = stationary_values(StationarySampler(law), 100000, 3, 1);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const double base = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(*hi - *lo))));
  std::vector<double> res;
  for (double d = base; d >= 1e-6; d /= 2) res.push_back(d);
  const auto r = atom_test(samples, res);
  EXPECT_GT(r.max_fraction.back(), 0.2);
  EXPECT_TRUE(r.atomic);
}

TEST(Diagnostics, ConvergenceForExample2) {
  const std::size_t n_list[] = {5, 20, 100};
  const auto r = convergence_check(example2(), n_list, 10000, 0.0, 4, 1);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.ks_distance.back(), 0.02);
  EXPECT_NEAR(r.critical_value, 0.023018074130013652, 1e-12);
}

TEST(Diagnostics, ConvergenceWithZeroRhoIsImmediate) {
  const auto law = JointLaw::independent(Marginal::point_mass(0.0), Marginal::normal(0, 1));
  const std::size_t n_list[] = {1};
  const auto r = convergence_check(law, n_list, 10000, 50.0, 5, 1);
  EXPECT_LT(r.ks_distance[0], r.critical_value);
}

TEST(Diagnostics, ConvergencePreconditions) {
  const std::size_t n_list[] = {5};
  EXPECT_THROW(convergence_check(example2(), n_list, 999, 0.0, 6, 1), PreconditionError);
  const auto explosive = JointLaw::independent(Marginal::point_mass(1.5), Marginal::normal(0, 1));
  EXPECT_THROW(convergence_check(explosive, n_list, 1000, 0.0, 6, 1), PreconditionError);
}

TEST(Diagnostics, InitialConditionIsForgotten) {
  const auto near = terminal_values(example2(), 0.0, 200, 10000, 7, 1);
  const auto far = terminal_values(example2(), 1000.0, 200, 10000, 8, 1);
  EXPECT_LT(stats::ks_two_sample(near, far).statistic, 0.02);
}

TEST(Diagnostics, ConvergencePassFailIsStableAcrossSeeds) {
  const std::size_t n_list[] = {5, 20, 100};
  int failures = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed)
    failures += convergence_check(example2(), n_list, 10000, 0.0, seed, 1).passed ? 0 : 1;
  EXPECT_LE(failures, 1);
}

}  // namespace
