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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rcar/dist.hpp"
#include "rcar/process.hpp"
#include "rcar/random.hpp"

namespace rcar {

class MissingDriving : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Cycle {
  std::size_t start;   // a regeneration time tau_j
  std::size_t length;  // tau_{j+1} - tau_j
};

/// Regeneration times are the indices n >= 1 with rho_n == 0 exactly.
/// Times index the path, so X_{tau} is trajectory.path()[tau].
struct RegenerationDecomposition {
  std::vector<std::size_t> tau;
  /// Complete cycles between successive regeneration times; they partition
  /// [tau.front(), tau.back()).
  std::vector<Cycle> cycles;
  /// Length of the segment [0, tau_1), or of the whole path when tau is empty.
  std::size_t delay_length = 0;

  std::vector<double> cycle_lengths() const;
  /// X values of cycle j, i.e. path[start, start + length).
  std::span<const double> cycle_states(const Trajectory& traj, std::size_t j) const;
};

RegenerationDecomposition decompose(const Trajectory& traj);

inline constexpr std::size_t kMinCycles = 100;

struct GeometricReport {
  double alpha;
  std::size_t cycles;
  double mean_length;
  double mean_length_se;
  double chi_square;
  std::size_t degrees_of_freedom;
  double chi_square_p;
  /// Pooled cells as (lower length, upper length or 0 for an open tail).
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  std::vector<double> observed;
  std::vector<double> expected;
  double ks_halves_statistic;
  double ks_halves_p;
};

/// Chi-square goodness of fit of cycle lengths to Geometric(alpha) on cells
/// pooled to expected count >= 5, plus a two-sample KS test between the first
/// and second halves of the cycle sequence. Throws InsufficientData below
/// kMinCycles complete cycles.
GeometricReport geometric_diagnostics(std::span<const double> cycle_lengths, double alpha);
GeometricReport geometric_diagnostics(const RegenerationDecomposition& decomp, double alpha);

struct RegenerationValueReport {
  std::size_t regenerations;
  /// X_{tau_j} == eps_{tau_j} for every j. Always true in a returned report:
  /// a violation throws InvariantViolation.
  bool identity_holds;
  std::optional<double> ks_statistic;
  std::optional<double> ks_p;
};

/// Checks X_{tau_j} = eps_{tau_j} bit-exactly and KS-tests {X_{tau_j}} against
/// the law of eps given rho = 0. Throws InsufficientData below kMinCycles
/// regenerations.
RegenerationValueReport regeneration_value_check(const RegenerationDecomposition& decomp, const Trajectory& traj,
                                                 const JointLaw& law);

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct HittingEstimate {
  double probability;
  double standard_error;
  std::size_t trials;
};

/// Monte Carlo estimate of P(X_n in [c, d] for some 1 <= n <= n_max | X_0 = x0).
HittingEstimate hitting_probability(const JointLaw& law, double x0, Interval interval, std::size_t n_max,
                                    std::size_t trials, RandomStream& rng);

/// Integral over y_grid (trapezoid) of min over x_grid of the transition
/// density at y. nullopt when the law has no density oracle.
std::optional<double> minorization_mass(const JointLaw& law, Interval interval, std::span<const double> y_grid,
                                        std::span<const double> x_grid);

struct MinorizationGrids {
  std::vector<double> x_grid;
  std::vector<double> y_grid;
};

/// 101 points across [c, d] and 401 points over a y-span covering at least
/// 99.9% of the transition mass from every x in the interval.
MinorizationGrids default_minorization_grids(const JointLaw& law, Interval interval);

struct ThetaOptions {
  std::size_t cap = 1000;
  std::size_t trials = 10000;
  std::size_t stationary_samples = 100000;
};

struct NxEntry {
  double x0;
  std::size_t n_x;
  double probability_at_n_x;
  bool cap_reached;
};

struct ThetaReport {
  Interval shrunk;
  double stationary_mass;
  double theta_estimate;
  std::vector<NxEntry> entries;
};

/// For each x0, the smallest n <= cap at which the simulated
/// P(X_n in [c, d] | X_0 = x0) exceeds theta = P(X_inf in shrunk) - delta,
/// where the shrunk interval trims (d - c) / 4 from each end.
ThetaReport estimate_theta_and_nx(const JointLaw& law, Interval interval, std::span<const double> x0_list,
                                  double delta, RandomStream& rng, const ThetaOptions& options = {});

struct HittingEntry {
  double x0;
  HittingEstimate estimate;
};

struct HarrisCheckReport {
  Interval interval;
  std::vector<HittingEntry> hitting;
  std::optional<double> min_density_mass;
  ThetaReport theta;
};

}  // namespace rcar
