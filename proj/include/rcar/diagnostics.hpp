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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcar/dist.hpp"

namespace rcar {

/// Screening of a law against the hypotheses of the limit, non-atomicity and
/// regeneration results.
struct HypothesisReport {
  double log_moment_rho;
  double log_plus_moment_eps;
  double prob_rho_zero;
  bool non_degenerate;

  /// E log|rho| < 0 and E(log|eps|)^+ < inf: X_n converges in law to the series limit.
  bool stationary_limit;
  /// stationary_limit, P(rho = 0) = 0 and a non-degenerate pair: the limit has no atoms.
  bool non_atomic_limit;
  /// stationary_limit and P(rho = 0) = 0: Harris recurrence route to regeneration.
  bool harris_regenerative;
  /// P(rho = 0) > 0: regeneration at the zeros of rho with geometric cycle lengths.
  bool atom_regenerative;

  /// Names of the applicable results, or {"none"}.
  std::vector<std::string> applicable;
  /// One line per failed hypothesis.
  std::vector<std::string> findings;
};

HypothesisReport check_hypotheses(const JointLaw& law);

struct AtomTestReport {
  std::vector<double> resolutions;   // coarse to fine
  std::vector<double> max_fraction;  // aligned with resolutions
  double kappa_hat;                  // max_fraction / delta at the coarsest resolution
  double threshold_factor;
  std::vector<double> thresholds;    // threshold_factor * kappa_hat * delta
  bool atomic;                       // finest max_fraction exceeds its threshold
};

inline constexpr std::size_t kMinAtomSamples = 10000;

/// base * 2^-k for k = 0 ... levels.
std::vector<double> dyadic_resolutions(double base, std::size_t levels);

/// Largest fraction of samples sharing one bin [j delta, (j+1) delta) for each
/// resolution. Resolutions must be dyadic multiples of the largest one, so the
/// bins are nested and max_fraction is exactly nonincreasing as delta shrinks.
AtomTestReport atom_test(std::span<const double> samples, std::span<const double> resolutions,
                         double threshold_factor = 10.0);

struct ConvergenceReport {
  std::vector<std::size_t> n_list;
  std::vector<double> ks_distance;
  std::size_t m;
  double x0;
  double critical_value;  // KS_crit(m, m, 0.01)
  bool nonincreasing_within_noise;
  bool final_below_limit;  // final distance < 2 * critical_value
  bool passed;
};

inline constexpr std::size_t kMinConvergenceSamples = 1000;

/// Two-sample KS distance between m chain values X_n (started at x0) and m
/// stationary draws, for each n in n_list. Throws PreconditionError when the
/// law lacks a stationary limit or m < kMinConvergenceSamples.
ConvergenceReport convergence_check(const JointLaw& law, std::span<const std::size_t> n_list, std::size_t m,
                                    double x0, std::uint64_t root_seed, unsigned workers = 1);

}  // namespace rcar
