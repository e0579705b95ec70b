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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rcar/process.hpp"

namespace rcar {

// All estimators condition on X_i falling in the half-open bin (x, x + h] and
// sum over transitions i = 0 ... n-1 of the path X_0 ... X_n. An empty bin is
// reported through `empty_bin` with zero values, never as an error.

struct TransitionCdfEstimate {
  double x;
  double h;
  std::vector<double> y_grid;
  std::vector<double> values;
  std::size_t bin_count;
  bool empty_bin;
};

struct CharFnEstimate {
  double x;
  double h;
  std::vector<double> t_grid;
  std::vector<std::complex<double>> values;
  std::vector<bool> valid;
  std::size_t bin_count;
  bool empty_bin;

  std::size_t valid_count() const;
};

/// Every entry of a ratio estimate was rejected.
class AllEntriesInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// X_{i+1} for every i < n with X_i in (x, x + h], in index order.
std::vector<double> bin_successors(std::span<const double> path, double x, double h);

/// F_{n,h}(x, y): fraction of bin visits followed by a state <= y.
/// `y_grid` must be sorted ascending.
TransitionCdfEstimate transition_cdf_estimate(std::span<const double> path, double x, double h,
                                              std::span<const double> y_grid);
TransitionCdfEstimate transition_cdf_estimate(const Trajectory& traj, double x, double h,
                                              std::span<const double> y_grid);

/// phi_{n,h,x}(t): average of exp(i t X_{j+1}) over bin visits X_j.
/// Values satisfy phi(0) = 1 and phi(-t) = conj(phi(t)) exactly.
CharFnEstimate conditional_cf_estimate(std::span<const double> path, double x, double h,
                                       std::span<const double> t_grid);
CharFnEstimate conditional_cf_estimate(const Trajectory& traj, double x, double h, std::span<const double> t_grid);

/// Estimate of the eps characteristic function (the conditional CF at x = 0).
/// Assumes rho and eps are independent.
CharFnEstimate recover_eps_cf(std::span<const double> path, double h, std::span<const double> t_grid);

inline constexpr double kDenominatorFloor = 0.05;

/// Estimate of the rho characteristic function at each t as
/// phi_{n,h,x_probe}(t / x_probe) / phi_{n,h,0}(t / x_probe). Entries whose
/// denominator modulus falls below `floor` (or whose bins are empty) are
/// marked invalid with value 0. Throws AllEntriesInvalid if none survive.
CharFnEstimate recover_rho_cf(std::span<const double> path, double h, double x_probe, std::span<const double> t_grid,
                              double floor = kDenominatorFloor);

struct JointCfEstimate {
  double t1;
  double t2;
  double x;  // t1 / t2
  std::complex<double> value;
  std::size_t bin_count;
  bool empty_bin;
};

/// Joint CF of (rho, eps) at (t1, t2) read off the conditional CF at
/// x = t1 / t2, evaluated at t2. Requires t2 != 0.
JointCfEstimate joint_cf_from_transition(std::span<const double> path, double h, double t1, double t2);

/// 1.06 * sd * n^(-1/5).
double bandwidth_default(std::size_t n, double sd);
/// Plug-in rule on the sample sd of `states`; throws std::domain_error when
/// every state is identical.
double bandwidth_default(std::span<const double> states);

/// h0, h0/2, h0/4, ... (`levels` entries).
std::vector<double> bandwidth_ladder(double h0, std::size_t levels);

/// Median of |X| over states with |X| > h; used as the probe point for rho
/// recovery.
double default_probe(std::span<const double> states, double h);

}  // namespace rcar
