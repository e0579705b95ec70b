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

#include "rcar/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcar/errors.hpp"
#include "rcar/stats.hpp"

namespace rcar {

namespace {

void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("bandwidth h must be finite and > 0");
}

void check_path(std::span<const double> path) {
  if (path.size() < 2) throw PreconditionError("estimators need a path with at least one transition");
}

// Mean of exp(i t v) over `values`, summed in index order.
std::complex<double> empirical_cf(std::span<const double> values, double t) {
  if (t == 0.0) return {1.0, 0.0};
  const double a = std::abs(t);
  double re = 0.0;
  double im = 0.0;
  for (double v : values) {
    re += std::cos(a * v);
    im += std::sin(a * v);
  }
  const double n = static_cast<double>(values.size());
  return {re / n, t < 0.0 ? -im / n : im / n};
}

}  // namespace

std::size_t CharFnEstimate::valid_count() const { return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true)); }

std::vector<double> bin_successors(std::span<const double> path, double x, double h) {
  const double upper = x + h;
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double v = path[i];
    if (v > x && v <= upper) out.push_back(path[i + 1]);
  }
  return out;
}

TransitionCdfEstimate transition_cdf_estimate(std::span<const double> path, double x, double h,
                                              std::span<const double> y_grid) {
  check_bandwidth(h);
  check_path(path);
  if (!std::is_sorted(y_grid.begin(), y_grid.end())) throw PreconditionError("transition_cdf_estimate: y_grid must be sorted");
  auto next = bin_successors(path, x, h);
  std::sort(next.begin(), next.end());
  TransitionCdfEstimate e{x, h, {y_grid.begin(), y_grid.end()}, std::vector<double>(y_grid.size(), 0.0), next.size(),
                          next.empty()};
  if (e.empty_bin) return e;
  const double count = static_cast<double>(next.size());
  for (std::size_t j = 0; j < y_grid.size(); ++j) {
    const auto below = std::upper_bound(next.begin(), next.end(), y_grid[j]) - next.begin();
    e.values[j] = static_cast<double>(below) / count;
  }
  return e;
}

TransitionCdfEstimate transition_cdf_estimate(const Trajectory& traj, double x, double h,
                                              std::span<const double> y_grid) {
  return transition_cdf_estimate(traj.path(), x, h, y_grid);
}

CharFnEstimate conditional_cf_estimate(std::span<const double> path, double x, double h,
                                       std::span<const double> t_grid) {
  check_bandwidth(h);
  check_path(path);
  const auto next = bin_successors(path, x, h);
  CharFnEstimate e{x, h, {t_grid.begin(), t_grid.end()}, std::vector<std::complex<double>>(t_grid.size()),
                   std::vector<bool>(t_grid.size(), !next.empty()), next.size(), next.empty()};
  if (e.empty_bin) return e;
  for (std::size_t k = 0; k < t_grid.size(); ++k) e.values[k] = empirical_cf(next, t_grid[k]);
  return e;
}

CharFnEstimate conditional_cf_estimate(const Trajectory& traj, double x, double h, std::span<const double> t_grid) {
  return conditional_cf_estimate(traj.path(), x, h, t_grid);
}

CharFnEstimate recover_eps_cf(std::span<const double> path, double h, std::span<const double> t_grid) {
  return conditional_cf_estimate(path, 0.0, h, t_grid);
}

CharFnEstimate recover_rho_cf(std::span<const double> path, double h, double x_probe, std::span<const double> t_grid,
                              double floor) {
  check_bandwidth(h);
  check_path(path);
  if (x_probe == 0.0 || !std::isfinite(x_probe)) throw PreconditionError("recover_rho_cf: x_probe must be finite and != 0");
  const auto probe_next = bin_successors(path, x_probe, h);
  const auto origin_next = bin_successors(path, 0.0, h);
  CharFnEstimate e{x_probe, h, {t_grid.begin(), t_grid.end()}, std::vector<std::complex<double>>(t_grid.size()),
                   std::vector<bool>(t_grid.size(), false), probe_next.size(), probe_next.empty()};
  if (!probe_next.empty() && !origin_next.empty()) {
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      const double s = t_grid[k] / x_probe;
      const auto den = empirical_cf(origin_next, s);
      if (std::abs(den) < floor) continue;
      e.values[k] = empirical_cf(probe_next, s) / den;
      e.valid[k] = true;
    }
  }
  if (e.valid_count() == 0) throw AllEntriesInvalid("recover_rho_cf: every entry was rejected (empty bin or denominator below floor)");
  return e;
}

JointCfEstimate joint_cf_from_transition(std::span<const double> path, double h, double t1, double t2) {
  if (t2 == 0.0) throw PreconditionError("joint_cf_from_transition: t2 must be nonzero");
  const double x = t1 / t2;
  const double t[1] = {t2};
  const auto e = conditional_cf_estimate(path, x, h, t);
  return {t1, t2, x, e.values[0], e.bin_count, e.empty_bin};
}

double bandwidth_default(std::size_t n, double sd) {
  if (n < 2) throw PreconditionError("bandwidth_default: need n >= 2");
  return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

double bandwidth_default(std::span<const double> states) {
  if (states.size() < 2) throw PreconditionError("bandwidth_default: need n >= 2");
  const double sd = stats::standard_deviation(states);
  if (!(sd > 0.0)) throw std::domain_error("bandwidth_default: zero variance, all states identical");
  return bandwidth_default(states.size(), sd);
}

std::vector<double> bandwidth_ladder(double h0, std::size_t levels) {
  check_bandwidth(h0);
  std::vector<double> out(levels);
  for (std::size_t k = 0; k < levels; ++k) out[k] = std::ldexp(h0, -static_cast<int>(k));
  return out;
}

double default_probe(std::span<const double> states, double h) {
  std::vector<double> mags;
  for (double v : states)
    if (std::abs(v) > h) mags.push_back(std::abs(v));
  if (mags.empty()) throw PreconditionError("default_probe: no states away from 0");
  const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  return *mid;
}

}  // namespace rcar
