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

#include "rcar/regen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rcar/errors.hpp"
#include "rcar/stats.hpp"

namespace rcar {

std::vector<double> RegenerationDecomposition::cycle_lengths() const {
  std::vector<double> out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) out.push_back(static_cast<double>(c.length));
  return out;
}

std::span<const double> RegenerationDecomposition::cycle_states(const Trajectory& traj, std::size_t j) const {
  const Cycle& c = cycles.at(j);
  return traj.path().subspan(c.start, c.length);
}

RegenerationDecomposition decompose(const Trajectory& traj) {
  if (!traj.has_driving()) throw MissingDriving("decompose: trajectory does not retain its driving sequence");
  RegenerationDecomposition d;
  const auto driving = traj.driving();
  for (std::size_t i = 0; i < driving.size(); ++i) {
    if (driving[i].rho == 0.0) d.tau.push_back(i + 1);
  }
  for (std::size_t j = 0; j + 1 < d.tau.size(); ++j) d.cycles.push_back({d.tau[j], d.tau[j + 1] - d.tau[j]});
  d.delay_length = d.tau.empty() ? traj.path().size() : d.tau.front();
  return d;
}

GeometricReport geometric_diagnostics(std::span<const double> lengths, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("geometric_diagnostics: alpha must lie in (0,1]");
  if (lengths.size() < kMinCycles) {
    throw InsufficientData("geometric_diagnostics: need at least " + std::to_string(kMinCycles) +
                           " complete cycles, got " + std::to_string(lengths.size()));
  }
  GeometricReport r{};
  r.alpha = alpha;
  r.cycles = lengths.size();
  r.mean_length = stats::mean(lengths);
  r.mean_length_se = stats::standard_deviation(lengths) / std::sqrt(static_cast<double>(lengths.size()));

  const double n = static_cast<double>(lengths.size());
  const double q = 1.0 - alpha;
  // Cells {k} while both the cell and the remaining tail expect >= 5; the rest
  // pools into an open tail cell {>= k}.
  std::size_t k = 1;
  while (true) {
    const double cell = n * alpha * std::pow(q, static_cast<double>(k - 1));
    const double tail_after = n * std::pow(q, static_cast<double>(k));
    if (cell >= 5.0 && tail_after >= 5.0) {
      r.cells.emplace_back(k, k);
      r.expected.push_back(cell);
      ++k;
    } else {
      r.cells.emplace_back(k, 0);
      r.expected.push_back(n * std::pow(q, static_cast<double>(k - 1)));
      break;
    }
  }
  r.observed.assign(r.cells.size(), 0.0);
  const std::size_t tail_start = r.cells.back().first;
  for (double len : lengths) {
    const auto l = static_cast<std::size_t>(len);
    if (l < 1) throw PreconditionError("geometric_diagnostics: cycle lengths must be >= 1");
    r.observed[l >= tail_start ? r.cells.size() - 1 : l - 1] += 1.0;
  }
  r.chi_square = 0.0;
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    const double diff = r.observed[c] - r.expected[c];
    r.chi_square += diff * diff / r.expected[c];
  }
  r.degrees_of_freedom = r.cells.size() - 1;
  r.chi_square_p = stats::chi_square_survival(r.chi_square, static_cast<double>(r.degrees_of_freedom));

  const std::size_t half = lengths.size() / 2;
  const auto ks = stats::ks_two_sample(lengths.first(half), lengths.subspan(half));
  r.ks_halves_statistic = ks.statistic;
  r.ks_halves_p = ks.p_value;
  return r;
}

GeometricReport geometric_diagnostics(const RegenerationDecomposition& decomp, double alpha) {
  const auto lengths = decomp.cycle_lengths();
  return geometric_diagnostics(lengths, alpha);
}

RegenerationValueReport regeneration_value_check(const RegenerationDecomposition& decomp, const Trajectory& traj,
                                                 const JointLaw& law) {
  if (!traj.has_driving()) throw MissingDriving("regeneration_value_check: trajectory has no driving sequence");
  if (decomp.tau.size() < kMinCycles) {
    throw InsufficientData("regeneration_value_check: need at least " + std::to_string(kMinCycles) +
                           " regenerations, got " + std::to_string(decomp.tau.size()));
  }
  const auto path = traj.path();
  const auto driving = traj.driving();
  std::vector<double> values;
  values.reserve(decomp.tau.size());
  for (std::size_t t : decomp.tau) {
    const double x = path[t];
    const CoefficientPair& pair = driving[t - 1];
    if (pair.rho != 0.0 || x != pair.eps) {
      throw InvariantViolation("regeneration_value_check: X_tau != eps_tau at tau = " + std::to_string(t));
    }
    values.push_back(x);
  }
  RegenerationValueReport r{decomp.tau.size(), true, std::nullopt, std::nullopt};
  if (eps_cdf_given_rho_zero(law, 0.0)) {
    const auto ks = stats::ks_one_sample(values, [&](double y) { return *eps_cdf_given_rho_zero(law, y); });
    r.ks_statistic = ks.statistic;
    r.ks_p = ks.p_value;
  }
  return r;
}

HittingEstimate hitting_probability(const JointLaw& law, double x0, Interval interval, std::size_t n_max,
                                    std::size_t trials, RandomStream& rng) {
  if (!(interval.lo < interval.hi)) throw PreconditionError("hitting_probability: need c < d");
  if (trials < 1) throw PreconditionError("hitting_probability: trials must be >= 1");
  std::size_t hits = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double x = x0;
    for (std::size_t n = 1; n <= n_max; ++n) {
      const CoefficientPair pair = sample_pair(law, rng);
      x = step(x, pair.rho, pair.eps);
      if (interval.contains(x)) {
        ++hits;
        break;
      }
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

std::optional<double> minorization_mass(const JointLaw& law, Interval interval, std::span<const double> y_grid,
                                        std::span<const double> x_grid) {
  if (!(interval.lo < interval.hi)) throw PreconditionError("minorization_mass: need c < d");
  if (y_grid.size() < 2 || x_grid.empty()) throw PreconditionError("minorization_mass: grids too small");
  if (!std::is_sorted(y_grid.begin(), y_grid.end())) throw PreconditionError("minorization_mass: y_grid must be sorted");
  std::vector<double> floor_density(y_grid.size(), std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < y_grid.size(); ++j) {
    for (double x : x_grid) {
      const auto d = oracle_transition_density(law, x, y_grid[j]);
      if (!d) return std::nullopt;
      floor_density[j] = std::min(floor_density[j], *d);
    }
  }
  double mass = 0.0;
  for (std::size_t j = 1; j < y_grid.size(); ++j)
    mass += 0.5 * (floor_density[j] + floor_density[j - 1]) * (y_grid[j] - y_grid[j - 1]);
  return mass;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return out;
}

// Smallest y (to bisection precision) with G(x, y) >= p.
double transition_quantile(const JointLaw& law, double x, double p) {
  auto g = [&](double y) { return oracle_transition_cdf(law, x, y).value_or(0.0); };
  double lo = -1.0;
  double hi = 1.0;
  while (g(lo) >= p) lo *= 2.0;
  while (g(hi) < p) hi *= 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-9 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= p ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

MinorizationGrids default_minorization_grids(const JointLaw& law, Interval interval) {
  if (!(interval.lo < interval.hi)) throw PreconditionError("default_minorization_grids: need c < d");
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  for (double x : {interval.lo, 0.5 * (interval.lo + interval.hi), interval.hi}) {
    y_lo = std::min(y_lo, transition_quantile(law, x, 0.0005));
    y_hi = std::max(y_hi, transition_quantile(law, x, 0.9995));
  }
  return {linspace(interval.lo, interval.hi, 101), linspace(y_lo, y_hi, 401)};
}

ThetaReport estimate_theta_and_nx(const JointLaw& law, Interval interval, std::span<const double> x0_list,
                                  double delta, RandomStream& rng, const ThetaOptions& options) {
  if (!(interval.lo < interval.hi)) throw PreconditionError("estimate_theta_and_nx: need c < d");
  if (options.trials < 1 || options.cap < 1 || options.stationary_samples < 1)
    throw PreconditionError("estimate_theta_and_nx: trials, cap and stationary_samples must be >= 1");
  const StationarySampler sampler(law);

  ThetaReport report{};
  // eta = eta' = (d - c) / 8 on each side.
  const double trim = (interval.hi - interval.lo) / 4.0;
  report.shrunk = {interval.lo + trim, interval.hi - trim};
  std::size_t inside = 0;
  for (std::size_t i = 0; i < options.stationary_samples; ++i)
    if (report.shrunk.contains(sampler.draw(rng).value)) ++inside;
  report.stationary_mass = static_cast<double>(inside) / static_cast<double>(options.stationary_samples);
  report.theta_estimate = report.stationary_mass - delta;

  for (double x0 : x0_list) {
    NxEntry entry{x0, 1, 1.0, false};
    if (report.theta_estimate <= 0.0) {
      report.entries.push_back(entry);
      continue;
    }
    std::vector<double> states(options.trials, x0);
    bool found = false;
    for (std::size_t n = 1; n <= options.cap && !found; ++n) {
      std::size_t hits = 0;
      for (double& x : states) {
        const CoefficientPair pair = sample_pair(law, rng);
        x = step(x, pair.rho, pair.eps);
        if (interval.contains(x)) ++hits;
      }
      const double p = static_cast<double>(hits) / static_cast<double>(options.trials);
      entry.n_x = n;
      entry.probability_at_n_x = p;
      found = p > report.theta_estimate;
    }
    entry.cap_reached = !found;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace rcar
