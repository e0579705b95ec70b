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

#include "rcar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rcar/errors.hpp"
#include "rcar/process.hpp"
#include "rcar/stats.hpp"

namespace rcar {

HypothesisReport check_hypotheses(const JointLaw& law) {
  HypothesisReport r{};
  r.log_moment_rho = log_moment_rho(law);
  r.log_plus_moment_eps = log_plus_moment_eps(law);
  r.prob_rho_zero = prob_rho_zero(law);
  r.non_degenerate = is_non_degenerate(law);

  const bool contractive = r.log_moment_rho < 0.0;
  const bool eps_tame = std::isfinite(r.log_plus_moment_eps);
  r.stationary_limit = contractive && eps_tame;
  r.harris_regenerative = r.stationary_limit && r.prob_rho_zero == 0.0;
  r.non_atomic_limit = r.harris_regenerative && r.non_degenerate;
  r.atom_regenerative = r.prob_rho_zero > 0.0;

  if (r.stationary_limit) r.applicable.emplace_back("stationary-limit");
  if (r.non_atomic_limit) r.applicable.emplace_back("non-atomic-limit");
  if (r.harris_regenerative) r.applicable.emplace_back("harris-regenerative");
  if (r.atom_regenerative) r.applicable.emplace_back("atom-regenerative");
  if (r.applicable.empty()) r.applicable.emplace_back("none");

  if (!contractive) {
    std::ostringstream s;
    s << "stationary-limit hypotheses fail: E log|rho| = " << r.log_moment_rho << " >= 0";
    r.findings.push_back(s.str());
  }
  if (!eps_tame) r.findings.emplace_back("stationary-limit hypotheses fail: E(log|eps|)^+ is infinite");
  if (!r.non_degenerate) r.findings.emplace_back("(rho, eps) is degenerate: the limit is a point mass");
  if (r.prob_rho_zero > 0.0) {
    std::ostringstream s;
    s << "P(rho = 0) = " << r.prob_rho_zero << " > 0: regenerations occur at the zeros of rho";
    r.findings.push_back(s.str());
  }
  return r;
}

std::vector<double> dyadic_resolutions(double base, std::size_t levels) {
  if (!(base > 0.0) || !std::isfinite(base)) throw PreconditionError("dyadic_resolutions: base must be > 0");
  std::vector<double> out(levels + 1);
  for (std::size_t k = 0; k <= levels; ++k) out[k] = std::ldexp(base, -static_cast<int>(k));
  return out;
}

AtomTestReport atom_test(std::span<const double> samples, std::span<const double> resolutions,
                         double threshold_factor) {
  if (samples.size() < kMinAtomSamples) {
    throw InsufficientData("atom_test: need at least " + std::to_string(kMinAtomSamples) + " samples");
  }
  if (resolutions.empty()) throw PreconditionError("atom_test: no resolutions");
  const double base = *std::max_element(resolutions.begin(), resolutions.end());
  if (!(base > 0.0)) throw PreconditionError("atom_test: resolutions must be > 0");

  std::vector<int> levels;
  for (double d : resolutions) {
    const double k = std::log2(base / d);
    const double rounded = std::round(k);
    if (!(d > 0.0) || std::abs(k - rounded) > 1e-9) {
      throw PreconditionError("atom_test: resolutions must be base * 2^-k for the largest resolution base");
    }
    levels.push_back(static_cast<int>(rounded));
  }
  std::vector<int> order(levels);
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  // Bin index at level k is floor(u * 2^k) with u = x / base; scaling by a
  // power of two is exact, so level-k bins are unions of level-(k+1) bins.
  std::vector<double> u(samples.begin(), samples.end());
  for (double& v : u) v /= base;
  std::sort(u.begin(), u.end());

  AtomTestReport r{};
  r.threshold_factor = threshold_factor;
  const double n = static_cast<double>(u.size());
  for (int k : order) {
    std::size_t best = 0;
    std::size_t run = 0;
    double current = std::numeric_limits<double>::quiet_NaN();
    for (double v : u) {
      const double bin = std::floor(std::ldexp(v, k));
      if (bin == current) {
        ++run;
      } else {
        current = bin;
        run = 1;
      }
      best = std::max(best, run);
    }
    r.resolutions.push_back(std::ldexp(base, -k));
    r.max_fraction.push_back(static_cast<double>(best) / n);
  }
  r.kappa_hat = r.max_fraction.front() / r.resolutions.front();
  for (double d : r.resolutions) r.thresholds.push_back(threshold_factor * r.kappa_hat * d);
  r.atomic = r.max_fraction.back() > r.thresholds.back();
  return r;
}

ConvergenceReport convergence_check(const JointLaw& law, std::span<const std::size_t> n_list, std::size_t m,
                                    double x0, std::uint64_t root_seed, unsigned workers) {
  if (m < kMinConvergenceSamples) {
    throw PreconditionError("convergence_check: m must be >= " + std::to_string(kMinConvergenceSamples));
  }
  if (n_list.empty()) throw PreconditionError("convergence_check: empty n_list");
  const StationarySampler sampler(law);  // throws PreconditionError if the limit does not exist

  ConvergenceReport r{};
  r.n_list.assign(n_list.begin(), n_list.end());
  r.m = m;
  r.x0 = x0;
  r.critical_value = stats::ks_critical_two_sample(m, m, 0.01);

  // Stream layout: unit 0 seeds the stationary draws, unit 1 + i the chains for n_list[i].
  const auto stationary = stationary_values(sampler, m, RandomStream::derive(root_seed, 0).id(), workers);
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const auto chains =
        terminal_values(law, x0, n_list[i], m, RandomStream::derive(root_seed, i + 1).id(), workers);
    r.ks_distance.push_back(stats::ks_two_sample(chains, stationary).statistic);
  }
  r.nonincreasing_within_noise = true;
  for (std::size_t i = 1; i < r.ks_distance.size(); ++i)
    if (r.ks_distance[i] > r.ks_distance[i - 1] + r.critical_value) r.nonincreasing_within_noise = false;
  r.final_below_limit = r.ks_distance.back() < 2.0 * r.critical_value;
  r.passed = r.nonincreasing_within_noise && r.final_below_limit;
  return r;
}

}  // namespace rcar
