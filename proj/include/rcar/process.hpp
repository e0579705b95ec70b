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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rcar/dist.hpp"
#include "rcar/random.hpp"

namespace rcar {

/// One step of the recursion: rho * x + eps.
inline double step(double x, double rho, double eps) { return rho * x + eps; }

/// A realized path X_0, X_1, ..., X_n, optionally with the pairs that drove it.
class Trajectory {
 public:
  Trajectory(double x0, std::vector<double> states, std::optional<std::vector<CoefficientPair>> driving,
             std::uint64_t seed_id);

  double x0() const { return path_.front(); }
  /// X_1 ... X_n.
  std::span<const double> states() const { return std::span<const double>(path_).subspan(1); }
  /// X_0 ... X_n.
  std::span<const double> path() const { return path_; }
  std::size_t size() const { return path_.size() - 1; }

  bool has_driving() const { return driving_.has_value(); }
  /// driving()[i] produced states()[i].
  std::span<const CoefficientPair> driving() const;
  std::uint64_t seed_id() const { return seed_id_; }

  friend bool operator==(const Trajectory& a, const Trajectory& b);

 private:
  std::vector<double> path_;
  std::optional<std::vector<CoefficientPair>> driving_;
  std::uint64_t seed_id_;
};

bool operator==(const CoefficientPair& a, const CoefficientPair& b);

/// Applies `step` n times with fresh draws. Throws SimulationOverflow naming
/// the 1-based step index if a state becomes non-finite.
Trajectory simulate(const JointLaw& law, double x0, std::size_t n, bool retain_driving, RandomStream& rng);

struct StationaryOptions {
  double tol_prod = 1e-12;
  std::size_t n_min = 16;
  std::size_t n_max = 100000;
};

struct StationarySample {
  double value;
  std::size_t terms_used;
  /// |rho_1 ... rho_N| * scale(eps); a heuristic, not a bound.
  double tail_bound_estimate;
  /// |Y'_N - Y'_{N-1}|, the last increment added to the partial sum.
  double last_increment;
  /// N reached n_max before the product fell below tol_prod.
  bool truncated;
};

/// Draws X_inf = eps_1 + rho_1 eps_2 + rho_1 rho_2 eps_3 + ... by truncating
/// the series at the first N >= n_min with |rho_1 ... rho_N| <= tol_prod.
///
/// The law is screened once at construction; a law without
/// E log|rho| < 0 and E(log|eps|)^+ < inf throws PreconditionError.
class StationarySampler {
 public:
  explicit StationarySampler(const JointLaw& law, StationaryOptions options = {});

  StationarySample draw(RandomStream& rng) const;

  const JointLaw& law() const { return law_; }
  const StationaryOptions& options() const { return options_; }
  double scale() const { return scale_; }

 private:
  JointLaw law_;
  StationaryOptions options_;
  double scale_;
};

StationarySample sample_stationary(const JointLaw& law, const StationaryOptions& options, RandomStream& rng);

/// Runs `count` independent work units, unit k on the stream derived from
/// (root_seed, k). `body` must only touch slot k of any shared output. The
/// result is identical for every worker count.
void for_each_unit(std::size_t count, std::uint64_t root_seed, unsigned workers,
                   const std::function<void(std::size_t, RandomStream&)>& body);

struct EnsembleSpec {
  std::size_t chains = 1;
  std::size_t length = 1;
  double x0 = 0.0;
  bool retain_driving = false;
};

/// Independent chains; chain k uses RandomStream::derive(root_seed, k).
/// Overflow in any chain rethrows SimulationOverflow carrying the chain index.
std::vector<Trajectory> run_ensemble(const JointLaw& law, const EnsembleSpec& spec, std::uint64_t root_seed,
                                     unsigned workers = 1);

/// Terminal values X_n of independent chains, without keeping the paths.
std::vector<double> terminal_values(const JointLaw& law, double x0, std::size_t n, std::size_t chains,
                                    std::uint64_t root_seed, unsigned workers = 1);

/// `count` stationary draws. Draws are generated in fixed blocks, each block
/// on its own derived stream, so the output does not depend on `workers`.
std::vector<StationarySample> run_stationary_ensemble(const StationarySampler& sampler, std::size_t count,
                                                      std::uint64_t root_seed, unsigned workers = 1);

std::vector<double> stationary_values(const StationarySampler& sampler, std::size_t count, std::uint64_t root_seed,
                                      unsigned workers = 1);

}  // namespace rcar
