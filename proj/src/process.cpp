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

#include "rcar/process.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "rcar/errors.hpp"

namespace rcar {

bool operator==(const CoefficientPair& a, const CoefficientPair& b) { return a.rho == b.rho && a.eps == b.eps; }

Trajectory::Trajectory(double x0, std::vector<double> states, std::optional<std::vector<CoefficientPair>> driving,
                       std::uint64_t seed_id)
    : driving_(std::move(driving)), seed_id_(seed_id) {
  if (driving_ && driving_->size() != states.size())
    throw std::invalid_argument("Trajectory: driving length must equal state count");
  path_.reserve(states.size() + 1);
  path_.push_back(x0);
  path_.insert(path_.end(), states.begin(), states.end());
}

std::span<const CoefficientPair> Trajectory::driving() const {
  if (!driving_) return {};
  return *driving_;
}

bool operator==(const Trajectory& a, const Trajectory& b) {
  return a.seed_id_ == b.seed_id_ && a.path_ == b.path_ && a.driving_ == b.driving_;
}

Trajectory simulate(const JointLaw& law, double x0, std::size_t n, bool retain_driving, RandomStream& rng) {
  if (n < 1) throw PreconditionError("simulate: n must be >= 1");
  if (!std::isfinite(x0)) throw PreconditionError("simulate: x0 must be finite");
  std::vector<double> states(n);
  std::optional<std::vector<CoefficientPair>> driving;
  if (retain_driving) driving.emplace(n);
  double x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    const CoefficientPair pair = sample_pair(law, rng);
    x = step(x, pair.rho, pair.eps);
    if (!std::isfinite(x)) {
      throw SimulationOverflow(i + 1, 0, "simulate: state became non-finite at step " + std::to_string(i + 1));
    }
    states[i] = x;
    if (driving) (*driving)[i] = pair;
  }
  return Trajectory(x0, std::move(states), std::move(driving), rng.id());
}

StationarySampler::StationarySampler(const JointLaw& law, StationaryOptions options)
    : law_(law), options_(options), scale_(eps_scale(law)) {
  if (!(options_.tol_prod > 0.0)) throw PreconditionError("sample_stationary: tol_prod must be > 0");
  if (options_.n_min < 1) throw PreconditionError("sample_stationary: n_min must be >= 1");
  if (options_.n_max < options_.n_min) throw PreconditionError("sample_stationary: n_max must be >= n_min");
  const double lm = log_moment_rho(law_);
  if (!(lm < 0.0)) {
    throw PreconditionError("sample_stationary: requires E log|rho| < 0, got " + std::to_string(lm));
  }
  if (!std::isfinite(log_plus_moment_eps(law_))) {
    throw PreconditionError("sample_stationary: requires E (log|eps|)^+ < infinity");
  }
}

StationarySample StationarySampler::draw(RandomStream& rng) const {
  // |rho_1 ... rho_k| is carried as log-magnitude plus sign.
  const double log_tol = std::log(options_.tol_prod);
  double sum = 0.0;
  double log_abs_prod = 0.0;
  bool negative = false;
  double increment = 0.0;
  std::size_t k = 0;
  while (true) {
    ++k;
    const CoefficientPair pair = sample_pair(law_, rng);
    const double magnitude = std::exp(log_abs_prod);
    const double term = (negative ? -magnitude : magnitude) * pair.eps;
    sum += term;
    increment = std::abs(term);
    if (pair.rho == 0.0) {
      log_abs_prod = -HUGE_VAL;
    } else {
      log_abs_prod += std::log(std::abs(pair.rho));
      negative = negative != (pair.rho < 0.0);
    }
    if (k >= options_.n_min && log_abs_prod <= log_tol) {
      return {sum, k, std::exp(log_abs_prod) * scale_, increment, false};
    }
    if (k >= options_.n_max) {
      return {sum, k, std::exp(log_abs_prod) * scale_, increment, true};
    }
  }
}

StationarySample sample_stationary(const JointLaw& law, const StationaryOptions& options, RandomStream& rng) {
  return StationarySampler(law, options).draw(rng);
}

void for_each_unit(std::size_t count, std::uint64_t root_seed, unsigned workers,
                   const std::function<void(std::size_t, RandomStream&)>& body) {
  std::vector<std::exception_ptr> errors(count);
  auto run_one = [&](std::size_t k) {
    try {
      RandomStream rng = RandomStream::derive(root_seed, k);
      body(k, rng);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < count; k = next.fetch_add(1)) run_one(k);
      });
    }
  }
  // Report the failure of the lowest-indexed unit so errors are schedule-independent too.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Trajectory> run_ensemble(const JointLaw& law, const EnsembleSpec& spec, std::uint64_t root_seed,
                                     unsigned workers) {
  std::vector<std::optional<Trajectory>> slots(spec.chains);
  for_each_unit(spec.chains, root_seed, workers, [&](std::size_t k, RandomStream& rng) {
    try {
      slots[k].emplace(simulate(law, spec.x0, spec.length, spec.retain_driving, rng));
    } catch (const SimulationOverflow& e) {
      throw SimulationOverflow(e.step(), k,
                               "chain " + std::to_string(k) + ": state became non-finite at step " +
                                   std::to_string(e.step()));
    }
  });
  std::vector<Trajectory> out;
  out.reserve(spec.chains);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<double> terminal_values(const JointLaw& law, double x0, std::size_t n, std::size_t chains,
                                    std::uint64_t root_seed, unsigned workers) {
  if (n < 1) throw PreconditionError("terminal_values: n must be >= 1");
  std::vector<double> out(chains);
  for_each_unit(chains, root_seed, workers, [&](std::size_t k, RandomStream& rng) {
    double x = x0;
    for (std::size_t i = 0; i < n; ++i) {
      const CoefficientPair pair = sample_pair(law, rng);
      x = step(x, pair.rho, pair.eps);
    }
    if (!std::isfinite(x)) {
      throw SimulationOverflow(n, k, "chain " + std::to_string(k) + ": terminal state is non-finite");
    }
    out[k] = x;
  });
  return out;
}

namespace {
constexpr std::size_t kStationaryBlock = 4096;
}

std::vector<StationarySample> run_stationary_ensemble(const StationarySampler& sampler, std::size_t count,
                                                      std::uint64_t root_seed, unsigned workers) {
  std::vector<StationarySample> out(count);
  const std::size_t blocks = (count + kStationaryBlock - 1) / kStationaryBlock;
  for_each_unit(blocks, root_seed, workers, [&](std::size_t b, RandomStream& rng) {
    const std::size_t end = std::min(count, (b + 1) * kStationaryBlock);
    for (std::size_t i = b * kStationaryBlock; i < end; ++i) out[i] = sampler.draw(rng);
  });
  return out;
}

std::vector<double> stationary_values(const StationarySampler& sampler, std::size_t count, std::uint64_t root_seed,
                                      unsigned workers) {
  std::vector<double> out(count);
  const std::size_t blocks = (count + kStationaryBlock - 1) / kStationaryBlock;
  for_each_unit(blocks, root_seed, workers, [&](std::size_t b, RandomStream& rng) {
    const std::size_t end = std::min(count, (b + 1) * kStationaryBlock);
    for (std::size_t i = b * kStationaryBlock; i < end; ++i) out[i] = sampler.draw(rng).value;
  });
  return out;
}

}  // namespace rcar
