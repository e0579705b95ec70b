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

#include <cstdint>
#include <random>

namespace rcar {

/// A seeded source of randomness. Every Monte Carlo routine in the library
/// draws exclusively from a caller-supplied stream, so results are a pure
/// function of (inputs, stream seed).
///
/// Streams for independent work units are obtained with `derive`, which maps
/// (root seed, unit index) to a fresh engine state. The mapping does not depend
/// on how many workers execute the units or in which order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Stream for work unit `index` under `root`.
  static RandomStream derive(std::uint64_t root, std::uint64_t index);

  std::uint64_t id() const { return id_; }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double sd);

 private:
  std::uint64_t id_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> std_normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to spread seeds before engine initialization.
std::uint64_t mix64(std::uint64_t x);

}  // namespace rcar
