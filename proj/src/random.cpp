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

#include "rcar/random.hpp"

#include <array>

namespace rcar {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed) {
  std::array<std::uint32_t, 8> words{};
  std::uint64_t s = seed;
  for (std::size_t i = 0; i < words.size(); i += 2) {
    s = mix64(s);
    words[i] = static_cast<std::uint32_t>(s);
    words[i + 1] = static_cast<std::uint32_t>(s >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : id_(seed), engine_(make_engine(seed)) {}

RandomStream RandomStream::derive(std::uint64_t root, std::uint64_t index) {
  return RandomStream(mix64(mix64(root) ^ (index * 0xd1342543de82ef95ULL + 1)));
}

double RandomStream::uniform() { return unit_(engine_); }

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomStream::normal() { return std_normal_(engine_); }

double RandomStream::normal(double mean, double sd) { return mean + sd * normal(); }

}  // namespace rcar
