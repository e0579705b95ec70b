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
#include <stdexcept>
#include <string>

namespace rcar {

/// A documented precondition of an operation does not hold for its inputs,
/// e.g. a law that violates the contraction hypothesis handed to the
/// stationary sampler.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Not enough data for a statistical procedure to run (too few cycles,
/// regenerations, or samples).
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The recursion produced a non-finite state.
class SimulationOverflow : public std::runtime_error {
 public:
  SimulationOverflow(std::size_t step, std::size_t chain, const std::string& what)
      : std::runtime_error(what), step_(step), chain_(chain) {}
  std::size_t step() const { return step_; }
  std::size_t chain() const { return chain_; }

 private:
  std::size_t step_;
  std::size_t chain_;
};

/// An identity that must hold bit-exactly was violated. Always a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rcar
