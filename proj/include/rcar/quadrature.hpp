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

#include <functional>

namespace rcar::quad {

/// Target accuracy of every oracle integral in the library.
inline constexpr double kTolerance = 1e-10;

struct Result {
  double value;
  double error_estimate;
};

/// Adaptive Gauss-Kronrod (15-point) integration over [a, b]; either bound may
/// be infinite. Non-finite integrand values propagate into a non-finite result.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double tolerance = kTolerance);

/// Convenience wrapper returning only the value.
double integral(const std::function<double(double)>& f, double a, double b,
                double tolerance = kTolerance);

}  // namespace rcar::quad
