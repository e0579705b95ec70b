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

#include "rcar/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rcar::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, double tolerance) {
  if (a == b) return {0.0, 0.0};
  double error = 0.0;
  double l1 = 0.0;
  // Boost terminates on error <= tolerance * L1; oracle integrands here have
  // L1 of order one, which makes this an absolute criterion in practice.
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, /*max_depth=*/25, tolerance, &error, &l1);
  return {value, error};
}

double integral(const std::function<double(double)>& f, double a, double b, double tolerance) {
  return integrate(f, a, b, tolerance).value;
}

}  // namespace rcar::quad
