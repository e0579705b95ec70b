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
#include <functional>
#include <span>
#include <vector>

namespace rcar::stats {

double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chi_square_survival(double statistic, double df);

/// Kolmogorov limiting survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic;
  double p_value;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction to the effective size).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample test against a CDF. For discontinuous CDFs the p-value is
/// conservative.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Asymptotic critical value of the two-sample statistic at level `alpha`.
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);

double mean(std::span<const double> xs);
/// Unbiased sample variance; zero for fewer than two points.
double variance(std::span<const double> xs);
double standard_deviation(std::span<const double> xs);

}  // namespace rcar::stats
