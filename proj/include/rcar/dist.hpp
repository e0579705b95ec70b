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

#include <complex>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "rcar/random.hpp"

namespace rcar {

/// One-dimensional law used for either coordinate of (rho, eps).
///
/// All five families can be sampled and have a CDF. Characteristic functions
/// are closed form for every family except LogNormalAbs; densities exist for
/// the continuous families only. Construction validates parameters and throws
/// std::invalid_argument on violation, so every live object is valid.
class Marginal {
 public:
  struct Normal {
    double mean = 0.0;
    double sd = 1.0;
  };
  struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
  };
  struct PointMass {
    double v = 0.0;
  };
  struct FiniteDiscrete {
    std::vector<double> values;
    std::vector<double> probs;
  };
  /// X = S * exp(Z) with Z ~ N(mu, sigma^2) and P(S = +1) = sign_prob.
  struct LogNormalAbs {
    double mu = 0.0;
    double sigma = 1.0;
    double sign_prob = 0.5;
  };
  using Kind = std::variant<Normal, Uniform, PointMass, FiniteDiscrete, LogNormalAbs>;

  explicit Marginal(Kind kind);

  static Marginal normal(double mean, double sd) { return Marginal(Normal{mean, sd}); }
  static Marginal uniform(double lo, double hi) { return Marginal(Uniform{lo, hi}); }
  static Marginal point_mass(double v) { return Marginal(PointMass{v}); }
  static Marginal finite_discrete(std::vector<double> values, std::vector<double> probs) {
    return Marginal(FiniteDiscrete{std::move(values), std::move(probs)});
  }
  static Marginal log_normal_abs(double mu, double sigma, double sign_prob) {
    return Marginal(LogNormalAbs{mu, sigma, sign_prob});
  }

  const Kind& kind() const { return kind_; }
  std::string_view family() const;

  double sample(RandomStream& rng) const;

  bool has_cf() const { return !std::holds_alternative<LogNormalAbs>(kind_); }
  bool has_pdf() const { return !is_discrete(); }
  bool is_discrete() const {
    return std::holds_alternative<PointMass>(kind_) || std::holds_alternative<FiniteDiscrete>(kind_);
  }

  std::optional<std::complex<double>> cf(double t) const;
  double cdf(double y) const;
  std::optional<double> pdf(double y) const;

  /// P(X = v).
  double prob_at(double v) const;
  /// True when the law is a single point.
  bool is_degenerate() const;
  double mean() const;

  /// E log|X| as an extended real: -inf when P(X = 0) > 0, +inf when the
  /// integral diverges.
  double log_abs_moment() const;
  /// E (log|X|)^+; +inf on divergence.
  double log_plus_abs_moment() const;
  /// 99.99% quantile of |X|, used as a scale for heuristic tail control.
  double abs_scale() const;

  /// E f(X): exact sum for discrete families, adaptive quadrature otherwise.
  double expectation(const std::function<double(double)>& f) const;

 private:
  Kind kind_;
};

struct CoefficientPair {
  double rho;
  double eps;
};

struct JointAtom {
  double rho_value;
  double eps_value;
  double probability;
};

/// Joint law of (rho_1, eps_1).
class JointLaw {
 public:
  struct IndependentProduct {
    Marginal rho_marginal;
    Marginal eps_marginal;
  };
  /// rho = 0 with probability alpha, otherwise drawn from rho_given_nonzero;
  /// eps is independent of rho. The atom is produced by branching, so the
  /// zero is exact.
  struct ZeroInflatedRho {
    double alpha;
    Marginal rho_given_nonzero;
    Marginal eps_marginal;
  };
  struct DiscreteJoint {
    std::vector<JointAtom> atoms;
  };
  using Kind = std::variant<IndependentProduct, ZeroInflatedRho, DiscreteJoint>;

  explicit JointLaw(Kind kind);

  static JointLaw independent(Marginal rho, Marginal eps) {
    return JointLaw(IndependentProduct{std::move(rho), std::move(eps)});
  }
  static JointLaw zero_inflated(double alpha, Marginal rho_given_nonzero, Marginal eps) {
    return JointLaw(ZeroInflatedRho{alpha, std::move(rho_given_nonzero), std::move(eps)});
  }
  static JointLaw discrete(std::vector<JointAtom> atoms) { return JointLaw(DiscreteJoint{std::move(atoms)}); }

  const Kind& kind() const { return kind_; }
  std::string_view family() const;

 private:
  Kind kind_;
};

CoefficientPair sample_pair(const JointLaw& law, RandomStream& rng);

/// E log|rho_1| (extended real, -inf allowed).
double log_moment_rho(const JointLaw& law);
/// E (log|eps_1|)^+ (+inf on divergence).
double log_plus_moment_eps(const JointLaw& law);
double prob_rho_zero(const JointLaw& law);
/// (rho_1, eps_1) is not almost surely constant.
bool is_non_degenerate(const JointLaw& law);
/// 99.99% quantile proxy of |eps_1|.
double eps_scale(const JointLaw& law);

/// G(x, y) = P(rho x + eps <= y), or nullopt when no oracle is available.
std::optional<double> oracle_transition_cdf(const JointLaw& law, double x, double y);
/// Density of rho x + eps at y, when one exists and can be computed.
std::optional<double> oracle_transition_density(const JointLaw& law, double x, double y);

std::optional<std::complex<double>> oracle_cf_rho(const JointLaw& law, double t);
std::optional<std::complex<double>> oracle_cf_eps(const JointLaw& law, double t);
/// E exp(i (t1 rho + t2 eps)).
std::optional<std::complex<double>> oracle_joint_cf(const JointLaw& law, double t1, double t2);

/// P(eps_1 <= y | rho_1 = 0); nullopt when P(rho_1 = 0) = 0.
std::optional<double> eps_cdf_given_rho_zero(const JointLaw& law, double y);

}  // namespace rcar
