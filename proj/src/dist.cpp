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

#include "rcar/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rcar/quadrature.hpp"
#include "rcar/stats.hpp"

namespace rcar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbSumTolerance = 1e-12;
// Normal integrals are truncated at this many standard deviations; the mass
// outside is below 1e-32.
constexpr double kNormalSpan = 12.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Complex = std::complex<double>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_probabilities(const std::vector<double>& probs, const char* where) {
  require(!probs.empty(), std::string(where) + ": no support points");
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, std::string(where) + ": probabilities must be nonnegative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kProbSumTolerance, std::string(where) + ": probabilities must sum to 1");
}

// Antiderivative of log|x|; continuous through 0 with value 0 there.
double log_abs_antiderivative(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)) - x; }

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

// Discrete index draw from cumulative weights.
template <class Probs>
std::size_t draw_index(const Probs& probs, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return probs.size() - 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Marginal

Marginal::Marginal(Kind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const Normal& n) {
                   require(std::isfinite(n.mean) && std::isfinite(n.sd) && n.sd > 0.0, "Normal: sd must be > 0");
                 },
                 [](const Uniform& u) {
                   require(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo < u.hi, "Uniform: need lo < hi");
                 },
                 [](const PointMass& p) { require(std::isfinite(p.v), "PointMass: value must be finite"); },
                 [](const FiniteDiscrete& f) {
                   require(f.values.size() == f.probs.size(), "FiniteDiscrete: values/probs size mismatch");
                   for (double v : f.values) require(std::isfinite(v), "FiniteDiscrete: values must be finite");
                   validate_probabilities(f.probs, "FiniteDiscrete");
                 },
                 [](const LogNormalAbs& l) {
                   require(std::isfinite(l.mu) && std::isfinite(l.sigma) && l.sigma > 0.0,
                           "LogNormalAbs: sigma must be > 0");
                   require(l.sign_prob >= 0.0 && l.sign_prob <= 1.0, "LogNormalAbs: sign_prob must lie in [0,1]");
                 },
             },
             kind_);
}

std::string_view Marginal::family() const {
  return std::visit(overloaded{
                        [](const Normal&) { return std::string_view("Normal"); },
                        [](const Uniform&) { return std::string_view("Uniform"); },
                        [](const PointMass&) { return std::string_view("PointMass"); },
                        [](const FiniteDiscrete&) { return std::string_view("FiniteDiscrete"); },
                        [](const LogNormalAbs&) { return std::string_view("LogNormalAbs"); },
                    },
                    kind_);
}

double Marginal::sample(RandomStream& rng) const {
  return std::visit(overloaded{
                        [&](const Normal& n) { return rng.normal(n.mean, n.sd); },
                        [&](const Uniform& u) { return rng.uniform(u.lo, u.hi); },
                        [](const PointMass& p) { return p.v; },
                        [&](const FiniteDiscrete& f) { return f.values[draw_index(f.probs, rng.uniform())]; },
                        [&](const LogNormalAbs& l) {
                          const double sign = rng.uniform() < l.sign_prob ? 1.0 : -1.0;
                          return sign * std::exp(rng.normal(l.mu, l.sigma));
                        },
                    },
                    kind_);
}

std::optional<Complex> Marginal::cf(double t) const {
  using R = std::optional<Complex>;
  return std::visit(overloaded{
                        [&](const Normal& n) -> R {
                          return std::exp(Complex(-0.5 * n.sd * n.sd * t * t, n.mean * t));
                        },
                        [&](const Uniform& u) -> R {
                          // (e^{ibt} - e^{iat}) / (it(b-a)) written as a phase times sinc,
                          // which has the exact t = 0 limit.
                          const double half = 0.5 * t * (u.hi - u.lo);
                          const double sinc = half == 0.0 ? 1.0 : std::sin(half) / half;
                          return std::polar(sinc, 0.5 * t * (u.lo + u.hi));
                        },
                        [&](const PointMass& p) -> R { return std::polar(1.0, t * p.v); },
                        [&](const FiniteDiscrete& f) -> R {
                          Complex acc(0.0, 0.0);
                          for (std::size_t k = 0; k < f.values.size(); ++k) acc += f.probs[k] * std::polar(1.0, t * f.values[k]);
                          return acc;
                        },
                        [](const LogNormalAbs&) -> R { return std::nullopt; },
                    },
                    kind_);
}

double Marginal::cdf(double y) const {
  return std::visit(overloaded{
                        [&](const Normal& n) { return stats::normal_cdf((y - n.mean) / n.sd); },
                        [&](const Uniform& u) { return std::clamp((y - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
                        [&](const PointMass& p) { return y >= p.v ? 1.0 : 0.0; },
                        [&](const FiniteDiscrete& f) {
                          double acc = 0.0;
                          for (std::size_t k = 0; k < f.values.size(); ++k)
                            if (f.values[k] <= y) acc += f.probs[k];
                          return std::min(acc, 1.0);
                        },
                        [&](const LogNormalAbs& l) {
                          if (y == 0.0) return 1.0 - l.sign_prob;
                          const double z = (std::log(std::abs(y)) - l.mu) / l.sigma;
                          if (y > 0.0) return (1.0 - l.sign_prob) + l.sign_prob * stats::normal_cdf(z);
                          return (1.0 - l.sign_prob) * stats::normal_cdf(-z);
                        },
                    },
                    kind_);
}

std::optional<double> Marginal::pdf(double y) const {
  using R = std::optional<double>;
  return std::visit(overloaded{
                        [&](const Normal& n) -> R { return stats::normal_pdf((y - n.mean) / n.sd) / n.sd; },
                        [&](const Uniform& u) -> R { return (y >= u.lo && y <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0; },
                        [](const PointMass&) -> R { return std::nullopt; },
                        [](const FiniteDiscrete&) -> R { return std::nullopt; },
                        [&](const LogNormalAbs& l) -> R {
                          if (y == 0.0) return 0.0;
                          const double a = std::abs(y);
                          const double dens = stats::normal_pdf((std::log(a) - l.mu) / l.sigma) / (l.sigma * a);
                          return (y > 0.0 ? l.sign_prob : 1.0 - l.sign_prob) * dens;
                        },
                    },
                    kind_);
}

double Marginal::prob_at(double v) const {
  return std::visit(overloaded{
                        [&](const PointMass& p) { return p.v == v ? 1.0 : 0.0; },
                        [&](const FiniteDiscrete& f) {
                          double acc = 0.0;
                          for (std::size_t k = 0; k < f.values.size(); ++k)
                            if (f.values[k] == v) acc += f.probs[k];
                          return acc;
                        },
                        [](const auto&) { return 0.0; },
                    },
                    kind_);
}

bool Marginal::is_degenerate() const {
  return std::visit(overloaded{
                        [](const PointMass&) { return true; },
                        [](const FiniteDiscrete& f) {
                          std::optional<double> seen;
                          for (std::size_t k = 0; k < f.values.size(); ++k) {
                            if (f.probs[k] <= 0.0) continue;
                            if (seen && *seen != f.values[k]) return false;
                            seen = f.values[k];
                          }
                          return true;
                        },
                        [](const auto&) { return false; },
                    },
                    kind_);
}

double Marginal::mean() const {
  return std::visit(overloaded{
                        [](const Normal& n) { return n.mean; },
                        [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                        [](const PointMass& p) { return p.v; },
                        [](const FiniteDiscrete& f) {
                          return std::inner_product(f.values.begin(), f.values.end(), f.probs.begin(), 0.0);
                        },
                        [](const LogNormalAbs& l) {
                          return (2.0 * l.sign_prob - 1.0) * std::exp(l.mu + 0.5 * l.sigma * l.sigma);
                        },
                    },
                    kind_);
}

namespace {

// Integrates g(log|x|) against a Normal density via x = +-e^s, which turns the
// logarithmic singularity at 0 into an exponentially decaying tail in s.
double normal_log_integral(const Marginal::Normal& n, const std::function<double(double)>& g, double s_lo) {
  const double s_hi = std::log(std::abs(n.mean) + (kNormalSpan + 1.0) * n.sd);
  if (s_lo >= s_hi) return 0.0;
  auto integrand = [&](double s) {
    const double e = std::exp(s);
    const double dens = (stats::normal_pdf((e - n.mean) / n.sd) + stats::normal_pdf((-e - n.mean) / n.sd)) / n.sd;
    return g(s) * dens * e;
  };
  return quad::integral(integrand, s_lo, s_hi);
}

}  // namespace

double Marginal::log_abs_moment() const {
  return std::visit(overloaded{
                        [](const Normal& n) {
                          // Below s = -60 the remaining contribution is under 1e-24.
                          return finite_or_inf(normal_log_integral(n, [](double s) { return s; }, -60.0));
                        },
                        [](const Uniform& u) {
                          return (log_abs_antiderivative(u.hi) - log_abs_antiderivative(u.lo)) / (u.hi - u.lo);
                        },
                        [](const PointMass& p) { return p.v == 0.0 ? -kInf : std::log(std::abs(p.v)); },
                        [](const FiniteDiscrete& f) {
                          double acc = 0.0;
                          for (std::size_t k = 0; k < f.values.size(); ++k) {
                            if (f.probs[k] <= 0.0) continue;
                            if (f.values[k] == 0.0) return -kInf;
                            acc += f.probs[k] * std::log(std::abs(f.values[k]));
                          }
                          return acc;
                        },
                        [](const LogNormalAbs& l) { return l.mu; },
                    },
                    kind_);
}

double Marginal::log_plus_abs_moment() const {
  return std::visit(overloaded{
                        [](const Normal& n) {
                          return finite_or_inf(normal_log_integral(n, [](double s) { return s; }, 0.0));
                        },
                        [](const Uniform& u) {
                          double acc = 0.0;
                          if (u.hi > 1.0) {
                            const double a = std::max(u.lo, 1.0);
                            acc += log_abs_antiderivative(u.hi) - log_abs_antiderivative(a);
                          }
                          if (u.lo < -1.0) {
                            const double b = std::min(u.hi, -1.0);
                            // integral of log(-x) over [lo, b] equals integral of log u over [-b, -lo]
                            acc += log_abs_antiderivative(-u.lo) - log_abs_antiderivative(-b);
                          }
                          return acc / (u.hi - u.lo);
                        },
                        [](const PointMass& p) { return p.v == 0.0 ? 0.0 : std::max(0.0, std::log(std::abs(p.v))); },
                        [](const FiniteDiscrete& f) {
                          double acc = 0.0;
                          for (std::size_t k = 0; k < f.values.size(); ++k)
                            if (f.values[k] != 0.0) acc += f.probs[k] * std::max(0.0, std::log(std::abs(f.values[k])));
                          return acc;
                        },
                        [](const LogNormalAbs& l) {
                          const double z = l.mu / l.sigma;
                          return l.mu * stats::normal_cdf(z) + l.sigma * stats::normal_pdf(z);
                        },
                    },
                    kind_);
}

double Marginal::abs_scale() const {
  return std::visit(overloaded{
                        [](const Normal& n) { return std::abs(n.mean) + n.sd * stats::normal_quantile(0.99995); },
                        [](const Uniform& u) { return std::max(std::abs(u.lo), std::abs(u.hi)); },
                        [](const PointMass& p) { return std::abs(p.v); },
                        [](const FiniteDiscrete& f) {
                          double m = 0.0;
                          for (std::size_t k = 0; k < f.values.size(); ++k)
                            if (f.probs[k] > 0.0) m = std::max(m, std::abs(f.values[k]));
                          return m;
                        },
                        [](const LogNormalAbs& l) { return std::exp(l.mu + l.sigma * stats::normal_quantile(0.9999)); },
                    },
                    kind_);
}

double Marginal::expectation(const std::function<double(double)>& f) const {
  return std::visit(overloaded{
                        [&](const Normal& n) {
                          auto g = [&](double x) { return f(x) * stats::normal_pdf((x - n.mean) / n.sd) / n.sd; };
                          return quad::integral(g, n.mean - kNormalSpan * n.sd, n.mean + kNormalSpan * n.sd);
                        },
                        [&](const Uniform& u) { return quad::integral(f, u.lo, u.hi) / (u.hi - u.lo); },
                        [&](const PointMass& p) { return f(p.v); },
                        [&](const FiniteDiscrete& d) {
                          double acc = 0.0;
                          for (std::size_t k = 0; k < d.values.size(); ++k)
                            if (d.probs[k] > 0.0) acc += d.probs[k] * f(d.values[k]);
                          return acc;
                        },
                        [&](const LogNormalAbs& l) {
                          auto g = [&](double z) {
                            const double e = std::exp(z);
                            const double w = stats::normal_pdf((z - l.mu) / l.sigma) / l.sigma;
                            double v = 0.0;
                            if (l.sign_prob > 0.0) v += l.sign_prob * f(e);
                            if (l.sign_prob < 1.0) v += (1.0 - l.sign_prob) * f(-e);
                            return v * w;
                          };
                          return quad::integral(g, l.mu - kNormalSpan * l.sigma, l.mu + kNormalSpan * l.sigma);
                        },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------
// JointLaw

JointLaw::JointLaw(Kind kind) : kind_(std::move(kind)) {
  if (const auto* z = std::get_if<ZeroInflatedRho>(&kind_)) {
    require(z->alpha >= 0.0 && z->alpha <= 1.0, "ZeroInflatedRho: alpha must lie in [0,1]");
  } else if (const auto* d = std::get_if<DiscreteJoint>(&kind_)) {
    std::vector<double> probs;
    for (const auto& a : d->atoms) {
      require(std::isfinite(a.rho_value) && std::isfinite(a.eps_value), "DiscreteJoint: atom values must be finite");
      probs.push_back(a.probability);
    }
    validate_probabilities(probs, "DiscreteJoint");
  }
}

std::string_view JointLaw::family() const {
  return std::visit(overloaded{
                        [](const IndependentProduct&) { return std::string_view("IndependentProduct"); },
                        [](const ZeroInflatedRho&) { return std::string_view("ZeroInflatedRho"); },
                        [](const DiscreteJoint&) { return std::string_view("DiscreteJoint"); },
                    },
                    kind_);
}

CoefficientPair sample_pair(const JointLaw& law, RandomStream& rng) {
  return std::visit(overloaded{
                        [&](const JointLaw::IndependentProduct& p) {
                          const double rho = p.rho_marginal.sample(rng);
                          const double eps = p.eps_marginal.sample(rng);
                          return CoefficientPair{rho, eps};
                        },
                        [&](const JointLaw::ZeroInflatedRho& z) {
                          const bool at_zero = rng.uniform() < z.alpha;
                          const double rho = at_zero ? 0.0 : z.rho_given_nonzero.sample(rng);
                          const double eps = z.eps_marginal.sample(rng);
                          return CoefficientPair{rho, eps};
                        },
                        [&](const JointLaw::DiscreteJoint& d) {
                          std::vector<double> probs;
                          probs.reserve(d.atoms.size());
                          for (const auto& a : d.atoms) probs.push_back(a.probability);
                          const auto& atom = d.atoms[draw_index(probs, rng.uniform())];
                          return CoefficientPair{atom.rho_value, atom.eps_value};
                        },
                    },
                    law.kind());
}

double log_moment_rho(const JointLaw& law) {
  return std::visit(overloaded{
                        [](const JointLaw::IndependentProduct& p) { return p.rho_marginal.log_abs_moment(); },
                        [](const JointLaw::ZeroInflatedRho& z) {
                          return z.alpha > 0.0 ? -kInf : z.rho_given_nonzero.log_abs_moment();
                        },
                        [](const JointLaw::DiscreteJoint& d) {
                          double acc = 0.0;
                          for (const auto& a : d.atoms) {
                            if (a.probability <= 0.0) continue;
                            if (a.rho_value == 0.0) return -kInf;
                            acc += a.probability * std::log(std::abs(a.rho_value));
                          }
                          return acc;
                        },
                    },
                    law.kind());
}

double log_plus_moment_eps(const JointLaw& law) {
  return std::visit(overloaded{
                        [](const JointLaw::IndependentProduct& p) { return p.eps_marginal.log_plus_abs_moment(); },
                        [](const JointLaw::ZeroInflatedRho& z) { return z.eps_marginal.log_plus_abs_moment(); },
                        [](const JointLaw::DiscreteJoint& d) {
                          double acc = 0.0;
                          for (const auto& a : d.atoms)
                            if (a.eps_value != 0.0) acc += a.probability * std::max(0.0, std::log(std::abs(a.eps_value)));
                          return acc;
                        },
                    },
                    law.kind());
}

double prob_rho_zero(const JointLaw& law) {
  return std::visit(overloaded{
                        [](const JointLaw::IndependentProduct& p) { return p.rho_marginal.prob_at(0.0); },
                        [](const JointLaw::ZeroInflatedRho& z) {
                          return z.alpha + (1.0 - z.alpha) * z.rho_given_nonzero.prob_at(0.0);
                        },
                        [](const JointLaw::DiscreteJoint& d) {
                          double acc = 0.0;
                          for (const auto& a : d.atoms)
                            if (a.rho_value == 0.0) acc += a.probability;
                          return acc;
                        },
                    },
                    law.kind());
}

bool is_non_degenerate(const JointLaw& law) {
  return std::visit(overloaded{
                        [](const JointLaw::IndependentProduct& p) {
                          return !(p.rho_marginal.is_degenerate() && p.eps_marginal.is_degenerate());
                        },
                        [](const JointLaw::ZeroInflatedRho& z) {
                          const bool rho_constant =
                              z.alpha == 1.0 || (z.alpha == 0.0 && z.rho_given_nonzero.is_degenerate()) ||
                              (z.rho_given_nonzero.is_degenerate() && z.rho_given_nonzero.prob_at(0.0) == 1.0);
                          return !(rho_constant && z.eps_marginal.is_degenerate());
                        },
                        [](const JointLaw::DiscreteJoint& d) {
                          std::optional<JointAtom> seen;
                          for (const auto& a : d.atoms) {
                            if (a.probability <= 0.0) continue;
                            if (seen && (seen->rho_value != a.rho_value || seen->eps_value != a.eps_value)) return true;
                            seen = a;
                          }
                          return false;
                        },
                    },
                    law.kind());
}

double eps_scale(const JointLaw& law) {
  return std::visit(overloaded{
                        [](const JointLaw::IndependentProduct& p) { return p.eps_marginal.abs_scale(); },
                        [](const JointLaw::ZeroInflatedRho& z) { return z.eps_marginal.abs_scale(); },
                        [](const JointLaw::DiscreteJoint& d) {
                          double m = 0.0;
                          for (const auto& a : d.atoms)
                            if (a.probability > 0.0) m = std::max(m, std::abs(a.eps_value));
                          return m;
                        },
                    },
                    law.kind());
}

namespace {

// P(rho x + eps <= y) for independent rho, eps. Whichever coordinate is
// discrete is conditioned on, so step discontinuities never reach quadrature.
double product_transition_cdf(const Marginal& rho, const Marginal& eps, double x, double y) {
  if (x == 0.0) return eps.cdf(y);
  if (rho.is_discrete()) return rho.expectation([&](double r) { return eps.cdf(y - r * x); });
  auto given_eps = [&] {
    return eps.expectation([&](double e) {
      const double c = (y - e) / x;
      return x > 0.0 ? rho.cdf(c) : 1.0 - rho.cdf(c);
    });
  };
  if (eps.is_discrete()) return given_eps();
  // Integrate over whichever coordinate spreads rho x + eps less sharply: for
  // large |x| the eps CDF seen as a function of rho is a narrow step.
  if (std::abs(x) * rho.abs_scale() > eps.abs_scale()) return given_eps();
  return rho.expectation([&](double r) { return eps.cdf(y - r * x); });
}

std::optional<double> product_transition_density(const Marginal& rho, const Marginal& eps, double x, double y) {
  if (!eps.has_pdf()) {
    if (x == 0.0 || rho.is_discrete()) return std::nullopt;
    const double ax = std::abs(x);
    return eps.expectation([&](double e) { return *rho.pdf((y - e) / x) / ax; });
  }
  if (x == 0.0) return eps.pdf(y);
  if (rho.is_discrete()) return rho.expectation([&](double r) { return *eps.pdf(y - r * x); });
  if (const auto* u = std::get_if<Marginal::Uniform>(&rho.kind())) {
    // (1 / (|x| (hi - lo))) * P(eps between y - hi x and y - lo x)
    return std::abs(eps.cdf(y - u->lo * x) - eps.cdf(y - u->hi * x)) / (std::abs(x) * (u->hi - u->lo));
  }
  if (const auto* u = std::get_if<Marginal::Uniform>(&eps.kind())) {
    // y - rho x must land in [lo, hi]
    double a = (y - u->hi) / x;
    double b = (y - u->lo) / x;
    if (a > b) std::swap(a, b);
    return (rho.cdf(b) - rho.cdf(a)) / (u->hi - u->lo);
  }
  return rho.expectation([&](double r) { return *eps.pdf(y - r * x); });
}

}  // namespace

std::optional<double> oracle_transition_cdf(const JointLaw& law, double x, double y) {
  using R = std::optional<double>;
  return std::visit(overloaded{
                        [&](const JointLaw::IndependentProduct& p) -> R {
                          return product_transition_cdf(p.rho_marginal, p.eps_marginal, x, y);
                        },
                        [&](const JointLaw::ZeroInflatedRho& z) -> R {
                          const double at_zero = z.eps_marginal.cdf(y);
                          if (z.alpha == 1.0) return at_zero;
                          return z.alpha * at_zero +
                                 (1.0 - z.alpha) * product_transition_cdf(z.rho_given_nonzero, z.eps_marginal, x, y);
                        },
                        [&](const JointLaw::DiscreteJoint& d) -> R {
                          double acc = 0.0;
                          for (const auto& a : d.atoms)
                            if (a.rho_value * x + a.eps_value <= y) acc += a.probability;
                          return std::min(acc, 1.0);
                        },
                    },
                    law.kind());
}

std::optional<double> oracle_transition_density(const JointLaw& law, double x, double y) {
  using R = std::optional<double>;
  return std::visit(overloaded{
                        [&](const JointLaw::IndependentProduct& p) -> R {
                          return product_transition_density(p.rho_marginal, p.eps_marginal, x, y);
                        },
                        [&](const JointLaw::ZeroInflatedRho& z) -> R {
                          const auto at_zero = z.eps_marginal.pdf(y);
                          if (!at_zero) return std::nullopt;
                          if (z.alpha == 1.0) return at_zero;
                          const auto rest = product_transition_density(z.rho_given_nonzero, z.eps_marginal, x, y);
                          if (!rest) return std::nullopt;
                          return z.alpha * *at_zero + (1.0 - z.alpha) * *rest;
                        },
                        [](const JointLaw::DiscreteJoint&) -> R { return std::nullopt; },
                    },
                    law.kind());
}

std::optional<Complex> oracle_cf_rho(const JointLaw& law, double t) {
  using R = std::optional<Complex>;
  return std::visit(overloaded{
                        [&](const JointLaw::IndependentProduct& p) -> R { return p.rho_marginal.cf(t); },
                        [&](const JointLaw::ZeroInflatedRho& z) -> R {
                          const auto rest = z.rho_given_nonzero.cf(t);
                          if (!rest) return std::nullopt;
                          return z.alpha + (1.0 - z.alpha) * *rest;
                        },
                        [&](const JointLaw::DiscreteJoint& d) -> R {
                          Complex acc(0.0, 0.0);
                          for (const auto& a : d.atoms) acc += a.probability * std::polar(1.0, t * a.rho_value);
                          return acc;
                        },
                    },
                    law.kind());
}

std::optional<Complex> oracle_cf_eps(const JointLaw& law, double t) {
  using R = std::optional<Complex>;
  return std::visit(overloaded{
                        [&](const JointLaw::IndependentProduct& p) -> R { return p.eps_marginal.cf(t); },
                        [&](const JointLaw::ZeroInflatedRho& z) -> R { return z.eps_marginal.cf(t); },
                        [&](const JointLaw::DiscreteJoint& d) -> R {
                          Complex acc(0.0, 0.0);
                          for (const auto& a : d.atoms) acc += a.probability * std::polar(1.0, t * a.eps_value);
                          return acc;
                        },
                    },
                    law.kind());
}

std::optional<Complex> oracle_joint_cf(const JointLaw& law, double t1, double t2) {
  if (const auto* d = std::get_if<JointLaw::DiscreteJoint>(&law.kind())) {
    Complex acc(0.0, 0.0);
    for (const auto& a : d->atoms) acc += a.probability * std::polar(1.0, t1 * a.rho_value + t2 * a.eps_value);
    return acc;
  }
  // Remaining families have rho independent of eps.
  const auto r = oracle_cf_rho(law, t1);
  const auto e = oracle_cf_eps(law, t2);
  if (!r || !e) return std::nullopt;
  return *r * *e;
}

std::optional<double> eps_cdf_given_rho_zero(const JointLaw& law, double y) {
  using R = std::optional<double>;
  return std::visit(overloaded{
                        [&](const JointLaw::IndependentProduct& p) -> R {
                          if (p.rho_marginal.prob_at(0.0) <= 0.0) return std::nullopt;
                          return p.eps_marginal.cdf(y);
                        },
                        [&](const JointLaw::ZeroInflatedRho& z) -> R {
                          if (prob_rho_zero(law) <= 0.0) return std::nullopt;
                          return z.eps_marginal.cdf(y);
                        },
                        [&](const JointLaw::DiscreteJoint& d) -> R {
                          double mass = 0.0;
                          double below = 0.0;
                          for (const auto& a : d.atoms) {
                            if (a.rho_value != 0.0) continue;
                            mass += a.probability;
                            if (a.eps_value <= y) below += a.probability;
                          }
                          if (mass <= 0.0) return std::nullopt;
                          return std::min(below / mass, 1.0);
                        },
                    },
                    law.kind());
}

}  // namespace rcar
