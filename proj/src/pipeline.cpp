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

#include "rcar/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include <boost/version.hpp>

#include "rcar/diagnostics.hpp"
#include "rcar/errors.hpp"
#include "rcar/estimate.hpp"
#include "rcar/io.hpp"
#include "rcar/process.hpp"
#include "rcar/regen.hpp"
#include "rcar/stats.hpp"

namespace rcar {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string join(const std::string& where, const std::string& name) { return where.empty() ? name : where + "." + name; }

const json& field(const json& j, const std::string& name, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  const auto it = j.find(name);
  if (it == j.end()) throw ConfigError("missing required field '" + join(where, name) + "'");
  return *it;
}

template <class T>
T field_as(const json& j, const std::string& name, const std::string& where) {
  const json& v = field(j, name, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + join(where, name) + "' has the wrong type");
  }
}

Marginal marginal_at(const json& j, const std::string& where) {
  const auto kind = field_as<std::string>(j, "kind", where);
  try {
    if (kind == "Normal") return Marginal::normal(field_as<double>(j, "mean", where), field_as<double>(j, "sd", where));
    if (kind == "Uniform") return Marginal::uniform(field_as<double>(j, "lo", where), field_as<double>(j, "hi", where));
    if (kind == "PointMass") return Marginal::point_mass(field_as<double>(j, "v", where));
    if (kind == "FiniteDiscrete") {
      return Marginal::finite_discrete(field_as<std::vector<double>>(j, "values", where),
                                       field_as<std::vector<double>>(j, "probs", where));
    }
    if (kind == "LogNormalAbs") {
      return Marginal::log_normal_abs(field_as<double>(j, "mu", where), field_as<double>(j, "sigma", where),
                                      field_as<double>(j, "sign_prob", where));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown marginal kind '" + kind + "'");
}

}  // namespace

Marginal marginal_from_json(const json& j) { return marginal_at(j, "marginal"); }

JointLaw law_from_json(const json& j) {
  const std::string where = "law";
  const auto kind = field_as<std::string>(j, "kind", where);
  try {
    if (kind == "IndependentProduct") {
      return JointLaw::independent(marginal_at(field(j, "rho_marginal", where), "law.rho_marginal"),
                                   marginal_at(field(j, "eps_marginal", where), "law.eps_marginal"));
    }
    if (kind == "ZeroInflatedRho") {
      return JointLaw::zero_inflated(field_as<double>(j, "alpha", where),
                                     marginal_at(field(j, "rho_given_nonzero", where), "law.rho_given_nonzero"),
                                     marginal_at(field(j, "eps_marginal", where), "law.eps_marginal"));
    }
    if (kind == "DiscreteJoint") {
      const json& atoms = field(j, "atoms", where);
      if (!atoms.is_array()) throw ConfigError("field 'law.atoms' must be an array");
      std::vector<JointAtom> out;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string at = "law.atoms[" + std::to_string(i) + "]";
        out.push_back({field_as<double>(atoms[i], "rho_value", at), field_as<double>(atoms[i], "eps_value", at),
                       field_as<double>(atoms[i], "probability", at)});
      }
      return JointLaw::discrete(std::move(out));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("law: ") + e.what());
  }
  throw ConfigError("law: unknown kind '" + kind + "'");
}

json to_json(const Marginal& m) {
  return std::visit(overloaded{
                        [](const Marginal::Normal& n) { return json{{"kind", "Normal"}, {"mean", n.mean}, {"sd", n.sd}}; },
                        [](const Marginal::Uniform& u) { return json{{"kind", "Uniform"}, {"lo", u.lo}, {"hi", u.hi}}; },
                        [](const Marginal::PointMass& p) { return json{{"kind", "PointMass"}, {"v", p.v}}; },
                        [](const Marginal::FiniteDiscrete& f) {
                          return json{{"kind", "FiniteDiscrete"}, {"values", f.values}, {"probs", f.probs}};
                        },
                        [](const Marginal::LogNormalAbs& l) {
                          return json{{"kind", "LogNormalAbs"}, {"mu", l.mu}, {"sigma", l.sigma}, {"sign_prob", l.sign_prob}};
                        },
                    },
                    m.kind());
}

json to_json(const JointLaw& law) {
  return std::visit(overloaded{
                        [](const JointLaw::IndependentProduct& p) {
                          return json{{"kind", "IndependentProduct"},
                                      {"rho_marginal", to_json(p.rho_marginal)},
                                      {"eps_marginal", to_json(p.eps_marginal)}};
                        },
                        [](const JointLaw::ZeroInflatedRho& z) {
                          return json{{"kind", "ZeroInflatedRho"},
                                      {"alpha", z.alpha},
                                      {"rho_given_nonzero", to_json(z.rho_given_nonzero)},
                                      {"eps_marginal", to_json(z.eps_marginal)}};
                        },
                        [](const JointLaw::DiscreteJoint& d) {
                          json atoms = json::array();
                          for (const auto& a : d.atoms)
                            atoms.push_back({{"rho_value", a.rho_value}, {"eps_value", a.eps_value}, {"probability", a.probability}});
                          return json{{"kind", "DiscreteJoint"}, {"atoms", atoms}};
                        },
                    },
                    law.kind());
}

std::vector<std::string> pipeline_names() {
  return {"simulate", "regen-stats", "harris-check", "estimate-cdf", "recover-cf", "joint-cf", "diagnose"};
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key has an empty component: '" + key + "'");
    if (!node->is_object()) throw ConfigError("override key '" + key + "' walks into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

namespace {

// Reads parameters and records every value actually used, defaults included,
// so the manifest never depends on implicit defaults.
class Params {
 public:
  explicit Params(const json& config) : config_(config), resolved_(config) {}

  template <class T>
  T get(const std::string& key, T fallback) {
    if (const auto it = config_.find(key); it != config_.end()) {
      try {
        return it->get<T>();
      } catch (const json::exception&) {
        throw ConfigError("field '" + key + "' has the wrong type");
      }
    }
    resolved_[key] = fallback;
    return fallback;
  }

  template <class T>
  T require(const std::string& key) {
    return field_as<T>(config_, key, "");
  }

  /// A number, or the string "default" meaning `fallback()`; the chosen value
  /// is recorded under `key`_resolved.
  double number_or_default(const std::string& key, const std::function<double()>& fallback) {
    double v = 0.0;
    const auto it = config_.find(key);
    if (it == config_.end() || (it->is_string() && it->get<std::string>() == "default")) {
      if (it == config_.end()) resolved_[key] = "default";
      v = fallback();
    } else if (it->is_number()) {
      v = it->get<double>();
    } else {
      throw ConfigError("field '" + key + "' must be a number or \"default\"");
    }
    resolved_[key + "_resolved"] = v;
    return v;
  }

  std::vector<double> grid(const std::string& key, double lo, double hi, std::size_t points) {
    json spec = {{"lo", lo}, {"hi", hi}, {"points", points}};
    if (const auto it = config_.find(key); it != config_.end()) {
      if (it->is_array()) {
        try {
          auto v = it->get<std::vector<double>>();
          if (v.empty()) throw ConfigError("field '" + key + "' is empty");
          return v;
        } catch (const json::exception&) {
          throw ConfigError("field '" + key + "' must be an array of numbers");
        }
      }
      lo = field_as<double>(*it, "lo", key);
      hi = field_as<double>(*it, "hi", key);
      points = field_as<std::size_t>(*it, "points", key);
    } else {
      resolved_[key] = spec;
    }
    if (points < 1 || (points > 1 && !(lo < hi))) throw ConfigError("field '" + key + "' needs points >= 1 and lo < hi");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
      out[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return out;
  }

  const json& resolved() const { return resolved_; }

 private:
  const json& config_;
  json resolved_;
};

// Root seed for an auxiliary task, distinct from the chain streams
// derive(seed, k) used for trajectories.
std::uint64_t task_seed(std::uint64_t seed, std::uint64_t task) {
  return RandomStream::derive(seed, 0x7a5c000000000000ULL + task).id();
}

struct Context {
  const JointLaw& law;
  std::uint64_t seed;
  unsigned workers;
  const std::filesystem::path& out_dir;
  Params& params;
  PipelineResult& result;

  std::ofstream open(const std::string& name, bool binary = false) {
    std::ofstream f(out_dir / name, binary ? std::ios::binary : std::ios::out | std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + (out_dir / name).string());
    result.outputs.push_back(name);
    return f;
  }

  void write_json(const std::string& name, const json& j) {
    auto f = open(name);
    f << j.dump(2) << "\n";
  }
};

StationaryOptions stationary_options(Params& p) {
  StationaryOptions o;
  o.tol_prod = p.get("tol_prod", o.tol_prod);
  o.n_min = p.get("n_min", o.n_min);
  o.n_max = p.get("n_max", o.n_max);
  return o;
}

Trajectory single_trajectory(Context& c, bool retain) {
  const double x0 = c.params.get("x0", 0.0);
  const auto n = c.params.get<std::size_t>("n", 1000000);
  auto chains = run_ensemble(c.law, {1, n, x0, retain}, c.seed, 1);
  return std::move(chains.front());
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// --- simulate -------------------------------------------------------------

void run_simulate(Context& c) {
  EnsembleSpec spec;
  spec.x0 = c.params.get("x0", 0.0);
  spec.length = c.params.get<std::size_t>("n", 1000);
  spec.chains = c.params.get<std::size_t>("chains", 1);
  spec.retain_driving = c.params.get("retain_driving", true);
  const bool binary = c.params.get("binary", true);
  const auto stationary = c.params.get<std::size_t>("stationary_samples", 0);
  if (spec.chains < 1) throw ConfigError("field 'chains' must be >= 1");

  const auto trajectories = run_ensemble(c.law, spec, c.seed, c.workers);
  json chains = json::array();
  std::ostringstream report;
  report << "chain  seed_id               mean          sd            terminal\n";
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto& t = trajectories[k];
    std::ostringstream base;
    base << "trajectory";
    if (spec.chains > 1) base << "_" << std::setw(4) << std::setfill('0') << k;
    {
      auto f = c.open(base.str() + ".csv");
      io::write_trajectory_csv(f, t);
    }
    if (binary) {
      auto f = c.open(base.str() + ".rcar", true);
      io::write_trajectory_binary(f, t);
    }
    const double mean = stats::mean(t.states());
    const double sd = stats::standard_deviation(t.states());
    chains.push_back({{"chain", k}, {"seed_id", t.seed_id()}, {"mean", mean}, {"sd", sd}, {"terminal", t.states().back()}});
    report << std::left << std::setw(7) << k << std::setw(22) << t.seed_id() << std::setw(14) << fmt(mean)
           << std::setw(14) << fmt(sd) << fmt(t.states().back()) << "\n";
  }
  json summary{{"chains", chains}};
  if (stationary > 0) {
    const StationarySampler sampler(c.law, stationary_options(c.params));
    const auto draws = run_stationary_ensemble(sampler, stationary, task_seed(c.seed, 1), c.workers);
    auto f = c.open("stationary.csv");
    io::CsvWriter w(f, {"index", "value", "terms_used", "tail_bound_estimate", "last_increment", "truncated"});
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto& d = draws[i];
      truncated += d.truncated ? 1 : 0;
      w.row({std::to_string(i), io::format_double(d.value), std::to_string(d.terms_used),
             io::format_double(d.tail_bound_estimate), io::format_double(d.last_increment), d.truncated ? "true" : "false"});
    }
    summary["stationary"] = {{"samples", draws.size()}, {"truncated", truncated}};
    report << "stationary samples: " << draws.size() << " (" << truncated << " truncated at n_max)\n";
  }
  c.write_json("summary.json", summary);
  c.result.report = report.str();
}

// --- regen-stats ------------------------------------------------------------

void run_regen_stats(Context& c) {
  const double alpha = prob_rho_zero(c.law);
  if (!(alpha > 0.0)) throw PreconditionError("regen-stats requires P(rho = 0) > 0; this law has P(rho = 0) = 0");
  const auto traj = single_trajectory(c, true);
  const auto decomp = decompose(traj);
  const auto geo = geometric_diagnostics(decomp, alpha);
  const auto values = regeneration_value_check(decomp, traj, c.law);

  const double n = static_cast<double>(traj.size());
  const double rate = static_cast<double>(decomp.tau.size()) / n;
  json j{{"n", traj.size()},
         {"alpha", alpha},
         {"regenerations", decomp.tau.size()},
         {"regeneration_rate", rate},
         {"regeneration_rate_se", std::sqrt(alpha * (1.0 - alpha) / n)},
         {"delay_length", decomp.delay_length},
         {"geometric", io::to_json(geo)},
         {"value_check", io::to_json(values)}};
  c.write_json("regen_stats.json", j);

  std::map<std::size_t, std::size_t> histogram;
  for (const auto& cy : decomp.cycles) ++histogram[cy.length];
  auto f = c.open("cycle_lengths.csv");
  io::CsvWriter w(f, {"length", "count"});
  for (const auto& [len, count] : histogram) w.row({std::to_string(len), std::to_string(count)});

  std::ostringstream r;
  r << "regenerations        " << decomp.tau.size() << " in " << traj.size() << " steps\n"
    << "mean cycle length    " << fmt(geo.mean_length) << " +- " << fmt(geo.mean_length_se) << " (1/alpha = "
    << fmt(1.0 / alpha) << ")\n"
    << "chi-square           " << fmt(geo.chi_square) << " on " << geo.degrees_of_freedom << " df, p = "
    << fmt(geo.chi_square_p) << "\n"
    << "KS halves            D = " << fmt(geo.ks_halves_statistic) << ", p = " << fmt(geo.ks_halves_p) << "\n"
    << "X_tau == eps_tau     " << (values.identity_holds ? "holds" : "FAILS") << " for all " << values.regenerations
    << "\n";
  if (values.ks_p) r << "KS X_tau vs eps|rho=0  p = " << fmt(*values.ks_p) << "\n";
  c.result.report = r.str();
}

// --- harris-check -----------------------------------------------------------

void run_harris_check(Context& c) {
  const auto bounds = c.params.require<std::vector<double>>("interval");
  if (bounds.size() != 2 || !(bounds[0] < bounds[1])) throw ConfigError("field 'interval' must be [c, d] with c < d");
  const Interval interval{bounds[0], bounds[1]};
  const auto x0_list = c.params.get<std::vector<double>>("x0_list", {0.0, 10.0, 100.0});
  const auto n_max = c.params.get<std::size_t>("n_max", 200);
  const auto trials = c.params.get<std::size_t>("trials", 10000);
  const double delta = c.params.get("delta", 0.05);
  ThetaOptions theta_options;
  theta_options.cap = c.params.get("cap", theta_options.cap);
  theta_options.trials = c.params.get("theta_trials", theta_options.trials);
  theta_options.stationary_samples = c.params.get("stationary_samples", theta_options.stationary_samples);
  const bool minorization = c.params.get("minorization", true);

  HarrisCheckReport report{};
  report.interval = interval;
  for (std::size_t i = 0; i < x0_list.size(); ++i) {
    RandomStream rng = RandomStream::derive(c.seed, i);
    report.hitting.push_back({x0_list[i], hitting_probability(c.law, x0_list[i], interval, n_max, trials, rng)});
  }
  if (minorization) {
    const auto grids = default_minorization_grids(c.law, interval);
    report.min_density_mass = minorization_mass(c.law, interval, grids.y_grid, grids.x_grid);
  }
  RandomStream theta_rng(task_seed(c.seed, 2));
  report.theta = estimate_theta_and_nx(c.law, interval, x0_list, delta, theta_rng, theta_options);

  c.write_json("harris_report.json", io::to_json(report));
  {
    auto f = c.open("hitting.csv");
    io::CsvWriter w(f, {"x0", "n_max", "probability", "standard_error", "trials"});
    for (const auto& h : report.hitting)
      w.row({io::format_double(h.x0), std::to_string(n_max), io::format_double(h.estimate.probability),
             io::format_double(h.estimate.standard_error), std::to_string(h.estimate.trials)});
  }
  {
    auto f = c.open("n_x.csv");
    io::CsvWriter w(f, {"x0", "n_x", "probability_at_n_x", "theta_estimate", "cap_reached"});
    for (const auto& e : report.theta.entries)
      w.row({io::format_double(e.x0), std::to_string(e.n_x), io::format_double(e.probability_at_n_x),
             io::format_double(report.theta.theta_estimate), e.cap_reached ? "true" : "false"});
  }
  std::ostringstream r;
  r << "interval [" << interval.lo << ", " << interval.hi << "]\n";
  r << "x0            P(hit by n_max)   se          n_x    P(X_n_x in [c,d])\n";
  for (std::size_t i = 0; i < report.hitting.size(); ++i) {
    const auto& h = report.hitting[i];
    const auto& e = report.theta.entries[i];
    r << std::left << std::setw(14) << fmt(h.x0) << std::setw(18) << fmt(h.estimate.probability) << std::setw(12)
      << fmt(h.estimate.standard_error) << std::setw(7) << (std::to_string(e.n_x) + (e.cap_reached ? "+" : ""))
      << fmt(e.probability_at_n_x) << "\n";
  }
  r << "theta estimate      " << fmt(report.theta.theta_estimate) << "\n";
  r << "minorization mass   "
    << (report.min_density_mass ? fmt(*report.min_density_mass) : std::string(minorization ? "unavailable" : "skipped"))
    << "\n";
  c.result.report = r.str();
}

// --- estimate-cdf -----------------------------------------------------------

void run_estimate_cdf(Context& c) {
  const auto traj = single_trajectory(c, false);
  const auto x_list = c.params.get<std::vector<double>>("x_list", {0.0});
  const auto y_grid = c.params.grid("y_grid", -4.0, 4.0, 201);
  const double h0 = c.params.number_or_default("h", [&] { return bandwidth_default(traj.states()); });
  const auto levels = c.params.get<std::size_t>("ladder_levels", 1);
  if (levels < 1) throw ConfigError("field 'ladder_levels' must be >= 1");

  std::vector<TransitionCdfEstimate> estimates;
  for (double h : bandwidth_ladder(h0, levels))
    for (double x : x_list) estimates.push_back(transition_cdf_estimate(traj, x, h, y_grid));
  {
    auto f = c.open("transition_cdf.csv");
    io::write_transition_csv(f, estimates);
  }
  bool oracle_ok = oracle_transition_cdf(c.law, x_list.front(), y_grid.front()).has_value();
  std::map<double, std::vector<double>> oracle;
  if (oracle_ok) {
    auto f = c.open("oracle_cdf.csv");
    io::CsvWriter w(f, {"x", "y", "value"});
    for (double x : x_list) {
      auto& row = oracle[x];
      for (double y : y_grid) {
        const double g = oracle_transition_cdf(c.law, x, y).value();
        row.push_back(g);
        w.row({io::format_double(x), io::format_double(y), io::format_double(g)});
      }
    }
  }
  json entries = json::array();
  std::ostringstream r;
  r << "x             h             bin_count   max |F - G|\n";
  for (const auto& e : estimates) {
    json j{{"x", e.x}, {"h", e.h}, {"bin_count", e.bin_count}, {"empty", e.empty_bin}};
    std::string err = "-";
    if (oracle_ok && !e.empty_bin) {
      double worst = 0.0;
      for (std::size_t k = 0; k < y_grid.size(); ++k) worst = std::max(worst, std::abs(e.values[k] - oracle[e.x][k]));
      j["max_abs_error"] = worst;
      err = fmt(worst);
    }
    entries.push_back(j);
    r << std::left << std::setw(14) << fmt(e.x) << std::setw(14) << fmt(e.h) << std::setw(12)
      << (e.empty_bin ? std::string("empty") : std::to_string(e.bin_count)) << err << "\n";
  }
  c.write_json("summary.json", {{"estimates", entries}, {"n", traj.size()}});
  c.result.report = r.str();
}

// --- recover-cf -------------------------------------------------------------

double max_cf_error(const CharFnEstimate& e, const std::function<std::optional<std::complex<double>>(double)>& oracle,
                    bool& available) {
  double worst = 0.0;
  available = true;
  for (std::size_t k = 0; k < e.t_grid.size(); ++k) {
    if (!e.valid[k]) continue;
    const auto o = oracle(e.t_grid[k]);
    if (!o) {
      available = false;
      return 0.0;
    }
    worst = std::max(worst, std::abs(e.values[k] - *o));
  }
  return worst;
}

void run_recover_cf(Context& c) {
  const auto traj = single_trajectory(c, false);
  const auto t_grid = c.params.grid("t_grid", -3.0, 3.0, 61);
  const auto rho_t_grid = c.params.grid("rho_t_grid", -2.0, 2.0, 41);
  const double h0 = c.params.number_or_default("h", [&] { return bandwidth_default(traj.states()); });
  const double probe = c.params.number_or_default("x_probe", [&] { return default_probe(traj.states(), h0); });
  const double floor = c.params.get("floor", kDenominatorFloor);
  const auto levels = c.params.get<std::size_t>("ladder_levels", 3);
  if (levels < 1) throw ConfigError("field 'ladder_levels' must be >= 1");

  std::vector<CharFnEstimate> eps_estimates;
  std::vector<CharFnEstimate> rho_estimates;
  json ladder = json::array();
  std::ostringstream r;
  r << "h             eps bin   max|eps err|   rho valid   max|rho err|\n";
  for (double h : bandwidth_ladder(h0, levels)) {
    auto eps = recover_eps_cf(traj.path(), h, t_grid);
    CharFnEstimate rho{probe, h, rho_t_grid, std::vector<std::complex<double>>(rho_t_grid.size()),
                       std::vector<bool>(rho_t_grid.size(), false), 0, true};
    bool all_invalid = false;
    try {
      rho = recover_rho_cf(traj.path(), h, probe, rho_t_grid, floor);
    } catch (const AllEntriesInvalid&) {
      all_invalid = true;
    }
    json j{{"h", h},
           {"x_probe", probe},
           {"eps_bin_count", eps.bin_count},
           {"eps_empty", eps.empty_bin},
           {"rho_bin_count", rho.bin_count},
           {"rho_valid_fraction", static_cast<double>(rho.valid_count()) / static_cast<double>(rho_t_grid.size())},
           {"rho_all_invalid", all_invalid}};
    bool eps_oracle = false;
    bool rho_oracle = false;
    const double eps_err = max_cf_error(eps, [&](double t) { return oracle_cf_eps(c.law, t); }, eps_oracle);
    const double rho_err = max_cf_error(rho, [&](double t) { return oracle_cf_rho(c.law, t); }, rho_oracle);
    if (eps_oracle && !eps.empty_bin) j["eps_max_abs_error"] = eps_err;
    if (rho_oracle && !all_invalid) j["rho_max_abs_error"] = rho_err;
    ladder.push_back(j);
    r << std::left << std::setw(14) << fmt(h) << std::setw(10) << eps.bin_count << std::setw(15)
      << (eps_oracle && !eps.empty_bin ? fmt(eps_err) : "-") << std::setw(12)
      << (std::to_string(rho.valid_count()) + "/" + std::to_string(rho_t_grid.size()))
      << (rho_oracle && !all_invalid ? fmt(rho_err) : "-") << "\n";
    eps_estimates.push_back(std::move(eps));
    rho_estimates.push_back(std::move(rho));
  }
  {
    auto f = c.open("eps_cf.csv");
    io::write_cf_csv(f, eps_estimates);
  }
  {
    auto f = c.open("rho_cf.csv");
    io::write_cf_csv(f, rho_estimates);
  }
  c.write_json("summary.json", {{"n", traj.size()}, {"ladder", ladder}});
  c.result.report = r.str();
}

// --- joint-cf ---------------------------------------------------------------

void run_joint_cf(Context& c) {
  const auto traj = single_trajectory(c, false);
  const double h = c.params.number_or_default("h", [&] { return bandwidth_default(traj.states()); });
  const auto points = c.params.get<std::vector<std::vector<double>>>("points", {{1.0, 1.0}});
  const auto direct_samples = c.params.get<std::size_t>("direct_samples", 1000000);
  for (const auto& p : points)
    if (p.size() != 2 || p[1] == 0.0) throw ConfigError("field 'points' must hold [t1, t2] pairs with t2 != 0");

  // Direct Monte Carlo of E exp(i (t1 rho + t2 eps)) on fresh draws.
  std::vector<std::complex<double>> direct(points.size());
  RandomStream rng(task_seed(c.seed, 3));
  for (std::size_t i = 0; i < direct_samples; ++i) {
    const auto pair = sample_pair(c.law, rng);
    for (std::size_t k = 0; k < points.size(); ++k) direct[k] += std::polar(1.0, points[k][0] * pair.rho + points[k][1] * pair.eps);
  }
  for (auto& d : direct) d /= static_cast<double>(std::max<std::size_t>(direct_samples, 1));

  auto f = c.open("joint_cf.csv");
  io::CsvWriter w(f, {"t1", "t2", "x", "h", "re", "im", "valid", "direct_re", "direct_im", "oracle_re", "oracle_im"});
  std::ostringstream r;
  r << "t1        t2        estimate                  direct MC                 |diff|\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto e = joint_cf_from_transition(traj.path(), h, points[k][0], points[k][1]);
    const auto o = oracle_joint_cf(c.law, points[k][0], points[k][1]);
    w.row({io::format_double(e.t1), io::format_double(e.t2), io::format_double(e.x), io::format_double(h),
           io::format_double(e.value.real()), io::format_double(e.value.imag()), e.empty_bin ? "false" : "true",
           io::format_double(direct[k].real()), io::format_double(direct[k].imag()),
           o ? io::format_double(o->real()) : "", o ? io::format_double(o->imag()) : ""});
    std::ostringstream est;
    est << fmt(e.value.real()) << (e.value.imag() < 0 ? " - " : " + ") << fmt(std::abs(e.value.imag())) << "i";
    std::ostringstream dir;
    dir << fmt(direct[k].real()) << (direct[k].imag() < 0 ? " - " : " + ") << fmt(std::abs(direct[k].imag())) << "i";
    r << std::left << std::setw(10) << fmt(e.t1) << std::setw(10) << fmt(e.t2) << std::setw(26)
      << (e.empty_bin ? std::string("empty bin") : est.str()) << std::setw(26) << dir.str()
      << (e.empty_bin ? std::string("-") : fmt(std::abs(e.value - direct[k]))) << "\n";
  }
  c.result.report = r.str();
}

// --- diagnose ---------------------------------------------------------------

void run_diagnose(Context& c) {
  const auto hyp = check_hypotheses(c.law);
  json j{{"hypotheses", io::to_json(hyp)}};
  std::ostringstream r;
  r << "E log|rho|        " << fmt(hyp.log_moment_rho) << "\n"
    << "E (log|eps|)^+    " << fmt(hyp.log_plus_moment_eps) << "\n"
    << "P(rho = 0)        " << fmt(hyp.prob_rho_zero) << "\n"
    << "non-degenerate    " << (hyp.non_degenerate ? "yes" : "no") << "\n"
    << "applicable        ";
  for (std::size_t i = 0; i < hyp.applicable.size(); ++i) r << (i ? ", " : "") << hyp.applicable[i];
  r << "\n";
  for (const auto& f : hyp.findings) r << "  " << f << "\n";

  const auto samples = c.params.get<std::size_t>("stationary_samples", 100000);
  const auto atom_levels = c.params.get<std::size_t>("atom_levels", 10);
  const auto n_list = c.params.get<std::vector<std::size_t>>("n_list", {5, 20, 100});
  const auto m = c.params.get<std::size_t>("m", 10000);
  const double x0 = c.params.get("x0", 0.0);
  if (hyp.stationary_limit) {
    const StationarySampler sampler(c.law, stationary_options(c.params));
    const auto values = stationary_values(sampler, samples, task_seed(c.seed, 1), c.workers);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = *hi - *lo;
    const auto atoms = atom_test(values, dyadic_resolutions(range > 0.0 ? range : 1.0, atom_levels));
    j["atom_test"] = io::to_json(atoms);
    {
      auto f = c.open("atom_curve.csv");
      io::CsvWriter w(f, {"delta", "max_fraction", "threshold"});
      for (std::size_t i = 0; i < atoms.resolutions.size(); ++i)
        w.row({io::format_double(atoms.resolutions[i]), io::format_double(atoms.max_fraction[i]),
               io::format_double(atoms.thresholds[i])});
    }
    const auto conv = convergence_check(c.law, n_list, m, x0, task_seed(c.seed, 2), c.workers);
    j["convergence"] = io::to_json(conv);
    {
      auto f = c.open("convergence.csv");
      io::CsvWriter w(f, {"n", "ks_distance", "critical_value"});
      for (std::size_t i = 0; i < conv.n_list.size(); ++i)
        w.row({std::to_string(conv.n_list[i]), io::format_double(conv.ks_distance[i]),
               io::format_double(conv.critical_value)});
    }
    r << "atom test         " << (atoms.atomic ? "atomic" : "non-atomic") << " (max fraction "
      << fmt(atoms.max_fraction.back()) << " at delta " << fmt(atoms.resolutions.back()) << ", threshold "
      << fmt(atoms.thresholds.back()) << ")\n";
    r << "convergence       ";
    for (std::size_t i = 0; i < conv.n_list.size(); ++i)
      r << (i ? ", " : "") << "n=" << conv.n_list[i] << ": " << fmt(conv.ks_distance[i], 4);
    r << " (crit " << fmt(conv.critical_value, 4) << ") " << (conv.passed ? "pass" : "FAIL") << "\n";
  }
  c.write_json("diagnosis.json", j);
  c.result.report = r.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

PipelineResult run_pipeline(const std::string& pipeline, const json& config, const std::filesystem::path& out_dir,
                            unsigned workers) {
  static const std::map<std::string, void (*)(Context&)> table{
      {"simulate", run_simulate},         {"regen-stats", run_regen_stats}, {"harris-check", run_harris_check},
      {"estimate-cdf", run_estimate_cdf}, {"recover-cf", run_recover_cf},   {"joint-cf", run_joint_cf},
      {"diagnose", run_diagnose},
  };
  const auto entry = table.find(pipeline);
  if (entry == table.end()) throw ConfigError("unknown pipeline '" + pipeline + "'");
  if (!config.is_object()) throw ConfigError("config must be a JSON object");

  Params params(config);
  const int version = params.get("schema_version", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");
  }
  const auto seed = params.require<std::uint64_t>("seed");
  const JointLaw law = law_from_json(field(config, "law", ""));
  std::filesystem::create_directories(out_dir);

  PipelineResult result;
  Context ctx{law, seed, std::max(1u, workers), out_dir, params, result};
  entry->second(ctx);
  result.resolved_config = params.resolved();
  result.resolved_config["pipeline"] = pipeline;
  return result;
}

int run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    json config;
    {
      std::ifstream in(options.config_path);
      if (!in) throw ConfigError("cannot read config file " + options.config_path.string());
      try {
        config = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    for (const auto& o : options.overrides) apply_override(config, o);
    if (options.seed) config["seed"] = *options.seed;

    const auto start = std::chrono::steady_clock::now();
    auto result = run_pipeline(options.pipeline, config, options.out_dir, options.workers);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;

    json manifest{{"tool", "rcar"},
                  {"version", kToolVersion},
                  {"schema_version", kConfigSchemaVersion},
                  {"pipeline", options.pipeline},
                  {"config_hash", "fnv1a64:" + fnv1a64_hex(result.resolved_config.dump())},
                  {"root_seed", result.resolved_config.at("seed")},
                  {"workers", std::max(1u, options.workers)},
                  {"versions", {{"compiler", __VERSION__}, {"boost", BOOST_LIB_VERSION}}},
                  {"wall_time_seconds", wall.count()},
                  {"timestamp", utc_timestamp()},
                  {"resolved_config", result.resolved_config},
                  {"outputs", result.outputs}};
    std::ofstream mf(options.out_dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
    if (!mf) throw std::runtime_error("cannot write manifest.json");

    out << result.report;
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rcar
