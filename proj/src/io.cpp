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

#include "rcar/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace rcar::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  write(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::invalid_argument("CsvWriter: row width does not match header");
  write(fields);
}

void CsvWriter::write(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << "\r\n";
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c = 0;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && in.peek() == '\n') in.get();
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw std::runtime_error("read_csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const bool driving = traj.has_driving();
  std::vector<std::string> header{"index", "x"};
  if (driving) {
    header.emplace_back("rho");
    header.emplace_back("eps");
  }
  CsvWriter w(out, header);
  const auto path = traj.path();
  const auto pairs = traj.driving();
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::vector<std::string> f{std::to_string(i), format_double(path[i])};
    if (driving) {
      f.push_back(i == 0 ? "" : format_double(pairs[i - 1].rho));
      f.push_back(i == 0 ? "" : format_double(pairs[i - 1].eps));
    }
    w.row(f);
  }
}

Trajectory read_trajectory_csv(std::istream& in, std::uint64_t seed_id) {
  const auto rows = read_csv(in);
  if (rows.size() < 2) throw std::runtime_error("trajectory CSV: need a header and at least X_0");
  const auto& header = rows.front();
  const bool driving = header.size() == 4 && header[2] == "rho" && header[3] == "eps";
  if (!(header.size() >= 2 && header[0] == "index" && header[1] == "x") || !(header.size() == 2 || driving)) {
    throw std::runtime_error("trajectory CSV: unexpected header");
  }
  const double x0 = parse_double(rows[1].at(1));
  std::vector<double> states;
  std::vector<CoefficientPair> pairs;
  for (std::size_t r = 2; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != header.size()) throw std::runtime_error("trajectory CSV: ragged row " + std::to_string(r));
    states.push_back(parse_double(f[1]));
    if (driving) pairs.push_back({parse_double(f[2]), parse_double(f[3])});
  }
  std::optional<std::vector<CoefficientPair>> d;
  if (driving) d = std::move(pairs);
  return Trajectory(x0, std::move(states), std::move(d), seed_id);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) throw std::runtime_error("trajectory frame: truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_trajectory_binary(std::ostream& out, const Trajectory& traj) {
  out.write(kFrameMagic, sizeof(kFrameMagic));
  out.put(static_cast<char>(kFrameVersion));
  out.put(static_cast<char>(traj.has_driving() ? 1 : 0));
  put_u64(out, traj.seed_id());
  put_u64(out, traj.size());
  put_f64(out, traj.x0());
  for (double v : traj.states()) put_f64(out, v);
  for (const auto& p : traj.driving()) {
    put_f64(out, p.rho);
    put_f64(out, p.eps);
  }
}

Trajectory read_trajectory_binary(std::istream& in) {
  char magic[sizeof(kFrameMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kFrameMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("trajectory frame: bad magic");
  }
  const int version = in.get();
  if (version != kFrameVersion) throw std::runtime_error("trajectory frame: unsupported version");
  const int flags = in.get();
  if (flags < 0 || (flags & ~1) != 0) throw std::runtime_error("trajectory frame: bad flags");
  const std::uint64_t seed_id = get_u64(in);
  const std::uint64_t n = get_u64(in);
  const double x0 = get_f64(in);
  std::vector<double> states(n);
  for (auto& v : states) v = get_f64(in);
  std::optional<std::vector<CoefficientPair>> driving;
  if (flags & 1) {
    driving.emplace(n);
    for (auto& p : *driving) {
      p.rho = get_f64(in);
      p.eps = get_f64(in);
    }
  }
  return Trajectory(x0, std::move(states), std::move(driving), seed_id);
}

void write_transition_csv(std::ostream& out, const std::vector<TransitionCdfEstimate>& estimates) {
  CsvWriter w(out, {"x", "h", "y", "value", "bin_count", "empty"});
  for (const auto& e : estimates) {
    for (std::size_t j = 0; j < e.y_grid.size(); ++j) {
      w.row({format_double(e.x), format_double(e.h), format_double(e.y_grid[j]), format_double(e.values[j]),
             std::to_string(e.bin_count), flag(e.empty_bin)});
    }
  }
}

void write_cf_csv(std::ostream& out, const std::vector<CharFnEstimate>& estimates) {
  CsvWriter w(out, {"x", "h", "t", "re", "im", "valid"});
  for (const auto& e : estimates) {
    for (std::size_t k = 0; k < e.t_grid.size(); ++k) {
      w.row({format_double(e.x), format_double(e.h), format_double(e.t_grid[k]), format_double(e.values[k].real()),
             format_double(e.values[k].imag()), flag(e.valid[k])});
    }
  }
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json to_json(const GeometricReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    cells.push_back({{"from", r.cells[c].first},
                     {"to", r.cells[c].second == 0 ? nlohmann::json("inf") : nlohmann::json(r.cells[c].second)},
                     {"observed", r.observed[c]},
                     {"expected", r.expected[c]}});
  }
  return {{"alpha", r.alpha},
          {"cycles", r.cycles},
          {"mean_cycle_length", r.mean_length},
          {"mean_cycle_length_se", r.mean_length_se},
          {"chi_square", r.chi_square},
          {"degrees_of_freedom", r.degrees_of_freedom},
          {"chi_square_p", r.chi_square_p},
          {"ks_halves_statistic", r.ks_halves_statistic},
          {"ks_halves_p", r.ks_halves_p},
          {"cells", cells}};
}

nlohmann::json to_json(const RegenerationValueReport& r) {
  nlohmann::json j{{"regenerations", r.regenerations}, {"identity_holds", r.identity_holds}};
  j["ks_statistic"] = r.ks_statistic ? nlohmann::json(*r.ks_statistic) : nlohmann::json(nullptr);
  j["ks_p"] = r.ks_p ? nlohmann::json(*r.ks_p) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const HarrisCheckReport& r) {
  nlohmann::json hitting = nlohmann::json::array();
  for (const auto& h : r.hitting) {
    hitting.push_back({{"x0", h.x0},
                       {"probability", h.estimate.probability},
                       {"standard_error", h.estimate.standard_error},
                       {"trials", h.estimate.trials}});
  }
  nlohmann::json nx = nlohmann::json::array();
  for (const auto& e : r.theta.entries) {
    nx.push_back({{"x0", e.x0},
                  {"n_x", e.n_x},
                  {"probability_at_n_x", e.probability_at_n_x},
                  {"cap_reached", e.cap_reached}});
  }
  return {{"interval", {r.interval.lo, r.interval.hi}},
          {"hitting_prob_estimates", hitting},
          {"min_density_mass", r.min_density_mass ? nlohmann::json(*r.min_density_mass) : nlohmann::json(nullptr)},
          {"shrunk_interval", {r.theta.shrunk.lo, r.theta.shrunk.hi}},
          {"stationary_mass", r.theta.stationary_mass},
          {"theta_estimate", r.theta.theta_estimate},
          {"n_x_table", nx}};
}

nlohmann::json to_json(const HypothesisReport& r) {
  return {{"log_moment_rho", number(r.log_moment_rho)},
          {"log_plus_moment_eps", number(r.log_plus_moment_eps)},
          {"prob_rho_zero", r.prob_rho_zero},
          {"non_degenerate", r.non_degenerate},
          {"stationary_limit", r.stationary_limit},
          {"non_atomic_limit", r.non_atomic_limit},
          {"harris_regenerative", r.harris_regenerative},
          {"atom_regenerative", r.atom_regenerative},
          {"applicable", r.applicable},
          {"findings", r.findings}};
}

nlohmann::json to_json(const AtomTestReport& r) {
  return {{"resolutions", r.resolutions}, {"max_fraction", r.max_fraction}, {"kappa_hat", r.kappa_hat},
          {"threshold_factor", r.threshold_factor}, {"thresholds", r.thresholds}, {"atomic", r.atomic}};
}

nlohmann::json to_json(const ConvergenceReport& r) {
  return {{"n_list", r.n_list},
          {"ks_distance", r.ks_distance},
          {"m", r.m},
          {"x0", r.x0},
          {"critical_value", r.critical_value},
          {"nonincreasing_within_noise", r.nonincreasing_within_noise},
          {"final_below_limit", r.final_below_limit},
          {"passed", r.passed}};
}

}  // namespace rcar::io
